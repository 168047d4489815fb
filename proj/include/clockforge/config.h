// Copyright 2026 The Clockforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Experiment configuration: JSON ingestion with JSON-pointer diagnostics,
// valuation files, and construction of the auction and bidder for one cell.

#ifndef CLOCKFORGE_CONFIG_H_
#define CLOCKFORGE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clockforge/auction.h"
#include "clockforge/bidders.h"
#include "clockforge/encodings.h"
#include "clockforge/errors.h"
#include "clockforge/market.h"

namespace clockforge {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr std::size_t kMaxValuationEntries = 1'000'000;

// Every schema violation found, each prefixed with its JSON pointer.
class ConfigError : public InvalidConfigError {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct PricingSpec {
  PricingScheme scheme = PricingScheme::kLinear;
  int degree = 1;
  bool personalized = false;
  std::vector<Bundle> bundles;  // empty: every non-empty bundle

  FeatureMap Build(int items, int agents) const;
  // "linear", "poly2", "bundle", with a "-pers" suffix when personalized.
  std::string Tag() const;
};

struct StepSpec {
  bool explicit_schedule = false;
  std::optional<double> scale;  // c of c/sqrt(t); defaults to V
  std::vector<double> steps;
};

struct BidderSpec {
  std::string model = "truthful";  // truthful|stochastic|oscillator|garp|random
  std::optional<std::string> valuations;  // path, relative to the config
  NoiseSpec noise;
  std::shared_ptr<BidderSpec> inner;  // garp only
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::filesystem::path base_dir;
  int items = 1;
  int agents = 1;
  PricingSpec pricing;
  int rounds = 1000;
  double lambda = 0.0;
  std::optional<double> radius;
  StepSpec step;
  std::optional<double> clearing_epsilon;
  bool early_stop = true;
  int objective_every = 10;
  int max_exact_items = kDefaultMaxExactItems;
  BidderSpec bidder;
  std::vector<std::uint64_t> seeds;      // default {bidder.seed}
  std::vector<int> horizons;             // default {rounds}
  std::vector<PricingSpec> schemes;      // default {pricing}
  std::filesystem::path output_dir = "out";
  bool full_json = false;
  int reference_factor = 10;
  int objective_samples = 1000;
  std::vector<std::string> warnings;
};

ExperimentConfig ParseConfig(const std::string& json_text,
                             const std::filesystem::path& base_dir = {});
ExperimentConfig LoadConfig(const std::filesystem::path& path);

// A list of {"agent", "bundle": [items], "value"} objects.
ValuationProfile ParseValuations(const std::string& json_text, int agents,
                                 int items);
ValuationProfile LoadValuations(const std::filesystem::path& path, int agents,
                                int items);
std::string ValuationsToJson(const ValuationProfile& v);

// One (seed, T, scheme) cell made concrete.
struct CellPlan {
  std::uint64_t seed = 0;
  int rounds = 0;
  PricingSpec pricing;
  std::string name;
};

std::vector<CellPlan> PlanCells(const ExperimentConfig& cfg);

struct PreparedCell {
  AuctionConfig auction;
  std::unique_ptr<BidderModel> bidder;
  // Mean valuation when the model has one.
  std::optional<ValuationProfile> valuation;
  double valuation_scale = 1.0;
  std::vector<std::string> warnings;
};

PreparedCell PrepareCell(const ExperimentConfig& cfg, const CellPlan& cell);

// Builds a bidder model for `fm`; `seed` seeds stochastic models.
std::unique_ptr<BidderModel> MakeBidder(const ExperimentConfig& cfg,
                                        const BidderSpec& spec,
                                        const FeatureMap& fm,
                                        const StepSchedule& steps,
                                        std::uint64_t seed);

}  // namespace clockforge

#endif  // CLOCKFORGE_CONFIG_H_

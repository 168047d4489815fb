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


// The subgradient auction: quote prices Gw, collect bids b, compute a
// revenue-maximizing allocation q, then
//   g = G^T(q - b) + lambda w,   w <- Pi_R(w - eta g).

#ifndef CLOCKFORGE_AUCTION_H_
#define CLOCKFORGE_AUCTION_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clockforge/bidders.h"
#include "clockforge/encodings.h"
#include "clockforge/market.h"
#include "clockforge/schedule.h"

namespace clockforge {

struct AuctionConfig {
  FeatureMap fm = FeatureMap::Linear(1, 1);
  int rounds = 1000;
  double lambda = 0.0;
  double radius = 1.0;
  StepSchedule step = StepSchedule::InverseSqrt(1.0);
  std::uint64_t seed = 0;
  // Absolute tolerance on lambda ||w|| in the clearing test.
  double clearing_epsilon = 1e-6;
  bool early_stop = true;
  // Sample D_lambda(w^t; v^t) at t = 1 and every k-th round; 0 disables.
  int objective_every = 10;
  int max_exact_items = kDefaultMaxExactItems;
  // Keep the per-round trace. Averages are always maintained.
  bool record_trace = true;
  // Rounds T at which the averaged iterate of the prefix is kept.
  std::vector<int> checkpoints;

  // Throws InvalidConfigError; returns non-fatal warnings. `valuation_scale`
  // is V when known (0 skips the lambda <= 1/V check).
  std::vector<std::string> Validate(double valuation_scale = 0.0) const;
};

struct RoundTrace {
  int t = 0;
  PriceParams w;  // w^t, the iterate prices were quoted at
  BidVector bids;
  AllocationVector allocation;
  PriceParams g;
  double eta = 0.0;
  // Rescale applied by the projection that produced w^{t+1}.
  double gamma = 1.0;
  std::optional<double> objective;
  bool cleared = false;
  // Valuation the bids were consistent with, when the bidder exposes one.
  std::shared_ptr<const BundleMatrix> values;
};

struct AuctionResult {
  PriceParams last_w;  // w^T, the final quoted iterate
  PriceParams next_w;  // w^{T+1}
  PriceParams averaged_w;
  std::map<int, PriceParams> checkpoint_averages;
  std::vector<RoundTrace> trace;
  int rounds_run = 0;
  bool cleared = false;
  std::optional<int> cleared_round;
};

struct Projection {
  PriceParams w;
  double gamma = 1.0;
};

// Orthogonal projection onto the l2 ball of radius R.
Projection ProjectL2(const PriceParams& w, double radius);

AuctionResult RunAuction(const AuctionConfig& cfg, BidderModel& bidder);

// sum_t etahat^t w^t over the first `rounds` entries (all when 0).
PriceParams AveragedIterate(const std::vector<RoundTrace>& trace,
                            int rounds = 0);

// Rebuilds w^t from (eta^s, b^s, q^s, gamma) for s < t alone.
PriceParams ReconstructW(const std::vector<RoundTrace>& trace, int t,
                         const FeatureMap& fm, double lambda);

// Radius guaranteed to contain every optimal w: (n+1) V sqrt(l) for bundle
// prices, (n+1) V m^{r/2} 2^r for polynomial prices.
double SelectRadius(const FeatureMap& fm, double valuation_scale);

// The dimensional constant kappa of the convergence rate.
double KappaBound(const FeatureMap& fm);

}  // namespace clockforge

#endif  // CLOCKFORGE_AUCTION_H_

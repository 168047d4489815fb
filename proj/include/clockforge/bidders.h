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


// Bidder behavior models. Every model returns one bundle per agent (an
// integer point of the consumption set) when quoted prices.

#ifndef CLOCKFORGE_BIDDERS_H_
#define CLOCKFORGE_BIDDERS_H_

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "clockforge/activity.h"
#include "clockforge/encodings.h"
#include "clockforge/market.h"
#include "clockforge/schedule.h"

namespace clockforge {

class BidderModel {
 public:
  virtual ~BidderModel() = default;

  virtual std::string name() const = 0;
  // Rounds are numbered from 1 and quoted in order.
  virtual BidVector Bid(int round, const PriceOracle& prices) = 0;
  // Values (agents x fm.bundles()) the most recent bid best-responds to, or
  // null when the model has no such valuation.
  virtual std::shared_ptr<const BundleMatrix> RealizedValues() const {
    return nullptr;
  }
};

class TruthfulBidder : public BidderModel {
 public:
  TruthfulBidder(FeatureMap fm, const ValuationProfile& v);

  std::string name() const override { return "truthful"; }
  BidVector Bid(int round, const PriceOracle& prices) override;
  std::shared_ptr<const BundleMatrix> RealizedValues() const override {
    return values_;
  }

 private:
  FeatureMap fm_;
  std::shared_ptr<const BundleMatrix> values_;
};

enum class NoiseFamily { kGumbel, kGaussian, kBoundedUniform };

std::string ToString(NoiseFamily family);

struct NoiseSpec {
  NoiseFamily family = NoiseFamily::kGumbel;
  // Gumbel/Gaussian scale sigma, or the half-width of the uniform.
  double scale = 1.0;
  // Weight rho in [0, 1) of a per-round shock shared by all coordinates:
  // eps = sqrt(rho) xi + sqrt(1 - rho) zeta_ix.
  double correlation = 0.0;

  void Validate() const;
};

// Zero-mean draws of one noise coordinate.
class NoiseSampler {
 public:
  NoiseSampler(NoiseSpec spec, std::uint64_t seed);

  double Draw();
  // Fills out with one round of (possibly correlated) noise.
  void Fill(std::span<double> out);
  const NoiseSpec& spec() const { return spec_; }

 private:
  double DrawIndependent();

  NoiseSpec spec_;
  std::mt19937_64 rng_;
};

// v^t = vbar + eps^t, fresh each round, bids best-respond to v^t.
class StochasticBidder : public BidderModel {
 public:
  StochasticBidder(FeatureMap fm, const ValuationProfile& mean,
                   NoiseSpec noise, std::uint64_t seed);

  std::string name() const override { return "stochastic"; }
  BidVector Bid(int round, const PriceOracle& prices) override;
  std::shared_ptr<const BundleMatrix> RealizedValues() const override {
    return realized_;
  }

  // Draws a valuation without bidding; used for sample-average objectives.
  BundleMatrix DrawValues();

 private:
  FeatureMap fm_;
  BundleMatrix mean_;
  NoiseSampler noise_;
  std::shared_ptr<const BundleMatrix> realized_;
};

// Two agents, one item. Both value the item at 0 in odd epochs and 1 in
// even epochs, starting with an odd epoch. An odd epoch ends at the first
// round where its accumulated step mass exceeds the even mass, and an even
// epoch at the first round where the even mass exceeds the odd mass.
class OscillatorBidder : public BidderModel {
 public:
  struct EpochEnd {
    int round;
    bool even;  // parity of the epoch that just ended
    double even_mass;
    double odd_mass;
  };

  OscillatorBidder(FeatureMap fm, StepSchedule steps);

  std::string name() const override { return "oscillator"; }
  BidVector Bid(int round, const PriceOracle& prices) override;
  std::shared_ptr<const BundleMatrix> RealizedValues() const override {
    return realized_;
  }

  const std::vector<EpochEnd>& epoch_ends() const { return ends_; }
  bool in_even_epoch() const { return even_; }

 private:
  FeatureMap fm_;
  StepSchedule steps_;
  bool even_ = false;
  int last_round_ = 0;
  double even_mass_ = 0.0;
  double odd_mass_ = 0.0;
  std::vector<EpochEnd> ends_;
  std::shared_ptr<const BundleMatrix> zeros_;
  std::shared_ptr<const BundleMatrix> ones_;
  std::shared_ptr<const BundleMatrix> realized_;
};

// Adversary that bids a uniformly random bundle (or nothing) per agent.
class RandomBidder : public BidderModel {
 public:
  RandomBidder(FeatureMap fm, std::uint64_t seed);

  std::string name() const override { return "random"; }
  BidVector Bid(int round, const PriceOracle& prices) override;

 private:
  FeatureMap fm_;
  std::mt19937_64 rng_;
};

// Snapshots of every bundle in fm.bundles() under the quoted prices.
std::vector<PriceSnapshot> SnapshotPrices(const FeatureMap& fm,
                                          const PriceOracle& prices);

// Returns `proposed` if adding it to `graph` keeps every agent GARP
// consistent, otherwise the best response under the valuation recovered
// from `graph`.
BidVector GarpRepair(const FeatureMap& fm,
                     const RevealedPreferenceGraph& graph, int round,
                     const BidVector& proposed,
                     const std::vector<PriceSnapshot>& snapshots,
                     const BundleMatrix& prices,
                     double tolerance = kDefaultGarpTolerance);

// Wraps any model and repairs its bids so the history never violates GARP.
class GarpConstrainedBidder : public BidderModel {
 public:
  GarpConstrainedBidder(FeatureMap fm, std::unique_ptr<BidderModel> inner,
                        double tolerance = kDefaultGarpTolerance);

  std::string name() const override { return "garp(" + inner_->name() + ")"; }
  BidVector Bid(int round, const PriceOracle& prices) override;

  const History& history() const { return history_; }
  const RevealedPreferenceGraph& graph() const { return graph_; }
  int repairs() const { return repairs_; }

 private:
  FeatureMap fm_;
  std::unique_ptr<BidderModel> inner_;
  double tolerance_;
  RevealedPreferenceGraph graph_;
  History history_;
  int repairs_ = 0;
};

}  // namespace clockforge

#endif  // CLOCKFORGE_BIDDERS_H_

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


#include "clockforge/bidders.h"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "clockforge/errors.h"

namespace clockforge {

TruthfulBidder::TruthfulBidder(FeatureMap fm, const ValuationProfile& v)
    : fm_(std::move(fm)),
      values_(std::make_shared<const BundleMatrix>(ValueMatrix(fm_, v))) {}

BidVector TruthfulBidder::Bid(int, const PriceOracle& prices) {
  return BestResponse(fm_, *values_, PriceMatrix(fm_, prices)).bids;
}

std::string ToString(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::kGumbel:
      return "gumbel";
    case NoiseFamily::kGaussian:
      return "gaussian";
    case NoiseFamily::kBoundedUniform:
      return "uniform";
  }
  return "unknown";
}

void NoiseSpec::Validate() const {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw InvalidConfigError("noise scale must be finite and >= 0");
  }
  if (!(correlation >= 0.0 && correlation < 1.0)) {
    throw InvalidConfigError("noise correlation must lie in [0, 1)");
  }
}

NoiseSampler::NoiseSampler(NoiseSpec spec, std::uint64_t seed)
    : spec_(spec), rng_(seed) {
  spec_.Validate();
}

double NoiseSampler::DrawIndependent() {
  const double s = spec_.scale;
  if (s == 0.0) return 0.0;
  switch (spec_.family) {
    case NoiseFamily::kGumbel: {
      // Inverse CDF on the open interval, shifted to zero mean.
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      double u = unif(rng_);
      while (u <= 0.0) u = unif(rng_);
      return -s * std::log(-std::log(u)) - s * std::numbers::egamma;
    }
    case NoiseFamily::kGaussian:
      return std::normal_distribution<double>(0.0, s)(rng_);
    case NoiseFamily::kBoundedUniform:
      return std::uniform_real_distribution<double>(-s, s)(rng_);
  }
  return 0.0;
}

double NoiseSampler::Draw() { return DrawIndependent(); }

void NoiseSampler::Fill(std::span<double> out) {
  const double rho = spec_.correlation;
  if (rho == 0.0) {
    for (double& e : out) e = DrawIndependent();
    return;
  }
  const double shared = std::sqrt(rho) * DrawIndependent();
  const double own = std::sqrt(1.0 - rho);
  for (double& e : out) e = shared + own * DrawIndependent();
}

StochasticBidder::StochasticBidder(FeatureMap fm, const ValuationProfile& mean,
                                   NoiseSpec noise, std::uint64_t seed)
    : fm_(std::move(fm)), mean_(ValueMatrix(fm_, mean)), noise_(noise, seed) {}

BundleMatrix StochasticBidder::DrawValues() {
  BundleMatrix v = mean_;
  std::vector<double> eps(v.data().size());
  noise_.Fill(eps);
  for (std::size_t k = 0; k < eps.size(); ++k) v.data()[k] += eps[k];
  return v;
}

BidVector StochasticBidder::Bid(int, const PriceOracle& prices) {
  realized_ = std::make_shared<const BundleMatrix>(DrawValues());
  return BestResponse(fm_, *realized_, PriceMatrix(fm_, prices)).bids;
}

OscillatorBidder::OscillatorBidder(FeatureMap fm, StepSchedule steps)
    : fm_(std::move(fm)), steps_(std::move(steps)) {
  if (fm_.agent_count() != 2 || fm_.item_count() != 1) {
    throw InvalidConfigError(
        "the oscillator adversary needs exactly 2 agents and 1 item");
  }
  zeros_ = std::make_shared<const BundleMatrix>(2, fm_.bundles().size(), 0.0);
  ones_ = std::make_shared<const BundleMatrix>(2, fm_.bundles().size(), 1.0);
}

BidVector OscillatorBidder::Bid(int round, const PriceOracle& prices) {
  if (round != last_round_ + 1) {
    throw InvalidInputError("oscillator rounds must be quoted in order");
  }
  last_round_ = round;
  realized_ = even_ ? ones_ : zeros_;
  const BidVector bids =
      BestResponse(fm_, *realized_, PriceMatrix(fm_, prices)).bids;

  const double eta = steps_(round);
  if (even_) {
    even_mass_ += eta;
  } else {
    odd_mass_ += eta;
  }
  const bool ends = even_ ? even_mass_ > odd_mass_ : odd_mass_ > even_mass_;
  if (ends) {
    ends_.push_back({round, even_, even_mass_, odd_mass_});
    even_ = !even_;
  }
  return bids;
}

RandomBidder::RandomBidder(FeatureMap fm, std::uint64_t seed)
    : fm_(std::move(fm)), rng_(seed) {}

BidVector RandomBidder::Bid(int, const PriceOracle&) {
  const auto& xs = fm_.bundles();
  std::uniform_int_distribution<std::size_t> pick(0, xs.size());
  BidVector b;
  for (int i = 0; i < fm_.agent_count(); ++i) {
    const std::size_t k = pick(rng_);
    b.bundles.push_back(k == xs.size() ? Bundle() : xs[k]);
  }
  return b;
}

std::vector<PriceSnapshot> SnapshotPrices(const FeatureMap& fm,
                                          const PriceOracle& prices) {
  std::vector<PriceSnapshot> out(static_cast<std::size_t>(fm.agent_count()));
  for (int i = 0; i < fm.agent_count(); ++i) {
    auto& snap = out[static_cast<std::size_t>(i)];
    snap.reserve(fm.bundles().size());
    for (Bundle x : fm.bundles()) snap.emplace_back(x, prices(i, x));
  }
  return out;
}

BidVector GarpRepair(const FeatureMap& fm,
                     const RevealedPreferenceGraph& graph, int round,
                     const BidVector& proposed,
                     const std::vector<PriceSnapshot>& snapshots,
                     const BundleMatrix& prices, double tolerance) {
  RevealedPreferenceGraph trial = graph;
  trial.AddRound(round, proposed, snapshots);
  if (trial.Check(tolerance).consistent) return proposed;
  const ValuationProfile v = graph.RecoverValuation(tolerance);
  return BestResponse(fm, ValueMatrix(fm, v), prices).bids;
}

GarpConstrainedBidder::GarpConstrainedBidder(FeatureMap fm,
                                             std::unique_ptr<BidderModel> inner,
                                             double tolerance)
    : fm_(std::move(fm)),
      inner_(std::move(inner)),
      tolerance_(tolerance),
      graph_(fm_.agent_count(), fm_.item_count()),
      history_(fm_.agent_count(), fm_.item_count()) {
  if (!inner_) throw InvalidConfigError("GARP wrapper needs an inner model");
}

BidVector GarpConstrainedBidder::Bid(int round, const PriceOracle& prices) {
  const BidVector proposed = inner_->Bid(round, prices);
  std::vector<PriceSnapshot> snapshots = SnapshotPrices(fm_, prices);
  const BidVector bids =
      GarpRepair(fm_, graph_, round, proposed, snapshots,
                 PriceMatrix(fm_, prices), tolerance_);
  if (!(bids == proposed)) ++repairs_;
  graph_.AddRound(round, bids, snapshots);
  history_.Append(HistoryRound{round, bids, std::move(snapshots)});
  return bids;
}

}  // namespace clockforge

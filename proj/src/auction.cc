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


#include "clockforge/auction.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "clockforge/errors.h"

namespace clockforge {

std::vector<std::string> AuctionConfig::Validate(double valuation_scale) const {
  if (rounds < 1) throw InvalidConfigError("rounds must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidConfigError("lambda must be finite and >= 0");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidConfigError("radius must be positive and finite");
  }
  if (!(clearing_epsilon >= 0.0)) {
    throw InvalidConfigError("clearing epsilon must be >= 0");
  }
  if (objective_every < 0) {
    throw InvalidConfigError("objective_every must be >= 0");
  }
  for (int t : checkpoints) {
    if (t < 1 || t > rounds) {
      throw InvalidConfigError("checkpoint " + std::to_string(t) +
                               " outside 1.." + std::to_string(rounds));
    }
  }
  std::vector<std::string> warnings;
  if (valuation_scale > 0.0 && step.is_inverse_sqrt() &&
      lambda > 1.0 / valuation_scale) {
    warnings.push_back("lambda " + std::to_string(lambda) +
                       " exceeds 1/V = " +
                       std::to_string(1.0 / valuation_scale) +
                       "; the rate guarantee assumes lambda <= 1/V");
  }
  return warnings;
}

Projection ProjectL2(const PriceParams& w, double radius) {
  if (!(radius > 0.0)) throw InvalidInputError("radius must be positive");
  const double norm = Norm2(w);
  Projection p{w, 1.0};
  if (norm > radius) {
    p.gamma = radius / norm;
    for (double& x : p.w) x *= p.gamma;
  }
  return p;
}

namespace {

void CheckBids(const FeatureMap& fm, const BidVector& bids, int round) {
  const auto where = "round " + std::to_string(round) + ": ";
  if (bids.bundles.size() != static_cast<std::size_t>(fm.agent_count())) {
    throw ProtocolError(where + "expected " +
                        std::to_string(fm.agent_count()) + " bids, got " +
                        std::to_string(bids.bundles.size()));
  }
  for (std::size_t i = 0; i < bids.bundles.size(); ++i) {
    const Bundle b = bids.bundles[i];
    if (b.empty()) continue;
    if (!b.FitsIn(fm.item_count()) || !fm.BundleIndex(b)) {
      throw ProtocolError(where + "agent " + std::to_string(i) +
                          " bid " + b.ToString() +
                          ", which is not in the bundle set");
    }
  }
}

}  // namespace

AuctionResult RunAuction(const AuctionConfig& cfg, BidderModel& bidder) {
  cfg.Validate();
  const FeatureMap& fm = cfg.fm;
  const std::size_t d = fm.dimension();
  std::vector<int> checkpoints = cfg.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());

  AuctionResult result;
  PriceParams w(d, 0.0);
  PriceParams weighted(d, 0.0);
  double eta_sum = 0.0;
  auto next_checkpoint = checkpoints.begin();
  if (cfg.record_trace) result.trace.reserve(static_cast<std::size_t>(cfg.rounds));

  for (int t = 1; t <= cfg.rounds; ++t) {
    const PriceOracle oracle = [&fm, &w](int agent, Bundle x) {
      return fm.PriceOf(w, agent, x);
    };
    BidVector bids = bidder.Bid(t, oracle);
    CheckBids(fm, bids, t);

    const BundleMatrix prices = PriceMatrix(fm, w);
    SupplyResult supply = WinnerDetermination(fm, prices, cfg.max_exact_items);
    PriceParams g = Subgradient(fm, w, bids, supply.allocation, cfg.lambda);
    const double eta = cfg.step(t);
    const double w_norm = Norm2(w);

    std::shared_ptr<const BundleMatrix> values = bidder.RealizedValues();
    std::optional<double> objective;
    if (values && cfg.objective_every > 0 &&
        (t == 1 || t % cfg.objective_every == 0)) {
      objective = BestResponse(fm, *values, prices).utility + supply.value +
                  0.5 * cfg.lambda * w_norm * w_norm;
    }
    const bool cleared = SameBundles(bids, supply.allocation) &&
                         cfg.lambda * w_norm <= cfg.clearing_epsilon;

    eta_sum += eta;
    for (std::size_t k = 0; k < d; ++k) weighted[k] += eta * w[k];
    while (next_checkpoint != checkpoints.end() && *next_checkpoint == t) {
      PriceParams avg(d);
      for (std::size_t k = 0; k < d; ++k) avg[k] = weighted[k] / eta_sum;
      result.checkpoint_averages[t] = std::move(avg);
      ++next_checkpoint;
    }

    PriceParams step(d);
    for (std::size_t k = 0; k < d; ++k) step[k] = w[k] - eta * g[k];
    Projection next = ProjectL2(step, cfg.radius);

    result.rounds_run = t;
    if (cleared && !result.cleared_round) result.cleared_round = t;
    if (cfg.record_trace) {
      result.trace.push_back(RoundTrace{t, w, std::move(bids),
                                        std::move(supply.allocation),
                                        std::move(g), eta, next.gamma,
                                        objective, cleared, std::move(values)});
    }
    result.last_w = std::move(w);
    w = std::move(next.w);
    if (cleared && cfg.early_stop) {
      result.cleared = true;
      break;
    }
  }
  result.cleared = result.cleared_round.has_value();
  result.next_w = w;
  result.averaged_w.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    result.averaged_w[k] = weighted[k] / eta_sum;
  }
  return result;
}

PriceParams AveragedIterate(const std::vector<RoundTrace>& trace, int rounds) {
  if (trace.empty()) throw InvalidInputError("empty trace");
  const std::size_t n =
      rounds <= 0 ? trace.size() : static_cast<std::size_t>(rounds);
  if (n > trace.size()) {
    throw InvalidInputError("trace has only " + std::to_string(trace.size()) +
                            " rounds");
  }
  PriceParams avg(trace.front().w.size(), 0.0);
  double eta_sum = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    eta_sum += trace[s].eta;
    for (std::size_t k = 0; k < avg.size(); ++k) {
      avg[k] += trace[s].eta * trace[s].w[k];
    }
  }
  for (double& x : avg) x /= eta_sum;
  return avg;
}

PriceParams ReconstructW(const std::vector<RoundTrace>& trace, int t,
                         const FeatureMap& fm, double lambda) {
  if (t < 1) throw InvalidInputError("rounds are numbered from 1");
  if (static_cast<std::size_t>(t - 1) > trace.size()) {
    throw InvalidInputError("trace holds " + std::to_string(trace.size()) +
                            " rounds, cannot rebuild w^" + std::to_string(t));
  }
  for (int s = 1; s < t; ++s) {
    if (trace[static_cast<std::size_t>(s - 1)].t != s) {
      throw InvalidInputError("trace is not a contiguous prefix");
    }
  }
  PriceParams w(fm.dimension(), 0.0);
  // Coefficient of G^T(b^s - q^s) is gamma^{s+1} eta^s times the decay of
  // every later round.
  double decay = 1.0;
  for (int s = t - 1; s >= 1; --s) {
    const RoundTrace& r = trace[static_cast<std::size_t>(s - 1)];
    const double coef = r.gamma * r.eta * decay;
    for (int i = 0; i < fm.agent_count(); ++i) {
      const auto a = static_cast<std::size_t>(i);
      fm.Accumulate(i, r.bids.bundles.at(a), coef, w);
      fm.Accumulate(i, r.allocation.bundles.at(a), -coef, w);
    }
    decay *= r.gamma * (1.0 - lambda * r.eta);
  }
  return w;
}

double SelectRadius(const FeatureMap& fm, double valuation_scale) {
  const double n = fm.agent_count();
  const double blocks = fm.personalized() ? std::sqrt(n) : 1.0;
  if (fm.scheme() == PricingScheme::kBundle) {
    const double l = static_cast<double>(fm.bundles().size());
    return (n + 1.0) * valuation_scale * std::sqrt(l) * blocks;
  }
  const double m = fm.item_count();
  const double r = fm.degree();
  return (n + 1.0) * valuation_scale * std::pow(m, r / 2.0) *
         std::pow(2.0, r) * blocks;
}

double KappaBound(const FeatureMap& fm) {
  const double n = fm.agent_count();
  const double m = fm.item_count();
  const double spread = 2.0 * SelectRadius(fm, 1.0);
  if (fm.scheme() == PricingScheme::kBundle) {
    return std::sqrt(n) + std::sqrt(m) + spread;
  }
  return (1.0 + std::sqrt(n)) * std::pow(m, fm.degree()) + spread;
}

}  // namespace clockforge

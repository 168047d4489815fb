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


#include "clockforge/verify.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "clockforge/errors.h"

namespace clockforge {

namespace {

constexpr double kWeightTolerance = 1e-9;

// Sum over agents of v_i(b_i).
double BidValue(const FeatureMap& fm, const BundleMatrix& values,
                const std::vector<Bundle>& bundles) {
  double total = 0.0;
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    if (bundles[i].empty()) continue;
    total += values(i, *fm.BundleIndex(bundles[i]));
  }
  return total;
}

void AccumulateBundles(const FeatureMap& fm, const std::vector<Bundle>& bs,
                       double scale, std::span<double> out) {
  for (std::size_t i = 0; i < bs.size(); ++i) {
    fm.Accumulate(static_cast<int>(i), bs[i], scale, out);
  }
}

double Median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

double ResidualTolerance(double valuation_scale) {
  return 1e-6 * std::max(1.0, valuation_scale);
}

double PrimalValue(const FeatureMap& fm, const PriceParams& w,
                   const BundleMatrix& values, double lambda, int max_items) {
  return Objective(fm, w, values, lambda, max_items);
}

void DualCandidate::Validate() const {
  auto check = [](const auto& side, const char* what) {
    if (side.empty()) {
      throw InvalidInputError(std::string(what) + " side is empty");
    }
    double sum = 0.0;
    for (const auto& [point, weight] : side) {
      if (!(weight >= 0.0)) {
        throw InvalidInputError(std::string(what) + " weight is negative");
      }
      sum += weight;
    }
    if (std::abs(sum - 1.0) > kWeightTolerance) {
      throw InvalidInputError(std::string(what) + " weights sum to " +
                              std::to_string(sum));
    }
  };
  check(demand, "demand");
  check(supply, "supply");
}

DualCandidate CandidateFromTrace(const std::vector<RoundTrace>& trace,
                                 int rounds) {
  if (trace.empty()) throw InvalidInputError("empty trace");
  const std::size_t n =
      rounds <= 0 ? trace.size()
                  : std::min(trace.size(), static_cast<std::size_t>(rounds));
  double eta_sum = 0.0;
  for (std::size_t s = 0; s < n; ++s) eta_sum += trace[s].eta;
  // Merge repeated points so the candidate stays small.
  std::map<std::vector<std::uint32_t>, std::size_t> seen_b, seen_q;
  DualCandidate c;
  auto key = [](const std::vector<Bundle>& bs) {
    std::vector<std::uint32_t> k;
    for (Bundle b : bs) k.push_back(b.mask);
    return k;
  };
  for (std::size_t s = 0; s < n; ++s) {
    const double weight = trace[s].eta / eta_sum;
    auto [ib, newb] = seen_b.try_emplace(key(trace[s].bids.bundles),
                                         c.demand.size());
    if (newb) {
      c.demand.emplace_back(trace[s].bids, weight);
    } else {
      c.demand[ib->second].second += weight;
    }
    auto [iq, newq] = seen_q.try_emplace(key(trace[s].allocation.bundles),
                                         c.supply.size());
    if (newq) {
      c.supply.emplace_back(trace[s].allocation, weight);
    } else {
      c.supply[iq->second].second += weight;
    }
  }
  return c;
}

double DualValue(const FeatureMap& fm, const BundleMatrix& values,
                 double lambda, const DualCandidate& candidate,
                 double tolerance) {
  if (!(lambda >= 0.0)) throw InvalidInputError("lambda must be >= 0");
  candidate.Validate();
  double value = 0.0;
  std::vector<double> z(fm.dimension(), 0.0);
  for (const auto& [b, weight] : candidate.demand) {
    value += weight * BidValue(fm, values, b.bundles);
    AccumulateBundles(fm, b.bundles, weight, z);
  }
  for (const auto& [q, weight] : candidate.supply) {
    AccumulateBundles(fm, q.bundles, -weight, z);
  }
  if (lambda == 0.0) {
    return NormInf(z) <= tolerance ? value
                                   : -std::numeric_limits<double>::infinity();
  }
  return value - Dot(z, z) / (2.0 * lambda);
}

GapReport DualityGap(const FeatureMap& fm, const BundleMatrix& values,
                     double lambda, const std::vector<RoundTrace>& trace,
                     double tolerance, int rounds, int max_items) {
  GapReport r;
  r.primal = PrimalValue(fm, AveragedIterate(trace, rounds), values, lambda,
                         max_items);
  if (lambda == 0.0 && fm.HasFullRowRank()) {
    r.dual = WinnerDetermination(fm, values, max_items).value;
    r.used_efficient_welfare = true;
  } else {
    r.dual = DualValue(fm, values, lambda, CandidateFromTrace(trace, rounds),
                       tolerance);
  }
  r.gap = r.primal - r.dual;
  return r;
}

OptimalityReport CheckOptimalityConditions(const FeatureMap& fm,
                                           const PriceParams& w,
                                           const BundleMatrix& values,
                                           double lambda, double tolerance,
                                           std::size_t limit, int max_items) {
  const BundleMatrix prices = PriceMatrix(fm, w);
  const auto& xs = fm.bundles();
  const std::size_t n = static_cast<std::size_t>(fm.agent_count());

  // Per-agent demand ties, including the empty bundle.
  std::vector<std::vector<Bundle>> ties(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      best = std::max(best, values(i, k) - prices(i, k));
    }
    if (best <= tolerance) ties[i].push_back(Bundle());
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (values(i, k) - prices(i, k) >= best - tolerance) {
        ties[i].push_back(xs[k]);
      }
    }
  }
  OptimalityReport report;
  report.best_residual = std::numeric_limits<double>::infinity();
  const std::vector<AllocationVector> supply =
      OptimalAssignments(fm, prices, tolerance, limit, max_items);
  report.supply_points = supply.size();
  report.truncated = supply.size() >= limit;

  std::vector<double> base(fm.dimension());
  for (std::size_t k = 0; k < base.size(); ++k) base[k] = -lambda * w[k];

  std::vector<std::size_t> idx(n, 0);
  std::vector<double> z(fm.dimension());
  std::vector<Bundle> demand(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) demand[i] = ties[i][idx[i]];
    ++report.demand_points;
    for (const AllocationVector& q : supply) {
      z = base;
      AccumulateBundles(fm, demand, 1.0, z);
      AccumulateBundles(fm, q.bundles, -1.0, z);
      const double residual = NormInf(z);
      if (residual < report.best_residual) {
        report.best_residual = residual;
        report.demand.bundles = demand;
        report.supply = q;
      }
      if (q.bundles == demand) report.clearing = true;
    }
    if (report.demand_points >= limit) {
      report.truncated = true;
      break;
    }
    std::size_t i = 0;
    while (i < n && ++idx[i] == ties[i].size()) idx[i++] = 0;
    if (i == n) break;
  }
  report.certificate_found = report.best_residual <= tolerance;
  return report;
}

double VBound(const NoiseSpec& noise, double mean_scale, int agents,
              std::size_t bundles) {
  const double nl = static_cast<double>(agents) * static_cast<double>(bundles);
  if (nl < 1.0) throw InvalidInputError("need at least one coordinate");
  const double s = noise.scale;
  if (noise.family == NoiseFamily::kGumbel) {
    return mean_scale +
           2.0 * s * std::log(2.0 * nl * std::sqrt(std::numbers::pi));
  }
  return mean_scale + s * std::sqrt(2.0 * std::log(2.0 * nl));
}

MagnitudeReport CheckWMagnitude(const FeatureMap& fm, const PriceParams& w,
                                double valuation_scale, double slack) {
  fm.CheckParams(w.size());
  MagnitudeReport r;
  const double n = fm.agent_count();
  r.inf_bound = (n + 1.0) * valuation_scale;
  if (fm.scheme() != PricingScheme::kBundle) {
    r.inf_bound *= std::pow(2.0, fm.degree());
  }
  r.two_bound = SelectRadius(fm, valuation_scale);
  r.inf_norm = NormInf(w);
  r.two_norm = Norm2(w);
  constexpr double kFloor = 1e-12;
  r.pass = r.inf_norm <= r.inf_bound * (1.0 + slack) + kFloor &&
           r.two_norm <= r.two_bound * (1.0 + slack) + kFloor;
  return r;
}

RegretReport CheckRegret(const FeatureMap& fm,
                         const std::vector<RoundTrace>& trace, double lambda,
                         const PriceParams& comparator, double step_scale,
                         int max_items) {
  if (trace.empty()) throw InvalidInputError("empty trace");
  fm.CheckParams(comparator.size());
  const BundleMatrix u_prices = PriceMatrix(fm, comparator);
  const double u_supply = WinnerDetermination(fm, u_prices, max_items).value;
  const double u_norm = Norm2(comparator);
  const double u_reg = 0.5 * lambda * u_norm * u_norm;

  RegretReport r;
  double eta_sum = 0.0;
  double weighted = 0.0;
  for (const RoundTrace& round : trace) {
    if (!round.values) {
      throw InvalidInputError("round " + std::to_string(round.t) +
                              " carries no valuation");
    }
    const BundleMatrix prices = PriceMatrix(fm, round.w);
    // q^t is revenue maximizing, so s(Gw^t) is its revenue.
    double supply = 0.0;
    for (std::size_t i = 0; i < round.allocation.bundles.size(); ++i) {
      const Bundle q = round.allocation.bundles[i];
      if (!q.empty()) supply += prices(i, *fm.BundleIndex(q));
    }
    const double w_norm = Norm2(round.w);
    const double at_w = BestResponse(fm, *round.values, prices).utility +
                        supply + 0.5 * lambda * w_norm * w_norm;
    const double at_u =
        BestResponse(fm, *round.values, u_prices).utility + u_supply + u_reg;
    weighted += round.eta * (at_w - at_u);
    eta_sum += round.eta;
    r.lipschitz = std::max(r.lipschitz, Norm2(round.g));
  }
  r.lhs = weighted / eta_sum;
  const double t = static_cast<double>(trace.size());
  PriceParams diff = trace.front().w;
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= comparator[k];
  const double start = Dot(diff, diff);
  const double lc = r.lipschitz * step_scale;
  r.rhs = (start + lc * lc * std::log(std::numbers::e * t)) /
          (step_scale * std::sqrt(t));
  r.holds = r.lhs <= r.rhs + 1e-9 * std::max(1.0, std::abs(r.rhs));
  return r;
}

double SampleAverageObjective(const FeatureMap& fm, const PriceParams& w,
                              const std::vector<BundleMatrix>& samples,
                              double lambda, int max_items) {
  if (samples.empty()) throw InvalidInputError("no valuation samples");
  const BundleMatrix prices = PriceMatrix(fm, w);
  double utility = 0.0;
  for (const BundleMatrix& v : samples) {
    utility += BestResponse(fm, v, prices).utility;
  }
  const double norm = Norm2(w);
  return utility / static_cast<double>(samples.size()) +
         WinnerDetermination(fm, prices, max_items).value +
         0.5 * lambda * norm * norm;
}

double PriceDistance(const FeatureMap& fm, const PriceParams& a,
                     const PriceParams& b) {
  const BundleMatrix pa = PriceMatrix(fm, a);
  const BundleMatrix pb = PriceMatrix(fm, b);
  double dist = 0.0;
  for (std::size_t k = 0; k < pa.data().size(); ++k) {
    dist = std::max(dist, std::abs(pa.data()[k] - pb.data()[k]));
  }
  return dist;
}

double ObjectiveEnvelope(double kappa, double valuation_scale, int horizon,
                         double delta) {
  const double t = horizon;
  return kappa * kappa * valuation_scale * std::log(t) *
         std::sqrt(std::log(1.0 / delta)) / std::sqrt(t);
}

double PriceEnvelope(double kappa, double g_norm, double lambda, int horizon) {
  if (!(lambda > 0.0)) throw InvalidInputError("price envelope needs lambda > 0");
  const double t = horizon;
  return kappa * g_norm / lambda * std::sqrt(std::log(t) / std::sqrt(t));
}

BoundReport BuildBoundReport(const std::vector<int>& horizons,
                             const std::vector<std::vector<double>>& per_seed,
                             const std::vector<double>& envelope,
                             int fit_horizon, double slack) {
  if (horizons.size() != envelope.size()) {
    throw InvalidInputError("horizons and envelope differ in length");
  }
  if (per_seed.empty()) throw InvalidInputError("no seeds");
  for (const auto& series : per_seed) {
    if (series.size() != horizons.size()) {
      throw InvalidInputError("seed series length differs from horizons");
    }
  }
  BoundReport r;
  r.horizons = horizons;
  r.envelope = envelope;
  r.fit_horizon = fit_horizon;
  for (std::size_t k = 0; k < horizons.size(); ++k) {
    std::vector<double> column;
    for (const auto& series : per_seed) column.push_back(series[k]);
    r.median.push_back(Median(column));
    r.worst.push_back(*std::max_element(column.begin(), column.end()));
    r.ratio.push_back(envelope[k] > 0.0 ? r.worst.back() / envelope[k]
                                        : std::numeric_limits<double>::infinity());
    if (horizons[k] <= fit_horizon) {
      r.fitted_constant = std::max(r.fitted_constant, r.ratio.back());
    }
  }
  for (std::size_t k = 0; k < horizons.size(); ++k) {
    if (r.worst[k] > r.fitted_constant * (1.0 + slack) * envelope[k]) {
      r.flagged.push_back(horizons[k]);
    }
  }
  return r;
}

std::map<int, double> ObjectiveGapSeries(
    const FeatureMap& fm, const std::map<int, PriceParams>& averages,
    const PriceParams& reference, const std::vector<BundleMatrix>& samples,
    double lambda, int max_items) {
  if (reference.empty()) throw InvalidInputError("missing reference run");
  const double best =
      SampleAverageObjective(fm, reference, samples, lambda, max_items);
  std::map<int, double> gaps;
  for (const auto& [t, w] : averages) {
    gaps[t] = SampleAverageObjective(fm, w, samples, lambda, max_items) - best;
  }
  return gaps;
}

std::map<int, double> PriceDistanceSeries(
    const FeatureMap& fm, const std::map<int, PriceParams>& averages,
    const PriceParams& reference) {
  if (reference.empty()) throw InvalidInputError("missing reference run");
  std::map<int, double> dist;
  for (const auto& [t, w] : averages) {
    dist[t] = PriceDistance(fm, w, reference);
  }
  return dist;
}

double OscillatorWeightedObjective(double price, double even_mass,
                                   double odd_mass) {
  return 2.0 * even_mass * std::max(1.0 - price, 0.0) +
         2.0 * odd_mass * std::max(-price, 0.0) +
         (even_mass + odd_mass) * std::max(price, 0.0);
}

double OscillatorMinimizer(double even_mass, double odd_mass) {
  // Convex and piecewise linear with kinks at 0 and 1, decreasing below 0
  // and increasing above 1, so a kink attains the minimum.
  const double at0 = OscillatorWeightedObjective(0.0, even_mass, odd_mass);
  const double at1 = OscillatorWeightedObjective(1.0, even_mass, odd_mass);
  return at1 < at0 ? 1.0 : 0.0;
}

}  // namespace clockforge

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


// Certificates and bound checks: duality gaps, optimality conditions, the
// bound constants, and empirical-versus-envelope convergence series.

#ifndef CLOCKFORGE_VERIFY_H_
#define CLOCKFORGE_VERIFY_H_

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "clockforge/auction.h"
#include "clockforge/bidders.h"
#include "clockforge/encodings.h"
#include "clockforge/market.h"

namespace clockforge {

inline constexpr double kDefaultDelta = 0.05;

// Residual tolerance 1e-6 max(1, V).
double ResidualTolerance(double valuation_scale);

double PrimalValue(const FeatureMap& fm, const PriceParams& w,
                   const BundleMatrix& values, double lambda,
                   int max_items = kDefaultMaxExactItems);

// Convex weights over observed integer bids (a point of H) and allocations
// (a point of F).
struct DualCandidate {
  std::vector<std::pair<BidVector, double>> demand;
  std::vector<std::pair<AllocationVector, double>> supply;

  // Throws InvalidInputError unless weights are >= 0 and sum to one.
  void Validate() const;
};

// etahat-weighted bids and allocations of the first `rounds` trace entries.
DualCandidate CandidateFromTrace(const std::vector<RoundTrace>& trace,
                                 int rounds = 0);

// v^T q - ||G^T(q - q')||^2 / (2 lambda). At lambda = 0 the value is v^T q
// when ||G^T(q - q')||_inf <= tolerance and -infinity otherwise.
double DualValue(const FeatureMap& fm, const BundleMatrix& values,
                 double lambda, const DualCandidate& candidate,
                 double tolerance);

struct GapReport {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  bool used_efficient_welfare = false;
};

// Primal value at the averaged iterate minus a dual value: the efficient
// welfare when lambda = 0 and G has full row rank, otherwise the dual at the
// trace's averaged candidate.
GapReport DualityGap(const FeatureMap& fm, const BundleMatrix& values,
                     double lambda, const std::vector<RoundTrace>& trace,
                     double tolerance, int rounds = 0,
                     int max_items = kDefaultMaxExactItems);

struct OptimalityReport {
  bool certificate_found = false;
  double best_residual = 0.0;  // min ||G^T(b - q) - lambda w||_inf
  BidVector demand;
  AllocationVector supply;
  // Some demanded integer point is also revenue maximizing.
  bool clearing = false;
  std::size_t demand_points = 0;
  std::size_t supply_points = 0;
  bool truncated = false;
};

// Enumerates integer points of U(Gw) and S(Gw) within `tolerance` of optimal
// and searches for a pair satisfying the optimality conditions.
OptimalityReport CheckOptimalityConditions(
    const FeatureMap& fm, const PriceParams& w, const BundleMatrix& values,
    double lambda, double tolerance, std::size_t limit = 1'000'000,
    int max_items = kDefaultMaxExactItems);

// Upper bound on E||v||_inf for v = vbar + eps with coordinate noise `noise`
// over n agents and l bundles.
double VBound(const NoiseSpec& noise, double mean_scale, int agents,
              std::size_t bundles);

struct MagnitudeReport {
  double inf_norm = 0.0;
  double inf_bound = 0.0;
  double two_norm = 0.0;
  double two_bound = 0.0;
  bool pass = false;
};

// ||w||_inf <= (n+1) V (bundle) or (n+1) V 2^r (polynomial), and ||w||_2
// within SelectRadius, each with relative slack.
MagnitudeReport CheckWMagnitude(const FeatureMap& fm, const PriceParams& w,
                                double valuation_scale, double slack = 0.01);

struct RegretReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double lipschitz = 0.0;
  bool holds = false;
};

// sum_t etahat^t (D(w^t; v^t) - D(u; v^t)) against
// (||w^1 - u||^2 + L^2 c^2 ln(eT)) / (c sqrt(T)) for eta^t = c / sqrt(t).
// Every round must carry the valuation its bids responded to.
RegretReport CheckRegret(const FeatureMap& fm,
                         const std::vector<RoundTrace>& trace, double lambda,
                         const PriceParams& comparator, double step_scale,
                         int max_items = kDefaultMaxExactItems);

// Mean of u(Gw; v_k) over the samples, plus s(Gw) + lambda/2 ||w||^2.
double SampleAverageObjective(const FeatureMap& fm, const PriceParams& w,
                              const std::vector<BundleMatrix>& samples,
                              double lambda,
                              int max_items = kDefaultMaxExactItems);

// max_{i,x} |p_i(x) - q_i(x)| for p = Ga, q = Gb.
double PriceDistance(const FeatureMap& fm, const PriceParams& a,
                     const PriceParams& b);

// kappa^2 V ln T sqrt(ln(1/delta)) / sqrt(T).
double ObjectiveEnvelope(double kappa, double valuation_scale, int horizon,
                         double delta = kDefaultDelta);
// (kappa ||G||_{2,inf} / lambda) sqrt(ln T / sqrt(T)).
double PriceEnvelope(double kappa, double g_norm, double lambda, int horizon);

struct BoundReport {
  double kappa = 0.0;
  double valuation_scale = 0.0;
  double radius = 0.0;
  double delta = kDefaultDelta;
  int fit_horizon = 0;
  // C fitted as the largest empirical/envelope ratio over T <= fit_horizon.
  double fitted_constant = 0.0;
  std::vector<int> horizons;
  std::vector<double> envelope;
  std::vector<double> median;  // median across seeds per horizon
  std::vector<double> worst;   // max across seeds per horizon
  std::vector<double> ratio;   // worst / envelope
  std::vector<int> flagged;    // horizons where worst > C (1 + slack) envelope
};

// per_seed[s][k] is seed s's empirical series at horizons[k].
BoundReport BuildBoundReport(const std::vector<int>& horizons,
                             const std::vector<std::vector<double>>& per_seed,
                             const std::vector<double>& envelope,
                             int fit_horizon, double slack = 0.01);

// Gap of each checkpoint average against a reference optimum under a
// sample-average objective. Throws InvalidInputError without a reference.
std::map<int, double> ObjectiveGapSeries(
    const FeatureMap& fm, const std::map<int, PriceParams>& averages,
    const PriceParams& reference, const std::vector<BundleMatrix>& samples,
    double lambda, int max_items = kDefaultMaxExactItems);
std::map<int, double> PriceDistanceSeries(
    const FeatureMap& fm, const std::map<int, PriceParams>& averages,
    const PriceParams& reference);

// Oscillator instance: sum of eta-weighted objectives with even mass E and
// odd mass O at scalar price p, and its exact minimizer (1 if E > O, 0 if
// O > E).
double OscillatorWeightedObjective(double price, double even_mass,
                                   double odd_mass);
double OscillatorMinimizer(double even_mass, double odd_mass);

}  // namespace clockforge

#endif  // CLOCKFORGE_VERIFY_H_

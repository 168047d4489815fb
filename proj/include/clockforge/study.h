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


// Convergence-rate studies: per-seed runs with checkpointed averages,
// long reference runs, and empirical series against the envelopes.

#ifndef CLOCKFORGE_STUDY_H_
#define CLOCKFORGE_STUDY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clockforge/config.h"
#include "clockforge/verify.h"

namespace clockforge {

struct RateStudyOptions {
  int fit_horizon = 500;
  double delta = kDefaultDelta;
  int workers = 1;
};

struct SeedSeries {
  std::uint64_t seed = 0;
  double valuation_scale = 0.0;
  std::vector<double> objective_gap;   // one entry per horizon
  std::vector<double> price_distance;  // empty unless lambda > 0
  PriceParams reference_w;
  MagnitudeReport magnitude;           // of reference_w
  int repairs = 0;                     // GARP repairs, if any
  bool garp_consistent = true;
};

struct RateStudy {
  std::vector<int> horizons;
  double kappa = 0.0;
  double g_norm = 0.0;
  double lambda = 0.0;
  std::vector<SeedSeries> seeds;
  BoundReport objective;
  std::optional<BoundReport> price;
};

// Truthful, stochastic and GARP-constrained models are supported; the
// comparator valuation is the fixed one, the noise distribution (by sample
// average), or the one recovered from the run's history.
RateStudy RunRateStudy(const ExperimentConfig& cfg,
                       const RateStudyOptions& options = {});

std::string RateStudyToJson(const RateStudy& study);
// Horizon, fitted envelope C x envelope and median/worst per series, one row
// per horizon.
std::string RateStudyToCsv(const RateStudy& study);

}  // namespace clockforge

#endif  // CLOCKFORGE_STUDY_H_

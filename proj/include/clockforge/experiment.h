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


// Sweep orchestration: one auction per (seed, T, scheme) cell on a bounded
// worker pool, per-cell trace files, and a summary written at the end.

#ifndef CLOCKFORGE_EXPERIMENT_H_
#define CLOCKFORGE_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "clockforge/config.h"

namespace clockforge {

struct RunOptions {
  int workers = 1;
  // Skip cells whose sidecar already exists.
  bool resume = false;
  std::optional<std::uint64_t> seed;  // replaces the sweep seeds
  std::function<void(const std::string&)> log;
};

struct CellSummary {
  std::string name;
  std::uint64_t seed = 0;
  int rounds = 0;
  std::string scheme;
  int rounds_run = 0;
  bool cleared = false;
  std::optional<int> cleared_round;
  // "duality" (fixed valuation) or "reference" (stochastic, against a
  // longer reference run); absent for adversarial models.
  std::optional<double> final_gap;
  std::string gap_kind;
  double final_w_norm = 0.0;
  bool resumed = false;
};

struct ExperimentSummary {
  std::vector<CellSummary> cells;
  int ran = 0;
  int skipped = 0;
};

// Runs a single planned cell and writes its artifacts.
CellSummary RunCell(const ExperimentConfig& cfg, const CellPlan& cell);

ExperimentSummary RunExperiment(ExperimentConfig cfg,
                                const RunOptions& options);

std::string CellSummaryToJson(const CellSummary& s);
CellSummary CellSummaryFromJson(const std::string& text);

}  // namespace clockforge

#endif  // CLOCKFORGE_EXPERIMENT_H_

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


// Trace persistence: the versioned per-round CSV and the full JSON trace.

#ifndef CLOCKFORGE_TRACE_IO_H_
#define CLOCKFORGE_TRACE_IO_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clockforge/activity.h"
#include "clockforge/auction.h"
#include "clockforge/config.h"

namespace clockforge {

inline constexpr char kTraceCsvMagic[] = "# clockforge-trace v1";
inline constexpr char kTraceCsvColumns[] =
    "t,eta,gamma,w_norm,g_norm,objective,cleared";

struct TraceCsvRow {
  int t = 0;
  double eta = 0.0;
  double gamma = 1.0;
  double w_norm = 0.0;
  double g_norm = 0.0;
  std::optional<double> objective;
  bool cleared = false;
};

struct TraceCsv {
  std::map<std::string, std::string> meta;  // from the "# key=value" line
  std::vector<TraceCsvRow> rows;
};

void WriteTraceCsv(std::ostream& out, const AuctionConfig& cfg,
                   const AuctionResult& result);
// Throws InvalidInputError on a missing magic line, wrong columns, or
// unparsable rows.
TraceCsv ReadTraceCsv(std::istream& in);

// Checks the per-round invariants on a reloaded CSV: gamma in (0, 1],
// ||w^t|| <= radius for t >= 2, w^1 = 0, strictly increasing t. Returns the
// violations found.
std::vector<std::string> CheckTraceCsv(const TraceCsv& trace);

struct LoadedTrace {
  int items = 0;
  int agents = 0;
  PricingSpec pricing;
  double lambda = 0.0;
  double radius = 0.0;
  std::vector<RoundTrace> rounds;

  FeatureMap BuildFeatureMap() const { return pricing.Build(items, agents); }
};

void WriteTraceJson(std::ostream& out, const PricingSpec& pricing,
                    const AuctionConfig& cfg, const AuctionResult& result);
LoadedTrace ReadTraceJson(std::istream& in);

// (b^t, full price snapshot of w^t over X) for every logged round.
History HistoryFromTrace(const LoadedTrace& trace);

}  // namespace clockforge

#endif  // CLOCKFORGE_TRACE_IO_H_

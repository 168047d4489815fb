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

// Revealed-preference (GARP) activity rule: cycle checks over bid/price
// histories and recovery of a valuation that rationalizes every round.
//
// For agent i the round graph has an edge s -> t of cost
// p_i^s(b_i^t) - p_i^s(b_i^s). The history satisfies the rule iff no agent's
// graph has a negative cycle. Rounds in which an agent bid the same bundle
// are joined by zero-cost edges in both directions, so the graph is
// collapsed onto the distinct bid bundles: the edge y -> x keeps the
// cheapest round s with b_i^s = y, and cycles are expanded back into round
// indices through those witness rounds.

#ifndef CLOCKFORGE_ACTIVITY_H_
#define CLOCKFORGE_ACTIVITY_H_

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "clockforge/bundle.h"
#include "clockforge/market.h"

namespace clockforge {

inline constexpr double kDefaultGarpTolerance = 1e-9;

// Prices one agent saw in one round, for the bundles that matter. The empty
// bundle is implicitly priced at zero.
using PriceSnapshot = std::vector<std::pair<Bundle, double>>;

struct HistoryRound {
  int round = 0;
  BidVector bids;
  std::vector<PriceSnapshot> prices;  // one snapshot per agent
};

class History {
 public:
  History(int agent_count, int item_count);

  int agent_count() const { return agent_count_; }
  int item_count() const { return item_count_; }
  const std::vector<HistoryRound>& rounds() const { return rounds_; }
  bool empty() const { return rounds_.empty(); }

  // Throws InvalidInputError unless round numbers strictly increase and the
  // shapes match.
  void Append(HistoryRound round);
  // Records bids and the full price function over fm.bundles().
  void Append(int round, const BidVector& bids, const FeatureMap& fm,
              const PriceParams& w);

  // Price agent i saw for x in the given round entry; nullopt if unknown.
  std::optional<double> PriceAt(std::size_t entry, int agent, Bundle x) const;

 private:
  int agent_count_;
  int item_count_;
  std::vector<HistoryRound> rounds_;
};

struct GarpViolation {
  int agent = 0;
  // Distinct rounds t_1, ..., t_k; the cycle closes back to t_1.
  std::vector<int> rounds;
  // Sum of (b_i^{t_{k+1}} - b_i^{t_k})^T p_i^{t_k} for the violating agent.
  double agent_cycle_sum = 0.0;
  // The same sum over all agents; NaN when some snapshot lacks a price.
  double joint_cycle_sum = 0.0;
};

struct GarpResult {
  bool consistent = true;
  std::optional<GarpViolation> violation;
};

// Incrementally maintained per-agent revealed-preference graphs.
class RevealedPreferenceGraph {
 public:
  RevealedPreferenceGraph(int agent_count, int item_count);

  // `prices[i]` must price agent i's own bid (unless empty) and every bundle
  // the caller wants constrained.
  void AddRound(int round, const BidVector& bids,
                const std::vector<PriceSnapshot>& prices);

  std::size_t round_count() const { return round_count_; }

  // Bellman-Ford from a virtual source on each agent's collapsed graph.
  // Throws InvalidInputError when two bid bundles cannot be compared because
  // a snapshot lacks a price.
  GarpResult Check(double tolerance = kDefaultGarpTolerance) const;

  // Afriat construction v_i(x) = min_t zeta_i^t - p_i^t(b_i^t) + p_i^t(x)
  // with shortest-path potentials zeta, shifted so v_i(empty) = 0. Bundles
  // no snapshot priced are left at zero. Throws PreconditionError if the
  // history violates GARP.
  ValuationProfile RecoverValuation(
      double tolerance = kDefaultGarpTolerance) const;

 private:
  struct Edge {
    double cost;
    int round;
  };
  struct AgentGraph {
    // bid bundle y -> (priced bundle x -> cheapest p^s(x) - p^s(y))
    std::map<Bundle, std::map<Bundle, Edge>> rows;
  };
  struct Potentials {
    std::vector<Bundle> nodes;
    std::vector<double> distance;
  };

  // Either potentials or a negative cycle for one agent.
  std::pair<std::optional<Potentials>, std::optional<GarpViolation>> Solve(
      int agent, double tolerance) const;

  int agent_count_;
  int item_count_;
  std::size_t round_count_ = 0;
  std::vector<AgentGraph> graphs_;
};

GarpResult CheckGarp(const History& history,
                     double tolerance = kDefaultGarpTolerance);
ValuationProfile RecoverValuation(const History& history,
                                  double tolerance = kDefaultGarpTolerance);

// Cycle sum of (b_i^{t_{k+1}} - b_i^{t_k})^T p_i^{t_k} for one agent over the
// given history entries (indices into history.rounds(), not round numbers),
// closing back to the first entry. NaN if a price is missing.
double AgentCycleSum(const History& history, int agent,
                     const std::vector<std::size_t>& entries);
double JointCycleSum(const History& history,
                     const std::vector<std::size_t>& entries);

}  // namespace clockforge

#endif  // CLOCKFORGE_ACTIVITY_H_

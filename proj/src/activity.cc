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

#include "clockforge/activity.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "clockforge/errors.h"

namespace clockforge {

namespace {

std::optional<double> FindPrice(const PriceSnapshot& snapshot, Bundle x) {
  if (x.empty()) return 0.0;
  for (const auto& [bundle, price] : snapshot) {
    if (bundle == x) return price;
  }
  return std::nullopt;
}

}  // namespace

History::History(int agent_count, int item_count)
    : agent_count_(agent_count), item_count_(item_count) {
  if (agent_count < 1) throw InvalidInputError("agent count must be >= 1");
  if (item_count < 1 || item_count > kMaxItems) {
    throw InvalidInputError("item count out of range");
  }
}

void History::Append(HistoryRound round) {
  if (!rounds_.empty() && round.round <= rounds_.back().round) {
    throw InvalidInputError("history round indices must strictly increase (" +
                            std::to_string(round.round) + " after " +
                            std::to_string(rounds_.back().round) + ")");
  }
  const auto n = static_cast<std::size_t>(agent_count_);
  if (round.bids.bundles.size() != n || round.prices.size() != n) {
    throw InvalidInputError("history round " + std::to_string(round.round) +
                            " needs one bid and one snapshot per agent");
  }
  for (Bundle b : round.bids.bundles) {
    if (!b.FitsIn(item_count_)) {
      throw InvalidInputError("history bid " + b.ToString() +
                              " exceeds the item count");
    }
  }
  rounds_.push_back(std::move(round));
}

void History::Append(int round, const BidVector& bids, const FeatureMap& fm,
                     const PriceParams& w) {
  HistoryRound entry;
  entry.round = round;
  entry.bids = bids;
  const BundleMatrix prices = PriceMatrix(fm, w);
  entry.prices.resize(static_cast<std::size_t>(agent_count_));
  for (int i = 0; i < agent_count_; ++i) {
    auto& snapshot = entry.prices[static_cast<std::size_t>(i)];
    snapshot.reserve(fm.bundles().size());
    for (std::size_t k = 0; k < fm.bundles().size(); ++k) {
      snapshot.emplace_back(fm.bundles()[k], prices(i, k));
    }
  }
  Append(std::move(entry));
}

std::optional<double> History::PriceAt(std::size_t entry, int agent,
                                       Bundle x) const {
  return FindPrice(rounds_.at(entry).prices.at(static_cast<std::size_t>(agent)),
                   x);
}

RevealedPreferenceGraph::RevealedPreferenceGraph(int agent_count,
                                                 int item_count)
    : agent_count_(agent_count),
      item_count_(item_count),
      graphs_(static_cast<std::size_t>(agent_count)) {}

void RevealedPreferenceGraph::AddRound(int round, const BidVector& bids,
                                       const std::vector<PriceSnapshot>& prices) {
  const auto n = static_cast<std::size_t>(agent_count_);
  if (bids.bundles.size() != n || prices.size() != n) {
    throw InvalidInputError("round " + std::to_string(round) +
                            " needs one bid and one snapshot per agent");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Bundle own = bids.bundles[i];
    const std::optional<double> own_price = FindPrice(prices[i], own);
    if (!own_price) {
      throw InvalidInputError("round " + std::to_string(round) + ", agent " +
                              std::to_string(i) +
                              ": snapshot lacks the price of its own bid " +
                              own.ToString());
    }
    auto& row = graphs_[i].rows[own];
    auto relax = [&](Bundle x, double price) {
      const double cost = price - *own_price;
      auto [it, inserted] = row.try_emplace(x, Edge{cost, round});
      if (!inserted && cost < it->second.cost) it->second = Edge{cost, round};
    };
    relax(Bundle(), 0.0);
    for (const auto& [x, price] : prices[i]) relax(x, price);
  }
  ++round_count_;
}

std::pair<std::optional<RevealedPreferenceGraph::Potentials>,
          std::optional<GarpViolation>>
RevealedPreferenceGraph::Solve(int agent, double tolerance) const {
  const AgentGraph& graph = graphs_[static_cast<std::size_t>(agent)];
  Potentials pot;
  for (const auto& [bundle, row] : graph.rows) pot.nodes.push_back(bundle);
  const std::size_t n = pot.nodes.size();

  struct Arc {
    std::size_t from, to;
    double cost;
    int round;
  };
  std::vector<Arc> arcs;
  for (std::size_t u = 0; u < n; ++u) {
    const auto& row = graph.rows.at(pot.nodes[u]);
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v) continue;
      auto it = row.find(pot.nodes[v]);
      if (it == row.end()) {
        throw InvalidInputError(
            "agent " + std::to_string(agent) + ": no snapshot of a round "
            "bidding " + pot.nodes[u].ToString() + " prices " +
            pot.nodes[v].ToString());
      }
      arcs.push_back({u, v, it->second.cost, it->second.round});
    }
  }

  // Virtual source at distance zero to every node.
  pot.distance.assign(n, 0.0);
  std::vector<std::ptrdiff_t> pred(n, -1);
  std::vector<const Arc*> pred_arc(n, nullptr);
  std::vector<std::size_t> stamp(n, 0);
  const std::size_t max_passes = 4 * n * n + 16;
  for (std::size_t pass = 1; pass <= max_passes; ++pass) {
    bool changed = false;
    for (const Arc& a : arcs) {
      const double candidate = pot.distance[a.from] + a.cost;
      if (candidate < pot.distance[a.to] - tolerance) {
        pot.distance[a.to] = candidate;
        pred[a.to] = static_cast<std::ptrdiff_t>(a.from);
        pred_arc[a.to] = &a;
        changed = true;
      }
    }
    if (!changed) return {std::move(pot), std::nullopt};

    // A cycle in the predecessor graph is a negative cycle.
    std::fill(stamp.begin(), stamp.end(), 0);
    for (std::size_t start = 0; start < n; ++start) {
      std::size_t v = start;
      while (stamp[v] == 0 && pred[v] >= 0) {
        stamp[v] = start + 1;
        v = static_cast<std::size_t>(pred[v]);
      }
      if (stamp[v] != start + 1) continue;
      // v lies on a cycle; walk it backwards and reverse.
      std::vector<const Arc*> cycle;
      std::size_t u = v;
      do {
        cycle.push_back(pred_arc[u]);
        u = static_cast<std::size_t>(pred[u]);
      } while (u != v);
      std::reverse(cycle.begin(), cycle.end());
      double cost = 0.0;
      for (const Arc* a : cycle) cost += a->cost;
      if (cost >= -tolerance) continue;
      GarpViolation violation;
      violation.agent = agent;
      violation.agent_cycle_sum = cost;
      violation.joint_cycle_sum = std::numeric_limits<double>::quiet_NaN();
      for (const Arc* a : cycle) violation.rounds.push_back(a->round);
      return {std::nullopt, std::move(violation)};
    }
  }
  throw std::logic_error("Bellman-Ford failed to settle within its pass cap");
}

GarpResult RevealedPreferenceGraph::Check(double tolerance) const {
  for (int i = 0; i < agent_count_; ++i) {
    auto [potentials, violation] = Solve(i, tolerance);
    if (violation) return GarpResult{false, std::move(violation)};
  }
  return GarpResult{};
}

ValuationProfile RevealedPreferenceGraph::RecoverValuation(
    double tolerance) const {
  ValuationProfile v(agent_count_, item_count_);
  for (int i = 0; i < agent_count_; ++i) {
    auto [potentials, violation] = Solve(i, tolerance);
    if (violation) {
      throw PreconditionError(
          "cannot recover a valuation: agent " + std::to_string(i) +
          " violates GARP");
    }
    const AgentGraph& graph = graphs_[static_cast<std::size_t>(i)];
    std::map<Bundle, double> recovered;
    for (std::size_t u = 0; u < potentials->nodes.size(); ++u) {
      const double zeta = potentials->distance[u];
      for (const auto& [x, edge] : graph.rows.at(potentials->nodes[u])) {
        const double candidate = zeta + edge.cost;
        auto [it, inserted] = recovered.try_emplace(x, candidate);
        if (!inserted) it->second = std::min(it->second, candidate);
      }
    }
    if (recovered.empty()) continue;
    const double empty_value = recovered.at(Bundle());
    for (const auto& [x, value] : recovered) {
      if (!x.empty()) v.Set(i, x, value - empty_value);
    }
  }
  return v;
}

double AgentCycleSum(const History& history, int agent,
                     const std::vector<std::size_t>& entries) {
  double total = 0.0;
  const auto& rounds = history.rounds();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::size_t cur = entries[k];
    const std::size_t next = entries[(k + 1) % entries.size()];
    const Bundle own = rounds.at(cur).bids.bundles.at(agent);
    const Bundle other = rounds.at(next).bids.bundles.at(agent);
    const auto p_other = history.PriceAt(cur, agent, other);
    const auto p_own = history.PriceAt(cur, agent, own);
    if (!p_other || !p_own) return std::numeric_limits<double>::quiet_NaN();
    total += *p_other - *p_own;
  }
  return total;
}

double JointCycleSum(const History& history,
                     const std::vector<std::size_t>& entries) {
  double total = 0.0;
  for (int i = 0; i < history.agent_count(); ++i) {
    total += AgentCycleSum(history, i, entries);
  }
  return total;
}

namespace {

RevealedPreferenceGraph BuildGraph(const History& history) {
  RevealedPreferenceGraph graph(history.agent_count(), history.item_count());
  for (const HistoryRound& r : history.rounds()) {
    graph.AddRound(r.round, r.bids, r.prices);
  }
  return graph;
}

}  // namespace

GarpResult CheckGarp(const History& history, double tolerance) {
  GarpResult result = BuildGraph(history).Check(tolerance);
  if (result.violation) {
    const auto& rounds = history.rounds();
    std::vector<std::size_t> entries;
    for (int round : result.violation->rounds) {
      auto it = std::lower_bound(
          rounds.begin(), rounds.end(), round,
          [](const HistoryRound& r, int value) { return r.round < value; });
      entries.push_back(static_cast<std::size_t>(it - rounds.begin()));
    }
    result.violation->joint_cycle_sum = JointCycleSum(history, entries);
  }
  return result;
}

ValuationProfile RecoverValuation(const History& history, double tolerance) {
  return BuildGraph(history).RecoverValuation(tolerance);
}

}  // namespace clockforge

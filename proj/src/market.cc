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

#include "clockforge/market.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "clockforge/errors.h"

namespace clockforge {

ValuationProfile::ValuationProfile(int agent_count, int item_count)
    : item_count_(item_count) {
  if (agent_count < 1) throw InvalidInputError("agent count must be >= 1");
  if (item_count < 1 || item_count > kMaxItems) {
    throw InvalidInputError("item count out of range");
  }
  values_.resize(agent_count);
}

void ValuationProfile::Set(int agent, Bundle x, double value) {
  if (agent < 0 || agent >= agent_count()) {
    throw InvalidInputError("agent " + std::to_string(agent) +
                            " out of range");
  }
  if (!x.FitsIn(item_count_)) {
    throw InvalidInputError("bundle " + x.ToString() + " exceeds " +
                            std::to_string(item_count_) + " items");
  }
  if (!std::isfinite(value)) {
    throw InvalidInputError("valuation entries must be finite");
  }
  if (x.empty()) {
    if (value != 0.0) {
      throw InvalidInputError("the empty bundle is worth zero to every agent");
    }
    return;
  }
  values_[agent][x.mask] = value;
}

double ValuationProfile::Value(int agent, Bundle x) const {
  const auto& table = values_.at(agent);
  auto it = table.find(x.mask);
  return it == table.end() ? 0.0 : it->second;
}

double ValuationProfile::MaxAbs() const {
  double out = 0.0;
  for (const auto& table : values_) {
    for (const auto& [mask, value] : table) {
      out = std::max(out, std::abs(value));
    }
  }
  return out;
}

std::size_t ValuationProfile::entry_count() const {
  std::size_t total = 0;
  for (const auto& table : values_) total += table.size();
  return total;
}

std::vector<std::pair<Bundle, double>> ValuationProfile::Entries(
    int agent) const {
  std::vector<std::pair<Bundle, double>> out;
  for (const auto& [mask, value] : values_.at(agent)) {
    out.emplace_back(Bundle(mask), value);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

bool IsFeasibleAllocation(std::span<const Bundle> bundles) {
  std::uint32_t used = 0;
  for (Bundle b : bundles) {
    if (b.mask & used) return false;
    used |= b.mask;
  }
  return true;
}

bool SameBundles(const BidVector& b, const AllocationVector& q) {
  return b.bundles == q.bundles;
}

BundleMatrix PriceMatrix(const FeatureMap& fm, const PriceParams& w) {
  fm.CheckParams(w.size());
  const auto& bundles = fm.bundles();
  BundleMatrix out(fm.agent_count(), bundles.size());
  for (int i = 0; i < fm.agent_count(); ++i) {
    if (i > 0 && !fm.personalized()) {
      for (std::size_t k = 0; k < bundles.size(); ++k) out(i, k) = out(0, k);
      continue;
    }
    for (std::size_t k = 0; k < bundles.size(); ++k) {
      out(i, k) = fm.PriceOf(w, i, bundles[k]);
    }
  }
  return out;
}

BundleMatrix PriceMatrix(const FeatureMap& fm, const PriceOracle& prices) {
  const auto& bundles = fm.bundles();
  BundleMatrix out(fm.agent_count(), bundles.size());
  for (int i = 0; i < fm.agent_count(); ++i) {
    for (std::size_t k = 0; k < bundles.size(); ++k) {
      out(i, k) = prices(i, bundles[k]);
    }
  }
  return out;
}

BundleMatrix ValueMatrix(const FeatureMap& fm, const ValuationProfile& v) {
  if (v.agent_count() != fm.agent_count() ||
      v.item_count() != fm.item_count()) {
    throw InvalidInputError("valuation profile shape does not match the market");
  }
  const auto& bundles = fm.bundles();
  BundleMatrix out(fm.agent_count(), bundles.size());
  for (int i = 0; i < fm.agent_count(); ++i) {
    for (std::size_t k = 0; k < bundles.size(); ++k) {
      out(i, k) = v.Value(i, bundles[k]);
    }
  }
  return out;
}

ValuationProfile ValuationFromMatrix(const FeatureMap& fm,
                                     const BundleMatrix& values) {
  ValuationProfile v(fm.agent_count(), fm.item_count());
  const auto& bundles = fm.bundles();
  for (int i = 0; i < fm.agent_count(); ++i) {
    for (std::size_t k = 0; k < bundles.size(); ++k) {
      if (values(i, k) != 0.0) v.Set(i, bundles[k], values(i, k));
    }
  }
  return v;
}

DemandResult BestResponse(const FeatureMap& fm, const BundleMatrix& values,
                          const BundleMatrix& prices) {
  const auto& bundles = fm.bundles();
  const std::size_t n = static_cast<std::size_t>(fm.agent_count());
  if (values.agents() != n || prices.agents() != n ||
      values.bundles() != bundles.size() ||
      prices.bundles() != bundles.size()) {
    throw InvalidInputError("value/price matrix shape does not match X");
  }
  DemandResult out;
  out.bids.bundles.assign(n, Bundle());
  for (std::size_t i = 0; i < n; ++i) {
    // The empty bundle has surplus 0 and the smallest mask, so it wins ties.
    double best = 0.0;
    Bundle choice;
    for (std::size_t k = 0; k < bundles.size(); ++k) {
      const double surplus = values(i, k) - prices(i, k);
      if (surplus > best ||
          (surplus == best && !choice.empty() && bundles[k] < choice)) {
        best = surplus;
        choice = bundles[k];
      }
    }
    out.bids.bundles[i] = choice;
    out.utility += best;
  }
  return out;
}

DemandResult DemandResponse(const FeatureMap& fm, const PriceParams& w,
                            const ValuationProfile& v) {
  return BestResponse(fm, ValueMatrix(fm, v), PriceMatrix(fm, w));
}

namespace {

void CheckCapacity(const FeatureMap& fm, int max_items) {
  if (fm.item_count() > max_items) {
    throw CapacityError("exact winner determination is capped at " +
                        std::to_string(max_items) + " items, instance has " +
                        std::to_string(fm.item_count()));
  }
}

struct Candidate {
  Bundle bundle;
  double weight;
};

bool StrictlyAbove(double value, double reference) {
  if (!std::isfinite(reference)) return value > reference;
  return value > reference + 1e-12 * std::max(1.0, std::abs(reference));
}

// Depth-first branch and bound over agents. Each agent tries the empty
// bundle first and then its positive-weight bundles in ascending mask order,
// and the incumbent is replaced only on strict improvement, so the first
// optimum found is the lexicographically smallest one.
class BranchAndBound {
 public:
  BranchAndBound(const FeatureMap& fm, const BundleMatrix& weights)
      : n_(fm.agent_count()) {
    by_mask_.resize(n_);
    by_weight_.resize(n_);
    const auto& bundles = fm.bundles();
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t k = 0; k < bundles.size(); ++k) {
        if (weights(i, k) > 0.0) {
          by_mask_[i].push_back({bundles[k], weights(i, k)});
        }
      }
      by_weight_[i] = by_mask_[i];
      std::sort(by_mask_[i].begin(), by_mask_[i].end(),
                [](const Candidate& a, const Candidate& b) {
                  return a.bundle < b.bundle;
                });
      std::stable_sort(by_weight_[i].begin(), by_weight_[i].end(),
                       [](const Candidate& a, const Candidate& b) {
                         return a.weight > b.weight;
                       });
    }
    current_.assign(n_, Bundle());
  }

  SupplyResult Solve() {
    best_value_ = -std::numeric_limits<double>::infinity();
    Search(0, 0u, 0.0);
    return {AllocationVector{best_}, best_value_};
  }

 private:
  double Bound(std::size_t from, std::uint32_t used) const {
    double total = 0.0;
    for (std::size_t j = from; j < n_; ++j) {
      for (const Candidate& c : by_weight_[j]) {
        if ((c.bundle.mask & used) == 0) {
          total += c.weight;
          break;
        }
      }
    }
    return total;
  }

  void Search(std::size_t agent, std::uint32_t used, double value) {
    if (agent == n_) {
      if (StrictlyAbove(value, best_value_)) {
        best_value_ = value;
        best_ = current_;
      }
      return;
    }
    if (std::isfinite(best_value_) &&
        !StrictlyAbove(value + Bound(agent, used), best_value_)) {
      return;
    }
    current_[agent] = Bundle();
    Search(agent + 1, used, value);
    for (const Candidate& c : by_mask_[agent]) {
      if (c.bundle.mask & used) continue;
      current_[agent] = c.bundle;
      Search(agent + 1, used | c.bundle.mask, value + c.weight);
    }
    current_[agent] = Bundle();
  }

  std::size_t n_;
  std::vector<std::vector<Candidate>> by_mask_;
  std::vector<std::vector<Candidate>> by_weight_;
  std::vector<Bundle> current_;
  std::vector<Bundle> best_;
  double best_value_ = 0.0;
};

}  // namespace

SupplyResult WinnerDetermination(const FeatureMap& fm,
                                 const BundleMatrix& weights, int max_items) {
  CheckCapacity(fm, max_items);
  if (weights.agents() != static_cast<std::size_t>(fm.agent_count()) ||
      weights.bundles() != fm.bundles().size()) {
    throw InvalidInputError("weight matrix shape does not match X");
  }
  return BranchAndBound(fm, weights).Solve();
}

std::vector<AllocationVector> OptimalAssignments(const FeatureMap& fm,
                                                 const BundleMatrix& weights,
                                                 double tolerance,
                                                 std::size_t limit,
                                                 int max_items) {
  const double optimum = WinnerDetermination(fm, weights, max_items).value;
  const auto& bundles = fm.bundles();
  const std::size_t n = static_cast<std::size_t>(fm.agent_count());
  // Optimistic completion bound per suffix of agents, ignoring overlaps.
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t j = n; j-- > 0;) {
    double best = 0.0;
    for (std::size_t k = 0; k < bundles.size(); ++k) {
      best = std::max(best, weights(j, k));
    }
    suffix[j] = suffix[j + 1] + best;
  }
  std::vector<std::size_t> order(bundles.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return bundles[a] < bundles[b];
  });

  std::vector<AllocationVector> out;
  std::vector<Bundle> current(n);
  auto search = [&](auto&& self, std::size_t agent, std::uint32_t used,
                    double value) -> void {
    if (value + suffix[agent] < optimum - tolerance) return;
    if (agent == n) {
      if (out.size() >= limit) {
        throw CapacityError("more than " + std::to_string(limit) +
                            " optimal assignments");
      }
      out.push_back(AllocationVector{current});
      return;
    }
    current[agent] = Bundle();
    self(self, agent + 1, used, value);
    for (std::size_t k : order) {
      if (bundles[k].mask & used) continue;
      current[agent] = bundles[k];
      self(self, agent + 1, used | bundles[k].mask, value + weights(agent, k));
    }
    current[agent] = Bundle();
  };
  search(search, 0, 0u, 0.0);
  return out;
}

SupplyResult SupplyResponse(const FeatureMap& fm, const PriceParams& w,
                            int max_items) {
  CheckCapacity(fm, max_items);
  return WinnerDetermination(fm, PriceMatrix(fm, w), max_items);
}

SupplyResult EfficientAllocation(const FeatureMap& fm,
                                 const ValuationProfile& v, int max_items) {
  CheckCapacity(fm, max_items);
  return WinnerDetermination(fm, ValueMatrix(fm, v), max_items);
}

double Objective(const FeatureMap& fm, const PriceParams& w,
                 const BundleMatrix& values, double lambda, int max_items) {
  if (lambda < 0.0) throw InvalidInputError("lambda must be >= 0");
  const BundleMatrix prices = PriceMatrix(fm, w);
  const double u = BestResponse(fm, values, prices).utility;
  const double s = WinnerDetermination(fm, prices, max_items).value;
  const double norm = Norm2(w);
  return u + s + 0.5 * lambda * norm * norm;
}

double Objective(const FeatureMap& fm, const PriceParams& w,
                 const ValuationProfile& v, double lambda, int max_items) {
  return Objective(fm, w, ValueMatrix(fm, v), lambda, max_items);
}

PriceParams Subgradient(const FeatureMap& fm, const PriceParams& w,
                        const BidVector& b, const AllocationVector& q,
                        double lambda) {
  fm.CheckParams(w.size());
  const std::size_t n = static_cast<std::size_t>(fm.agent_count());
  if (b.bundles.size() != n || q.bundles.size() != n) {
    throw InvalidInputError("bid/allocation vectors need one entry per agent");
  }
  PriceParams g(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) g[k] = lambda * w[k];
  for (std::size_t i = 0; i < n; ++i) {
    fm.Accumulate(static_cast<int>(i), q.bundles[i], 1.0, g);
    fm.Accumulate(static_cast<int>(i), b.bundles[i], -1.0, g);
  }
  return g;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInputError("dot: size mismatch");
  double total = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) total += a[k] * b[k];
  return total;
}

double Norm2(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

double NormInf(std::span<const double> a) {
  double out = 0.0;
  for (double x : a) out = std::max(out, std::abs(x));
  return out;
}

}  // namespace clockforge

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

// Economic oracles: agent demand, seller supply (exact winner determination),
// indirect utilities, the pricing objective and its subgradients.

#ifndef CLOCKFORGE_MARKET_H_
#define CLOCKFORGE_MARKET_H_

#include <cstddef>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "clockforge/bundle.h"
#include "clockforge/encodings.h"

namespace clockforge {

inline constexpr int kDefaultMaxExactItems = 12;

// Values v_i(x). Unspecified (agent, bundle) pairs are worth zero, as is the
// empty bundle.
class ValuationProfile {
 public:
  ValuationProfile(int agent_count, int item_count);

  int agent_count() const { return static_cast<int>(values_.size()); }
  int item_count() const { return item_count_; }

  void Set(int agent, Bundle x, double value);
  double Value(int agent, Bundle x) const;
  // ||v||_inf over the stored entries.
  double MaxAbs() const;
  std::size_t entry_count() const;

  // Explicit (bundle, value) pairs of one agent, sorted by mask.
  std::vector<std::pair<Bundle, double>> Entries(int agent) const;

 private:
  int item_count_;
  std::vector<std::unordered_map<std::uint32_t, double>> values_;
};

// Row i, column k holds a scalar for (agent i, X[k]): values or prices over
// the choice set.
class BundleMatrix {
 public:
  BundleMatrix() = default;
  BundleMatrix(std::size_t agents, std::size_t bundles, double fill = 0.0)
      : agents_(agents), bundles_(bundles), data_(agents * bundles, fill) {}

  std::size_t agents() const { return agents_; }
  std::size_t bundles() const { return bundles_; }
  double& operator()(std::size_t agent, std::size_t k) {
    return data_[agent * bundles_ + k];
  }
  double operator()(std::size_t agent, std::size_t k) const {
    return data_[agent * bundles_ + k];
  }
  std::span<const double> row(std::size_t agent) const {
    return {data_.data() + agent * bundles_, bundles_};
  }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

 private:
  std::size_t agents_ = 0;
  std::size_t bundles_ = 0;
  std::vector<double> data_;
};

// One bundle per agent; the empty bundle means "nothing". Bundles may
// overlap across agents.
struct BidVector {
  std::vector<Bundle> bundles;
  friend bool operator==(const BidVector&, const BidVector&) = default;
};

// One bundle per agent, pairwise item-disjoint.
struct AllocationVector {
  std::vector<Bundle> bundles;
  friend bool operator==(const AllocationVector&,
                         const AllocationVector&) = default;
};

bool IsFeasibleAllocation(std::span<const Bundle> bundles);
bool SameBundles(const BidVector& b, const AllocationVector& q);

// (agent, bundle) -> price. Must be total on X and the empty bundle.
using PriceOracle = std::function<double(int agent, Bundle x)>;

struct DemandResult {
  BidVector bids;
  double utility = 0.0;  // u(p; v), the sum of per-agent maximal surplus
};

struct SupplyResult {
  AllocationVector allocation;
  double value = 0.0;  // s(p) for supply, welfare for efficient allocation
};

BundleMatrix PriceMatrix(const FeatureMap& fm, const PriceParams& w);
BundleMatrix PriceMatrix(const FeatureMap& fm, const PriceOracle& prices);
BundleMatrix ValueMatrix(const FeatureMap& fm, const ValuationProfile& v);
ValuationProfile ValuationFromMatrix(const FeatureMap& fm,
                                     const BundleMatrix& values);

// Per agent, a surplus-maximizing bundle over X and the empty bundle. Ties
// resolve to the smallest mask; any tie with the empty bundle resolves to it.
DemandResult BestResponse(const FeatureMap& fm, const BundleMatrix& values,
                          const BundleMatrix& prices);
DemandResult DemandResponse(const FeatureMap& fm, const PriceParams& w,
                            const ValuationProfile& v);

// Exact maximum-weight item-disjoint assignment of at most one bundle of X
// per agent. Among optimal assignments returns the lexicographically
// smallest under agent-then-mask order. Throws CapacityError above
// max_items.
SupplyResult WinnerDetermination(const FeatureMap& fm,
                                 const BundleMatrix& weights,
                                 int max_items = kDefaultMaxExactItems);

// Every feasible assignment whose weight is within `tolerance` of the
// optimum, in lexicographic order. Throws CapacityError past `limit`
// assignments.
std::vector<AllocationVector> OptimalAssignments(
    const FeatureMap& fm, const BundleMatrix& weights, double tolerance,
    std::size_t limit = 1'000'000, int max_items = kDefaultMaxExactItems);

SupplyResult SupplyResponse(const FeatureMap& fm, const PriceParams& w,
                            int max_items = kDefaultMaxExactItems);
SupplyResult EfficientAllocation(const FeatureMap& fm,
                                 const ValuationProfile& v,
                                 int max_items = kDefaultMaxExactItems);

// u(Gw; v) + s(Gw) + (lambda / 2) ||w||^2.
double Objective(const FeatureMap& fm, const PriceParams& w,
                 const ValuationProfile& v, double lambda,
                 int max_items = kDefaultMaxExactItems);
double Objective(const FeatureMap& fm, const PriceParams& w,
                 const BundleMatrix& values, double lambda,
                 int max_items = kDefaultMaxExactItems);

// G^T (q - b) + lambda w.
PriceParams Subgradient(const FeatureMap& fm, const PriceParams& w,
                        const BidVector& b, const AllocationVector& q,
                        double lambda);

double Dot(std::span<const double> a, std::span<const double> b);
double Norm2(std::span<const double> a);
double NormInf(std::span<const double> a);

}  // namespace clockforge

#endif  // CLOCKFORGE_MARKET_H_

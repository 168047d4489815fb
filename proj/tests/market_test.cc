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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "clockforge/errors.h"
#include "oracles.h"

namespace clockforge {
namespace {

using testing::BruteObjective;
using testing::BruteSupply;
using testing::DensePrice;
using testing::RandomParams;
using testing::RandomValuation;

std::vector<FeatureMap> SmallMarkets(int m, int n) {
  std::vector<FeatureMap> maps = {FeatureMap::Linear(m, n),
                                  FeatureMap::Linear(m, n, true),
                                  FeatureMap::BundleIdentity(m, n),
                                  FeatureMap::BundleIdentity(m, n, true)};
  if (m >= 2) maps.push_back(FeatureMap::Polynomial(m, n, 2));
  return maps;
}

TEST(ValuationProfileTest, RejectsBadEntries) {
  ValuationProfile v(2, 3);
  EXPECT_THROW(v.Set(2, Bundle(1), 1.0), InvalidInputError);
  EXPECT_THROW(v.Set(0, Bundle(8), 1.0), InvalidInputError);
  EXPECT_THROW(v.Set(0, Bundle(1), std::nan("")), InvalidInputError);
  EXPECT_THROW(v.Set(0, Bundle(), 1.0), InvalidInputError);
  v.Set(1, Bundle(3), -4.0);
  EXPECT_DOUBLE_EQ(v.Value(1, Bundle(3)), -4.0);
  EXPECT_DOUBLE_EQ(v.Value(0, Bundle(3)), 0.0);
  EXPECT_DOUBLE_EQ(v.MaxAbs(), 4.0);
}

TEST(FeasibilityTest, DisjointBundles) {
  const std::vector<Bundle> ok = {Bundle(1), Bundle(6), Bundle()};
  const std::vector<Bundle> clash = {Bundle(3), Bundle(2)};
  EXPECT_TRUE(IsFeasibleAllocation(ok));
  EXPECT_FALSE(IsFeasibleAllocation(clash));
}

TEST(DemandTest, PicksSurplusMaximizingBundle) {
  const FeatureMap fm = FeatureMap::Linear(2, 1);
  ValuationProfile v(1, 2);
  v.Set(0, Bundle(1), 3.0);
  v.Set(0, Bundle(2), 1.0);
  v.Set(0, Bundle(3), 5.0);
  const DemandResult d = DemandResponse(fm, {1.0, 1.0}, v);
  EXPECT_EQ(d.bids.bundles, std::vector<Bundle>{Bundle(3)});
  EXPECT_DOUBLE_EQ(d.utility, 3.0);
  // All surpluses negative: the empty bundle wins.
  const DemandResult none = DemandResponse(fm, {9.0, 9.0}, v);
  EXPECT_TRUE(none.bids.bundles[0].empty());
  EXPECT_DOUBLE_EQ(none.utility, 0.0);
}

TEST(DemandTest, UtilityMatchesBruteForce) {
  std::mt19937_64 rng(1);
  for (int m = 1; m <= 4; ++m) {
    for (const FeatureMap& fm : SmallMarkets(m, 3)) {
      for (int trial = 0; trial < 5; ++trial) {
        const ValuationProfile v = RandomValuation(fm, rng, -5, 10);
        const PriceParams w = RandomParams(fm.dimension(), rng, -2, 4);
        const DemandResult d = DemandResponse(fm, w, v);
        const double brute = testing::BruteUtility(
            fm, [&](int i, Bundle x) { return v.Value(i, x); },
            [&](int i, Bundle x) { return DensePrice(fm, w, i, x); });
        EXPECT_NEAR(d.utility, brute, 1e-9) << fm.Describe();
        double realized = 0.0;
        for (int i = 0; i < 3; ++i) {
          const Bundle b = d.bids.bundles[static_cast<std::size_t>(i)];
          if (!b.empty()) realized += v.Value(i, b) - fm.PriceOf(w, i, b);
        }
        EXPECT_NEAR(realized, d.utility, 1e-9);
      }
    }
  }
}

TEST(SupplyTest, HandExample) {
  // Two agents, two items, prices favour splitting a and b.
  const FeatureMap fm = FeatureMap::BundleIdentity(2, 2, true);
  // Agent 0: {a}=3 {b}=0 {ab}=4; agent 1: {a}=0 {b}=2 {ab}=1.
  const PriceParams w = {3, 0, 4, 0, 2, 1};
  const SupplyResult s = SupplyResponse(fm, w);
  EXPECT_DOUBLE_EQ(s.value, 5.0);
  EXPECT_EQ(s.allocation.bundles, (std::vector<Bundle>{Bundle(1), Bundle(2)}));
}

TEST(SupplyTest, MatchesBruteForceUpToSixItemsFourAgents) {
  std::mt19937_64 rng(2);
  for (int m = 1; m <= 6; ++m) {
    for (int n = 1; n <= 4; ++n) {
      if (m >= 5 && n >= 4) continue;  // brute force gets slow
      std::vector<FeatureMap> maps = {FeatureMap::Linear(m, n, true),
                                      FeatureMap::BundleIdentity(m, n, true)};
      for (const FeatureMap& fm : maps) {
        const PriceParams w = RandomParams(fm.dimension(), rng, -3, 5);
        const SupplyResult s = SupplyResponse(fm, w);
        const double brute = BruteSupply(
            fm, [&](int i, Bundle x) { return DensePrice(fm, w, i, x); });
        EXPECT_NEAR(s.value, brute, 1e-9) << fm.Describe();
        EXPECT_TRUE(IsFeasibleAllocation(s.allocation.bundles));
        double realized = 0.0;
        for (int i = 0; i < n; ++i) {
          const Bundle q = s.allocation.bundles[static_cast<std::size_t>(i)];
          if (!q.empty()) realized += fm.PriceOf(w, i, q);
        }
        EXPECT_NEAR(realized, s.value, 1e-9);
      }
    }
  }
}

TEST(SupplyTest, CapacityGuard) {
  const FeatureMap fm = FeatureMap::Linear(13, 1);
  EXPECT_THROW(SupplyResponse(fm, PriceParams(13, 1.0)), CapacityError);
  const FeatureMap small = FeatureMap::Linear(4, 1);
  EXPECT_THROW(SupplyResponse(small, PriceParams(4, 1.0), 3), CapacityError);
}

TEST(SupplyTest, OptimalAssignmentsEnumeratesTies) {
  const FeatureMap fm = FeatureMap::Linear(1, 2);
  // Both agents value the single item equally.
  BundleMatrix weights(2, 1, 1.0);
  const auto all = OptimalAssignments(fm, weights, 1e-9);
  EXPECT_EQ(all.size(), 2u);
  for (const auto& q : all) EXPECT_TRUE(IsFeasibleAllocation(q.bundles));
}

TEST(ObjectiveTest, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int m = 1; m <= 4; ++m) {
    for (const FeatureMap& fm : SmallMarkets(m, 2)) {
      for (double lambda : {0.0, 0.3}) {
        const ValuationProfile v = RandomValuation(fm, rng, 0, 8);
        const PriceParams w = RandomParams(fm.dimension(), rng, -2, 3);
        EXPECT_NEAR(Objective(fm, w, v, lambda),
                    BruteObjective(fm, w, v, lambda), 1e-9)
            << fm.Describe();
      }
    }
  }
}

TEST(ObjectiveTest, ConvexAlongRandomSegments) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const FeatureMap fm = FeatureMap::Polynomial(3, 2, 2);
  const ValuationProfile v = RandomValuation(fm, rng, 0, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const PriceParams a = RandomParams(fm.dimension(), rng, -5, 5);
    const PriceParams b = RandomParams(fm.dimension(), rng, -5, 5);
    const double theta = unit(rng);
    PriceParams mid(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      mid[k] = theta * a[k] + (1 - theta) * b[k];
    }
    const double lhs = Objective(fm, mid, v, 0.1);
    const double rhs = theta * Objective(fm, a, v, 0.1) +
                       (1 - theta) * Objective(fm, b, v, 0.1);
    EXPECT_LE(lhs, rhs + 1e-9);
  }
}

TEST(SubgradientTest, SatisfiesSubgradientInequality) {
  std::mt19937_64 rng(5);
  for (const FeatureMap& fm :
       {FeatureMap::Linear(3, 2), FeatureMap::BundleIdentity(3, 2, true),
        FeatureMap::Polynomial(3, 3, 2)}) {
    const ValuationProfile v = RandomValuation(fm, rng, 0, 10);
    for (double lambda : {0.0, 0.2}) {
      for (int trial = 0; trial < 50; ++trial) {
        const PriceParams w = RandomParams(fm.dimension(), rng, -3, 6);
        const DemandResult d = DemandResponse(fm, w, v);
        const SupplyResult s = SupplyResponse(fm, w);
        const PriceParams g =
            Subgradient(fm, w, d.bids, s.allocation, lambda);
        const double fw = Objective(fm, w, v, lambda);
        for (int probe = 0; probe < 10; ++probe) {
          const PriceParams u = RandomParams(fm.dimension(), rng, -3, 6);
          double inner = 0.0;
          for (std::size_t k = 0; k < w.size(); ++k) {
            inner += g[k] * (u[k] - w[k]);
          }
          EXPECT_GE(Objective(fm, u, v, lambda), fw + inner - 1e-9);
        }
      }
    }
  }
}

TEST(SubgradientTest, HandExample) {
  const FeatureMap fm = FeatureMap::Linear(2, 1);
  // G^T(q - b) + lambda w with b = {a}, q = {a,b}.
  const PriceParams g = Subgradient(fm, {1.0, 2.0}, BidVector{{Bundle(1)}},
                                    AllocationVector{{Bundle(3)}}, 0.5);
  EXPECT_DOUBLE_EQ(g[0], 0.5);
  EXPECT_DOUBLE_EQ(g[1], 2.0);
  EXPECT_THROW(Subgradient(fm, {1.0, 2.0}, BidVector{}, AllocationVector{},
                           0.0),
               InvalidInputError);
}

TEST(NormTest, Basics) {
  const std::vector<double> a = {3.0, -4.0};
  EXPECT_DOUBLE_EQ(Norm2(a), 5.0);
  EXPECT_DOUBLE_EQ(NormInf(a), 4.0);
  EXPECT_DOUBLE_EQ(Dot(a, a), 25.0);
}

}  // namespace
}  // namespace clockforge

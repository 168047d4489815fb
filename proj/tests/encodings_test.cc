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


#include "clockforge/encodings.h"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "clockforge/bundle.h"
#include "oracles.h"

namespace clockforge {
namespace {

std::vector<double> Dense(const FeatureMap& fm, int agent, Bundle x) {
  std::vector<double> row(fm.dimension(), 0.0);
  for (std::uint32_t k : fm.Encode(agent, x)) row[k] = 1.0;
  return row;
}

TEST(BundleTest, GradedLexOrder) {
  const auto xs = GradedLexBundles(3, 3);
  std::vector<std::string> names;
  for (Bundle b : xs) names.push_back(b.ToString());
  EXPECT_EQ(names, (std::vector<std::string>{"{0}", "{1}", "{2}", "{0,1}",
                                             "{0,2}", "{1,2}", "{0,1,2}"}));
  EXPECT_EQ(GradedLexBundles(4, 2).size(), 10u);
  EXPECT_EQ(Bundle::FromItems({2, 0}).mask, 5u);
  EXPECT_TRUE(Bundle(3).FitsIn(2));
  EXPECT_FALSE(Bundle(4).FitsIn(2));
}

TEST(EncodeTest, LinearExample) {
  const FeatureMap fm = FeatureMap::Linear(3, 1);
  EXPECT_EQ(Dense(fm, 0, Bundle::FromItems({0, 1})),
            (std::vector<double>{1, 1, 0}));
}

TEST(EncodeTest, PolynomialDegreeTwoExample) {
  const FeatureMap fm = FeatureMap::Polynomial(3, 1, 2);
  ASSERT_EQ(fm.dimension(), 6u);
  EXPECT_EQ(Dense(fm, 0, Bundle(7)), std::vector<double>(6, 1.0));
  // Feature order a, b, c, ab, ac, bc.
  EXPECT_EQ(Dense(fm, 0, Bundle::FromItems({0, 2})),
            (std::vector<double>{1, 0, 1, 0, 1, 0}));
}

TEST(EncodeTest, EmptyBundleIsZeroForEveryScheme) {
  for (int m = 1; m <= 12; ++m) {
    const std::vector<FeatureMap> maps = {
        FeatureMap::Linear(m, 2), FeatureMap::Polynomial(m, 2, std::min(m, 2)),
        FeatureMap::BundleIdentity(std::min(m, 6), 2, true)};
    for (const FeatureMap& fm : maps) {
      for (int i = 0; i < 2; ++i) EXPECT_TRUE(fm.Encode(i, Bundle()).empty());
    }
  }
}

TEST(EncodeTest, DimensionsMatchDefinitions) {
  EXPECT_EQ(FeatureMap::Linear(5, 3).dimension(), 5u);
  EXPECT_EQ(FeatureMap::Polynomial(5, 3, 2).dimension(), 15u);
  EXPECT_EQ(FeatureMap::Polynomial(4, 1, 4).dimension(), 15u);
  EXPECT_EQ(FeatureMap::BundleIdentity(3, 2).dimension(), 7u);
  EXPECT_EQ(FeatureMap::BundleIdentity(3, 2, true).dimension(), 14u);
  EXPECT_EQ(FeatureMap::Polynomial(3, 4, 2, true).dimension(), 24u);
}

TEST(EncodeTest, MatchesDenseOracleExhaustively) {
  for (int m = 1; m <= 5; ++m) {
    std::vector<FeatureMap> maps = {FeatureMap::Linear(m, 2),
                                    FeatureMap::BundleIdentity(m, 2),
                                    FeatureMap::BundleIdentity(m, 2, true)};
    for (int r = 1; r <= m; ++r) {
      maps.push_back(FeatureMap::Polynomial(m, 2, r));
      maps.push_back(FeatureMap::Polynomial(m, 2, r, true));
    }
    for (const FeatureMap& fm : maps) {
      for (int i = 0; i < 2; ++i) {
        for (Bundle x : fm.bundles()) {
          EXPECT_EQ(Dense(fm, i, x), testing::DenseRow(fm, i, x))
              << fm.Describe() << " " << x.ToString();
        }
      }
    }
  }
}

TEST(EncodeTest, PolynomialOneEqualsLinear) {
  for (int m = 1; m <= 8; ++m) {
    const FeatureMap lin = FeatureMap::Linear(m, 1);
    const FeatureMap poly = FeatureMap::Polynomial(m, 1, 1);
    for (Bundle x : lin.bundles()) {
      EXPECT_EQ(lin.Encode(0, x), poly.Encode(0, x));
    }
  }
}

TEST(EncodeTest, PersonalizedSupportsAreDisjoint) {
  const FeatureMap fm = FeatureMap::Polynomial(3, 3, 2, true);
  for (Bundle x : fm.bundles()) {
    for (Bundle y : fm.bundles()) {
      const auto a = fm.Encode(0, x);
      const auto b = fm.Encode(2, y);
      for (auto k : a) {
        EXPECT_EQ(std::count(b.begin(), b.end(), k), 0);
      }
    }
  }
}

TEST(EncodeTest, RowNormsWithinGNormBound) {
  for (int m = 1; m <= 6; ++m) {
    std::vector<FeatureMap> maps = {FeatureMap::Linear(m, 2),
                                    FeatureMap::BundleIdentity(m, 2, true)};
    for (int r = 1; r <= m; ++r) maps.push_back(FeatureMap::Polynomial(m, 2, r));
    for (const FeatureMap& fm : maps) {
      for (Bundle x : fm.bundles()) {
        EXPECT_LE(std::sqrt(fm.Encode(1, x).size()), fm.GNorm2Inf() + 1e-12);
      }
    }
  }
}

TEST(EncodeTest, RejectsBadRows) {
  const FeatureMap fm = FeatureMap::Linear(3, 2);
  EXPECT_THROW(fm.Encode(2, Bundle(1)), InvalidInputError);
  EXPECT_THROW(fm.Encode(0, Bundle(8)), InvalidInputError);
  const FeatureMap restricted =
      FeatureMap::BundleIdentity(3, 1, false, {Bundle(3)});
  EXPECT_THROW(restricted.Encode(0, Bundle(1)), InvalidInputError);
  EXPECT_THROW(FeatureMap::Polynomial(3, 1, 0), InvalidInputError);
  EXPECT_THROW(FeatureMap::Polynomial(3, 1, 4), InvalidInputError);
}

TEST(PriceOfTest, Examples) {
  const FeatureMap lin = FeatureMap::Linear(3, 1);
  EXPECT_DOUBLE_EQ(lin.PriceOf({2, 3, 5}, 0, Bundle::FromItems({0, 2})), 7.0);
  EXPECT_DOUBLE_EQ(lin.PriceOf({2, 3, 5}, 0, Bundle()), 0.0);
  const FeatureMap id = FeatureMap::BundleIdentity(2, 1);
  // X = {a}, {b}, {ab}.
  EXPECT_DOUBLE_EQ(id.PriceOf({0, 0, 4}, 0, Bundle(3)), 4.0);
  EXPECT_THROW(lin.PriceOf({1, 2}, 0, Bundle(1)), InvalidInputError);
}

TEST(PriceOfTest, MatchesDenseDotProduct) {
  std::mt19937_64 rng(3);
  const FeatureMap fm = FeatureMap::Polynomial(4, 2, 3, true);
  for (int trial = 0; trial < 20; ++trial) {
    const PriceParams w = testing::RandomParams(fm.dimension(), rng, -5, 5);
    for (int i = 0; i < 2; ++i) {
      for (Bundle x : fm.bundles()) {
        EXPECT_NEAR(fm.PriceOf(w, i, x), testing::DensePrice(fm, w, i, x),
                    1e-12);
      }
    }
  }
}

TEST(GNormTest, Examples) {
  EXPECT_DOUBLE_EQ(FeatureMap::BundleIdentity(3, 2).GNorm2Inf(), 1.0);
  EXPECT_DOUBLE_EQ(FeatureMap::Polynomial(4, 2, 2).GNorm2Inf(), 4.0);
  EXPECT_DOUBLE_EQ(FeatureMap::Linear(9, 1).GNorm2Inf(), 3.0);
  EXPECT_DOUBLE_EQ(FeatureMap::Linear(9, 3, true).GNorm2Inf(), 3.0);
}

TEST(MobiusTest, ZeroPricesGiveZeroParams) {
  const FeatureMap fm = FeatureMap::Polynomial(3, 1, 2);
  std::map<Bundle, long long> p;
  for (Bundle x : GradedLexBundles(3, 2)) p[x] = 0;
  for (long long w : MobiusInvert(fm, p)) EXPECT_EQ(w, 0);
}

TEST(MobiusTest, HandExample) {
  const FeatureMap fm = FeatureMap::Polynomial(2, 1, 2);
  const std::map<Bundle, long long> p = {
      {Bundle(1), 1}, {Bundle(2), 1}, {Bundle(3), 3}};
  EXPECT_EQ(MobiusInvert(fm, p), (std::vector<long long>{1, 1, 1}));
}

TEST(MobiusTest, RandomIntegerRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long long> d(-50, 50);
  const FeatureMap fm = FeatureMap::Polynomial(3, 1, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::map<Bundle, long long> p;
    for (Bundle x : fm.bundles()) p[x] = d(rng);
    const std::vector<long long> w = MobiusInvert(fm, p);
    for (Bundle x : fm.bundles()) {
      EXPECT_EQ(fm.PriceOf<long long>(w, 0, x), p[x]);
    }
  }
}

TEST(MobiusTest, MissingPriceAndWrongSchemeThrow) {
  const FeatureMap fm = FeatureMap::Polynomial(2, 1, 2);
  EXPECT_THROW(MobiusInvert(fm, std::map<Bundle, long long>{{Bundle(1), 1}}),
               InvalidInputError);
  EXPECT_THROW(MobiusInvert(FeatureMap::BundleIdentity(2, 1),
                            std::map<Bundle, long long>{}),
               InvalidInputError);
}

}  // namespace
}  // namespace clockforge

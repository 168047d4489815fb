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


#include "clockforge/verify.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "clockforge/auction.h"
#include "clockforge/errors.h"
#include "oracles.h"

namespace clockforge {
namespace {

AuctionResult RunFor(const FeatureMap& fm, BidderModel& bidder, int rounds,
                  double lambda, double radius) {
  AuctionConfig cfg;
  cfg.fm = fm;
  cfg.rounds = rounds;
  cfg.lambda = lambda;
  cfg.radius = radius;
  cfg.early_stop = false;
  return RunAuction(cfg, bidder);
}

TEST(DualTest, WeakDualityOnRandomCandidates) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const FeatureMap fm = FeatureMap::Linear(2, 2);
  const ValuationProfile v = testing::RandomValuation(fm, rng, 0, 6);
  const BundleMatrix values = ValueMatrix(fm, v);
  std::vector<Bundle> options = {Bundle()};
  for (Bundle x : fm.bundles()) options.push_back(x);
  std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
  for (double lambda : {0.05, 0.5, 2.0}) {
    for (int trial = 0; trial < 100; ++trial) {
      DualCandidate c;
      double a = unit(rng);
      c.demand = {{BidVector{{options[pick(rng)], options[pick(rng)]}}, a},
                  {BidVector{{options[pick(rng)], options[pick(rng)]}}, 1 - a}};
      c.supply = {{AllocationVector{{Bundle(1), Bundle(2)}}, 1.0}};
      const double dual = DualValue(fm, values, lambda, c, 0.0);
      for (int probe = 0; probe < 5; ++probe) {
        const PriceParams w = testing::RandomParams(2, rng, -3, 6);
        EXPECT_GE(PrimalValue(fm, w, values, lambda), dual - 1e-9);
      }
    }
  }
}

TEST(DualTest, CandidateValidation) {
  DualCandidate c;
  EXPECT_THROW(c.Validate(), InvalidInputError);
  c.demand = {{BidVector{{Bundle()}}, 0.4}};
  c.supply = {{AllocationVector{{Bundle()}}, 1.0}};
  EXPECT_THROW(c.Validate(), InvalidInputError);
  c.demand[0].second = 1.0;
  EXPECT_NO_THROW(c.Validate());
}

TEST(DualTest, ZeroLambdaRequiresBalancedCandidate) {
  const FeatureMap fm = FeatureMap::Linear(1, 1);
  BundleMatrix values(1, 1, 3.0);
  DualCandidate c;
  c.demand = {{BidVector{{Bundle(1)}}, 1.0}};
  c.supply = {{AllocationVector{{Bundle(1)}}, 1.0}};
  EXPECT_DOUBLE_EQ(DualValue(fm, values, 0.0, c, 1e-9), 3.0);
  c.supply = {{AllocationVector{{Bundle()}}, 1.0}};
  EXPECT_TRUE(std::isinf(DualValue(fm, values, 0.0, c, 1e-9)));
}

TEST(DualTest, CandidateFromTraceWeightsByStep) {
  const FeatureMap fm = FeatureMap::Linear(1, 1);
  RandomBidder bidder(fm, 2);
  const AuctionResult r = RunFor(fm, bidder, 30, 0.0, 1.0);
  const DualCandidate c = CandidateFromTrace(r.trace);
  EXPECT_NO_THROW(c.Validate());
  EXPECT_LE(c.demand.size(), 2u);
}

TEST(GapTest, ShrinksOnPersonalizedBundleMarket) {
  std::mt19937_64 rng(32);
  const FeatureMap fm = FeatureMap::BundleIdentity(2, 2, true);
  const ValuationProfile v = testing::RandomValuation(fm, rng, 1, 9);
  TruthfulBidder bidder(fm, v);
  const double V = v.MaxAbs();
  const AuctionResult r = RunFor(fm, bidder, 4000, 0.0, SelectRadius(fm, V));
  const GapReport g = DualityGap(fm, ValueMatrix(fm, v), 0.0, r.trace,
                                 ResidualTolerance(V));
  EXPECT_TRUE(g.used_efficient_welfare);
  EXPECT_GE(g.gap, -1e-9);
  EXPECT_LE(g.gap, 0.01 * std::max(1.0, std::abs(g.dual)));
  EXPECT_NEAR(g.dual, EfficientAllocation(fm, v).value, 1e-12);
}

TEST(GapTest, NonNegativeWithRegularization) {
  std::mt19937_64 rng(33);
  const FeatureMap fm = FeatureMap::Linear(3, 2);
  const ValuationProfile v = testing::RandomValuation(fm, rng, 0, 5);
  TruthfulBidder bidder(fm, v);
  const AuctionResult r = RunFor(fm, bidder, 2000, 0.1, 50.0);
  const GapReport g =
      DualityGap(fm, ValueMatrix(fm, v), 0.1, r.trace, 1e-6);
  EXPECT_FALSE(g.used_efficient_welfare);
  EXPECT_GE(g.gap, -1e-9);
  EXPECT_LT(g.gap, 0.5);
}

TEST(OptimalityTest, CertificateAtClearingPrice) {
  const FeatureMap fm = FeatureMap::Linear(1, 1);
  BundleMatrix values(1, 1, 1.0);
  const OptimalityReport ok =
      CheckOptimalityConditions(fm, {0.5}, values, 0.0, 1e-9);
  EXPECT_TRUE(ok.certificate_found);
  EXPECT_TRUE(ok.clearing);
  EXPECT_DOUBLE_EQ(ok.best_residual, 0.0);
  const OptimalityReport bad =
      CheckOptimalityConditions(fm, {2.0}, values, 0.0, 1e-9);
  EXPECT_FALSE(bad.certificate_found);
  EXPECT_DOUBLE_EQ(bad.best_residual, 1.0);
}

TEST(VBoundTest, Formulas) {
  const NoiseSpec gumbel{NoiseFamily::kGumbel, 0.5, 0.0};
  EXPECT_NEAR(VBound(gumbel, 2.0, 2, 3),
              2.0 + 1.0 * std::log(12.0 * std::sqrt(std::numbers::pi)), 1e-12);
  const NoiseSpec gauss{NoiseFamily::kGaussian, 1.0, 0.0};
  EXPECT_NEAR(VBound(gauss, 0.0, 1, 4), std::sqrt(2.0 * std::log(8.0)), 1e-12);
  EXPECT_THROW(VBound(gauss, 0.0, 0, 4), InvalidInputError);
}

TEST(VBoundTest, DominatesExpectedMaximum) {
  for (NoiseFamily family : {NoiseFamily::kGumbel, NoiseFamily::kGaussian}) {
    for (std::size_t nl : {4u, 16u}) {
      NoiseSampler s({family, 1.0, 0.0}, 5);
      double total = 0.0;
      const int trials = 20000;
      for (int k = 0; k < trials; ++k) {
        double best = 0.0;
        for (std::size_t j = 0; j < nl; ++j) {
          best = std::max(best, std::abs(s.Draw()));
        }
        total += best;
      }
      EXPECT_LE(total / trials, VBound({family, 1.0, 0.0}, 0.0, 1, nl));
    }
  }
}

TEST(MagnitudeTest, LongRunStaysInsideBounds) {
  std::mt19937_64 rng(34);
  const FeatureMap fm = FeatureMap::Polynomial(2, 2, 2);
  const ValuationProfile v = testing::RandomValuation(fm, rng, 0, 4);
  TruthfulBidder bidder(fm, v);
  const double V = v.MaxAbs();
  const AuctionResult r = RunFor(fm, bidder, 3000, 0.0, SelectRadius(fm, V));
  EXPECT_TRUE(CheckWMagnitude(fm, r.averaged_w, V).pass);
  const PriceParams huge(fm.dimension(), 1e6);
  EXPECT_FALSE(CheckWMagnitude(fm, huge, V).pass);
}

TEST(RegretTest, HoldsForTruthfulAndStochasticRuns) {
  std::mt19937_64 rng(35);
  const FeatureMap fm = FeatureMap::Linear(2, 2);
  const ValuationProfile v = testing::RandomValuation(fm, rng, 0, 5);
  TruthfulBidder truthful(fm, v);
  StochasticBidder noisy(fm, v, {NoiseFamily::kGumbel, 0.3, 0.0}, 8);
  for (BidderModel* b : std::initializer_list<BidderModel*>{&truthful, &noisy}) {
    for (double lambda : {0.0, 0.1}) {
      const AuctionResult r = RunFor(fm, *b, 500, lambda, 10.0);
      for (const PriceParams& u :
           {PriceParams{0.0, 0.0}, r.averaged_w, PriceParams{3.0, -2.0}}) {
        const RegretReport rep = CheckRegret(fm, r.trace, lambda, u, 1.0);
        EXPECT_TRUE(rep.holds) << rep.lhs << " > " << rep.rhs;
      }
    }
  }
}

TEST(EnvelopeTest, ShapesAndFit) {
  EXPECT_GT(ObjectiveEnvelope(2.0, 1.0, 100), ObjectiveEnvelope(2.0, 1.0, 10000));
  EXPECT_GT(PriceEnvelope(2.0, 1.0, 0.1, 100), PriceEnvelope(2.0, 1.0, 0.1, 10000));
  const BoundReport r = BuildBoundReport(
      {100, 400, 1600}, {{1.0, 0.5, 0.3}, {2.0, 0.9, 0.2}}, {1.0, 0.5, 0.25},
      400);
  EXPECT_DOUBLE_EQ(r.fitted_constant, 2.0);
  EXPECT_DOUBLE_EQ(r.worst[1], 0.9);
  EXPECT_DOUBLE_EQ(r.median[0], 1.5);
  EXPECT_TRUE(r.flagged.empty());
  const BoundReport bad =
      BuildBoundReport({100, 400}, {{1.0, 3.0}}, {1.0, 0.5}, 100);
  EXPECT_EQ(bad.flagged, std::vector<int>{400});
}

TEST(OscillatorObjectiveTest, MinimizerMatchesGridSearch) {
  for (auto [e, o] : {std::pair{3.0, 1.0}, std::pair{1.0, 3.0},
                      std::pair{2.5, 2.4}, std::pair{0.7, 0.9}}) {
    double best_p = 0.0;
    double best = 1e300;
    for (int k = -2000; k <= 3000; ++k) {
      const double p = k / 1000.0;
      const double f = OscillatorWeightedObjective(p, e, o);
      if (f < best - 1e-12) {
        best = f;
        best_p = p;
      }
    }
    EXPECT_NEAR(OscillatorMinimizer(e, o), best_p, 1e-9);
  }
}

TEST(DistanceTest, SeriesAgainstReference) {
  const FeatureMap fm = FeatureMap::Linear(2, 1);
  const std::map<int, PriceParams> avgs = {{10, {1.0, 1.0}}, {20, {0.0, 3.0}}};
  const auto d = PriceDistanceSeries(fm, avgs, {0.0, 0.0});
  // Sup over bundle prices: p({a,b}) = 2.
  EXPECT_NEAR(d.at(10), 2.0, 1e-12);
  EXPECT_NEAR(d.at(20), 3.0, 1e-12);
  EXPECT_THROW(PriceDistanceSeries(fm, avgs, {}), InvalidInputError);
}

}  // namespace
}  // namespace clockforge

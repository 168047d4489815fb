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


#include "clockforge/study.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace clockforge {

using nlohmann::json;

namespace {

constexpr std::uint64_t kReferenceStream = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kSampleStream = 0xD1B54A32D192ED03ull;

SeedSeries RunSeed(const ExperimentConfig& cfg,
                   const std::vector<int>& horizons, std::uint64_t seed) {
  const int longest = horizons.back();
  PreparedCell cell =
      PrepareCell(cfg, CellPlan{seed, longest, cfg.pricing, ""});
  AuctionConfig& a = cell.auction;
  a.checkpoints = horizons;
  a.early_stop = false;
  a.record_trace = false;
  a.objective_every = 0;
  const AuctionResult run = RunAuction(a, *cell.bidder);
  const FeatureMap& fm = a.fm;

  SeedSeries out;
  out.seed = seed;
  AuctionConfig ref = a;
  ref.rounds = longest * cfg.reference_factor;
  ref.checkpoints.clear();

  std::vector<BundleMatrix> samples;
  std::optional<BundleMatrix> fixed;
  AuctionResult reference;
  const std::string& model = cfg.bidder.model;
  if (model == "truthful") {
    fixed = ValueMatrix(fm, *cell.valuation);
    out.valuation_scale = cell.valuation_scale;
    TruthfulBidder bidder(fm, *cell.valuation);
    reference = RunAuction(ref, bidder);
  } else if (model == "stochastic") {
    out.valuation_scale = cell.valuation_scale;
    PreparedCell rc = PrepareCell(
        cfg, CellPlan{seed ^ kReferenceStream, ref.rounds, cfg.pricing, ""});
    reference = RunAuction(ref, *rc.bidder);
    StochasticBidder sampler(fm, *cell.valuation, cfg.bidder.noise,
                             seed ^ kSampleStream);
    for (int k = 0; k < cfg.objective_samples; ++k) {
      samples.push_back(sampler.DrawValues());
    }
  } else if (model == "garp") {
    const auto& garp = dynamic_cast<const GarpConstrainedBidder&>(*cell.bidder);
    out.repairs = garp.repairs();
    out.garp_consistent = CheckGarp(garp.history()).consistent;
    const ValuationProfile recovered = RecoverValuation(garp.history());
    fixed = ValueMatrix(fm, recovered);
    out.valuation_scale = recovered.MaxAbs();
    ref.radius = std::max(ref.radius, SelectRadius(fm, out.valuation_scale));
    TruthfulBidder bidder(fm, recovered);
    reference = RunAuction(ref, bidder);
  } else {
    throw InvalidConfigError("rate studies need a truthful, stochastic or "
                             "GARP-constrained bidder, not " + model);
  }
  out.reference_w = reference.averaged_w;
  out.magnitude = CheckWMagnitude(fm, out.reference_w, out.valuation_scale);

  const double best =
      fixed ? Objective(fm, out.reference_w, *fixed, cfg.lambda,
                        cfg.max_exact_items)
            : SampleAverageObjective(fm, out.reference_w, samples, cfg.lambda,
                                     cfg.max_exact_items);
  for (int t : horizons) {
    const PriceParams& w = run.checkpoint_averages.at(t);
    const double at = fixed ? Objective(fm, w, *fixed, cfg.lambda,
                                        cfg.max_exact_items)
                            : SampleAverageObjective(fm, w, samples, cfg.lambda,
                                                     cfg.max_exact_items);
    out.objective_gap.push_back(at - best);
    if (cfg.lambda > 0.0) {
      out.price_distance.push_back(PriceDistance(fm, w, out.reference_w));
    }
  }
  return out;
}

json ReportJson(const BoundReport& r) {
  return {{"kappa", r.kappa},
          {"V", r.valuation_scale},
          {"R", r.radius},
          {"delta", r.delta},
          {"fit_horizon", r.fit_horizon},
          {"fitted_constant", r.fitted_constant},
          {"horizons", r.horizons},
          {"envelope", r.envelope},
          {"median", r.median},
          {"worst", r.worst},
          {"ratio", r.ratio},
          {"flagged", r.flagged}};
}

}  // namespace

RateStudy RunRateStudy(const ExperimentConfig& cfg,
                       const RateStudyOptions& options) {
  RateStudy study;
  study.horizons = cfg.horizons;
  std::sort(study.horizons.begin(), study.horizons.end());
  study.horizons.erase(
      std::unique(study.horizons.begin(), study.horizons.end()),
      study.horizons.end());
  const FeatureMap fm = cfg.pricing.Build(cfg.items, cfg.agents);
  study.kappa = KappaBound(fm);
  study.g_norm = fm.GNorm2Inf();
  study.lambda = cfg.lambda;

  study.seeds.resize(cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t k = next++; k < cfg.seeds.size(); k = next++) {
      try {
        study.seeds[k] = RunSeed(cfg, study.horizons, cfg.seeds[k]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int width = std::max(
      1, std::min<int>(options.workers, static_cast<int>(cfg.seeds.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < width; ++k) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  double scale = 0.0;
  for (const SeedSeries& s : study.seeds) {
    scale = std::max(scale, s.valuation_scale);
  }
  std::vector<std::vector<double>> gaps, dists;
  std::vector<double> obj_env, price_env;
  for (const SeedSeries& s : study.seeds) {
    gaps.push_back(s.objective_gap);
    if (!s.price_distance.empty()) dists.push_back(s.price_distance);
  }
  for (int t : study.horizons) {
    obj_env.push_back(ObjectiveEnvelope(study.kappa, scale, t, options.delta));
    if (cfg.lambda > 0.0) {
      price_env.push_back(PriceEnvelope(study.kappa, study.g_norm, cfg.lambda, t));
    }
  }
  auto finish = [&](BoundReport r) {
    r.kappa = study.kappa;
    r.valuation_scale = scale;
    r.radius = SelectRadius(fm, scale);
    r.delta = options.delta;
    return r;
  };
  study.objective = finish(BuildBoundReport(study.horizons, gaps, obj_env,
                                            options.fit_horizon));
  if (cfg.lambda > 0.0) {
    study.price = finish(BuildBoundReport(study.horizons, dists, price_env,
                                          options.fit_horizon));
  }
  return study;
}

std::string RateStudyToJson(const RateStudy& study) {
  json j;
  j["horizons"] = study.horizons;
  j["kappa"] = study.kappa;
  j["g_norm_2inf"] = study.g_norm;
  j["lambda"] = study.lambda;
  j["objective"] = ReportJson(study.objective);
  j["price"] = study.price ? ReportJson(*study.price) : json(nullptr);
  j["seeds"] = json::array();
  for (const SeedSeries& s : study.seeds) {
    j["seeds"].push_back(
        {{"seed", s.seed},
         {"V", s.valuation_scale},
         {"objective_gap", s.objective_gap},
         {"price_distance", s.price_distance},
         {"reference_w", s.reference_w},
         {"magnitude",
          {{"inf_norm", s.magnitude.inf_norm},
           {"inf_bound", s.magnitude.inf_bound},
           {"two_norm", s.magnitude.two_norm},
           {"two_bound", s.magnitude.two_bound},
           {"pass", s.magnitude.pass}}},
         {"garp_repairs", s.repairs},
         {"garp_consistent", s.garp_consistent}});
  }
  return j.dump(2) + "\n";
}

std::string RateStudyToCsv(const RateStudy& study) {
  std::ostringstream out;
  out << "horizon,objective_fitted_envelope,objective_median,objective_worst";
  if (study.price) out << ",price_fitted_envelope,price_median,price_worst";
  out << '\n';
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  for (std::size_t k = 0; k < study.horizons.size(); ++k) {
    out << study.horizons[k] << ',' << num(study.objective.envelope[k] *
                                           study.objective.fitted_constant)
        << ',' << num(study.objective.median[k]) << ','
        << num(study.objective.worst[k]);
    if (study.price) {
      out << ',' << num(study.price->envelope[k] * study.price->fitted_constant)
          << ',' << num(study.price->median[k]) << ','
          << num(study.price->worst[k]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace clockforge

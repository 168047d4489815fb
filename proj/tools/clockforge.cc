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


// clockforge: run auctions, verify runs, and audit GARP histories.
//
// Exit status: 0 success, 1 error, 2 a check failed (GARP violation, bound
// violation, missing certificate).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "clockforge/activity.h"
#include "clockforge/config.h"
#include "clockforge/experiment.h"
#include "clockforge/study.h"
#include "clockforge/trace_io.h"
#include "clockforge/verify.h"
#include "json.hpp"

namespace cf = clockforge;
using nlohmann::json;

namespace {

constexpr int kCheckFailed = 2;

void SetupLogging() {
  auto logger = spdlog::stderr_color_mt("clockforge");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("CLOCKFORGE_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level)
                          : spdlog::level::info);
}

void WriteOutput(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cf::InvalidInputError("cannot write " + path);
  out << text;
}

cf::LoadedTrace LoadTrace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cf::InvalidInputError("cannot read " + path);
  return cf::ReadTraceJson(in);
}

int DefaultWorkers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

int CmdRun(const std::string& config_path, const std::string& out,
           const std::string& full_json, std::optional<std::uint64_t> seed,
           int workers, bool resume) {
  cf::ExperimentConfig cfg = cf::LoadConfig(config_path);
  for (const auto& w : cfg.warnings) spdlog::warn("{}", w);
  if (seed) cfg.seeds = {*seed};
  const auto cells = cf::PlanCells(cfg);

  if (cells.size() == 1 && (!out.empty() || !full_json.empty())) {
    // Single cell: write exactly the requested files.
    cf::PreparedCell prepared = cf::PrepareCell(cfg, cells.front());
    prepared.auction.record_trace = true;
    const cf::AuctionResult result =
        cf::RunAuction(prepared.auction, *prepared.bidder);
    if (!out.empty()) {
      std::ostringstream csv;
      cf::WriteTraceCsv(csv, prepared.auction, result);
      WriteOutput(out, csv.str());
    }
    if (!full_json.empty()) {
      std::ostringstream js;
      cf::WriteTraceJson(js, cells.front().pricing, prepared.auction, result);
      WriteOutput(full_json, js.str());
    }
    spdlog::info("{} rounds, cleared={}", result.rounds_run, result.cleared);
    return 0;
  }
  if (!out.empty()) cfg.output_dir = out;
  if (!full_json.empty()) cfg.full_json = true;
  cf::RunOptions options;
  options.workers = workers;
  options.resume = resume;
  options.log = [](const std::string& m) { spdlog::info("{}", m); };
  const cf::ExperimentSummary summary = cf::RunExperiment(cfg, options);
  spdlog::info("{} cells run, {} resumed; summary in {}", summary.ran,
               summary.skipped, (cfg.output_dir / "summary.json").string());
  return 0;
}

int CmdVerifyDuality(const std::string& trace_path,
                     const std::string& valuations, const std::string& out) {
  const cf::LoadedTrace trace = LoadTrace(trace_path);
  const cf::FeatureMap fm = trace.BuildFeatureMap();
  const cf::ValuationProfile v =
      cf::LoadValuations(valuations, trace.agents, trace.items);
  const cf::BundleMatrix values = cf::ValueMatrix(fm, v);
  const double tol = cf::ResidualTolerance(v.MaxAbs());
  const cf::GapReport gap =
      cf::DualityGap(fm, values, trace.lambda, trace.rounds, tol);
  const cf::PriceParams& last = trace.rounds.back().w;
  const cf::OptimalityReport opt =
      cf::CheckOptimalityConditions(fm, last, values, trace.lambda, tol);
  json j = {{"primal", gap.primal},
            {"dual", gap.dual},
            {"gap", gap.gap},
            {"dual_is_efficient_welfare", gap.used_efficient_welfare},
            {"tolerance", tol},
            {"final_iterate",
             {{"certificate_found", opt.certificate_found},
              {"best_residual", opt.best_residual},
              {"clearing", opt.clearing},
              {"demand_points", opt.demand_points},
              {"supply_points", opt.supply_points}}}};
  WriteOutput(out, j.dump(2) + "\n");
  return gap.gap >= -tol ? 0 : kCheckFailed;
}

int CmdVerifyBounds(const std::string& trace_path,
                    const std::string& valuations, const std::string& out) {
  const cf::LoadedTrace trace = LoadTrace(trace_path);
  const cf::FeatureMap fm = trace.BuildFeatureMap();
  const cf::ValuationProfile v =
      cf::LoadValuations(valuations, trace.agents, trace.items);
  const double scale = v.MaxAbs();
  const cf::PriceParams avg = cf::AveragedIterate(trace.rounds);
  const cf::MagnitudeReport mag = cf::CheckWMagnitude(fm, avg, scale);
  json j = {{"V", scale},
            {"R", cf::SelectRadius(fm, scale)},
            {"kappa", cf::KappaBound(fm)},
            {"g_norm_2inf", fm.GNorm2Inf()},
            {"magnitude",
             {{"inf_norm", mag.inf_norm},
              {"inf_bound", mag.inf_bound},
              {"two_norm", mag.two_norm},
              {"two_bound", mag.two_bound},
              {"pass", mag.pass}}}};
  bool ok = mag.pass;
  // The regret inequality needs c / sqrt(t) steps; infer c from round 1.
  const double c = trace.rounds.front().eta;
  bool inverse_sqrt = true;
  for (const cf::RoundTrace& r : trace.rounds) {
    const double expected = c / std::sqrt(static_cast<double>(r.t));
    if (std::abs(r.eta - expected) > 1e-12 * c) inverse_sqrt = false;
  }
  if (inverse_sqrt) {
    std::vector<cf::RoundTrace> rounds = trace.rounds;
    auto values = std::make_shared<const cf::BundleMatrix>(cf::ValueMatrix(fm, v));
    for (cf::RoundTrace& r : rounds) r.values = values;
    const cf::RegretReport regret =
        cf::CheckRegret(fm, rounds, trace.lambda, avg, c);
    j["regret"] = {{"lhs", regret.lhs},
                   {"rhs", regret.rhs},
                   {"lipschitz", regret.lipschitz},
                   {"holds", regret.holds}};
    ok = ok && regret.holds;
  } else {
    j["regret"] = nullptr;
  }
  WriteOutput(out, j.dump(2) + "\n");
  return ok ? 0 : kCheckFailed;
}

int CmdVerifyRates(const std::string& config_path, const std::string& out,
                   int workers, int fit_horizon) {
  const cf::ExperimentConfig cfg = cf::LoadConfig(config_path);
  for (const auto& w : cfg.warnings) spdlog::warn("{}", w);
  cf::RateStudyOptions options;
  options.workers = workers;
  options.fit_horizon = fit_horizon;
  const cf::RateStudy study = cf::RunRateStudy(cfg, options);
  WriteOutput(out, cf::RateStudyToJson(study));
  if (!out.empty() && out != "-") {
    std::string csv = out;
    const auto dot = csv.rfind(".json");
    csv = (dot == std::string::npos ? csv : csv.substr(0, dot)) + ".csv";
    WriteOutput(csv, cf::RateStudyToCsv(study));
  }
  bool flagged = !study.objective.flagged.empty() ||
                 (study.price && !study.price->flagged.empty());
  for (int t : study.objective.flagged) {
    spdlog::warn("objective gap above the fitted envelope at T={}", t);
  }
  return flagged ? kCheckFailed : 0;
}

int CmdGarpCheck(const std::string& trace_path) {
  const cf::History history = cf::HistoryFromTrace(LoadTrace(trace_path));
  const cf::GarpResult r = cf::CheckGarp(history);
  if (r.consistent) {
    std::cout << "consistent (" << history.rounds().size() << " rounds)\n";
    return 0;
  }
  std::cout << "violation: agent " << r.violation->agent << ", rounds";
  for (int t : r.violation->rounds) std::cout << ' ' << t;
  std::cout << ", cycle sum " << r.violation->agent_cycle_sum
            << " (all agents: " << r.violation->joint_cycle_sum << ")\n";
  return kCheckFailed;
}

int CmdGarpRecover(const std::string& trace_path, const std::string& out) {
  const cf::History history = cf::HistoryFromTrace(LoadTrace(trace_path));
  const cf::GarpResult r = cf::CheckGarp(history);
  if (!r.consistent) {
    spdlog::error("history violates GARP at agent {}; nothing to recover",
                  r.violation->agent);
    return kCheckFailed;
  }
  WriteOutput(out, cf::ValuationsToJson(cf::RecoverValuation(history)) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  SetupLogging();
  CLI::App app{"clockforge: iterative combinatorial auction simulator"};
  app.require_subcommand(1);

  std::string config, out, full_json, trace, valuations;
  std::optional<std::uint64_t> seed;
  int workers = DefaultWorkers();
  int fit_horizon = 500;
  bool resume = false;

  auto* run = app.add_subcommand("run", "run an auction or a sweep");
  run->add_option("--config", config, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out,
                  "trace CSV for a single cell, else the output directory");
  run->add_option("--full-json", full_json, "full JSON trace (single cell)");
  run->add_option("--seed", seed, "run only this seed");
  run->add_option("--workers", workers, "worker threads")
      ->check(CLI::PositiveNumber);
  run->add_flag("--resume", resume, "skip cells that already finished");

  auto* verify = app.add_subcommand("verify", "certify a run");
  verify->require_subcommand(1);
  auto* duality = verify->add_subcommand("duality", "duality gap report");
  auto* bounds = verify->add_subcommand("bounds", "magnitude and regret");
  for (auto* cmd : {duality, bounds}) {
    cmd->add_option("--trace", trace, "full JSON trace")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--valuations", valuations, "valuation JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "report path (default stdout)");
  }
  auto* rates = verify->add_subcommand("rates", "rate study with envelopes");
  rates->add_option("--config", config, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  rates->add_option("--out", out, "report JSON; a .csv is written alongside");
  rates->add_option("--workers", workers, "worker threads")
      ->check(CLI::PositiveNumber);
  rates->add_option("--fit-horizon", fit_horizon,
                    "largest T used to fit the envelope constant");

  auto* garp = app.add_subcommand("garp", "revealed-preference audit");
  garp->require_subcommand(1);
  auto* check = garp->add_subcommand("check", "test a trace for GARP");
  auto* recover = garp->add_subcommand("recover", "rationalizing valuation");
  for (auto* cmd : {check, recover}) {
    cmd->add_option("--trace", trace, "full JSON trace")
        ->required()
        ->check(CLI::ExistingFile);
  }
  recover->add_option("--out", out, "valuation JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors share exit code 1 with runtime errors; --help exits 0.
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    if (*run) return CmdRun(config, out, full_json, seed, workers, resume);
    if (*duality) return CmdVerifyDuality(trace, valuations, out);
    if (*bounds) return CmdVerifyBounds(trace, valuations, out);
    if (*rates) return CmdVerifyRates(config, out, workers, fit_horizon);
    if (*check) return CmdGarpCheck(trace);
    if (*recover) return CmdGarpRecover(trace, out);
  } catch (const cf::ConfigError& e) {
    for (const auto& v : e.violations()) spdlog::error("{}", v);
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 1;
}

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


#include "clockforge/experiment.h"

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "clockforge/trace_io.h"
#include "clockforge/verify.h"
#include "json.hpp"

namespace clockforge {

using nlohmann::json;

namespace {

constexpr std::uint64_t kReferenceStream = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kSampleStream = 0xD1B54A32D192ED03ull;

void WriteText(const std::filesystem::path& path, const std::string& text) {
  // Write then rename so a sidecar is either complete or absent.
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InvalidInputError("cannot write " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

std::optional<double> StochasticGap(const ExperimentConfig& cfg,
                                    const CellPlan& cell,
                                    const PreparedCell& prepared,
                                    const AuctionResult& run) {
  PreparedCell ref = PrepareCell(cfg, CellPlan{cell.seed ^ kReferenceStream,
                                               cell.rounds * cfg.reference_factor,
                                               cell.pricing, cell.name});
  ref.auction.early_stop = false;
  ref.auction.record_trace = false;
  ref.auction.objective_every = 0;
  const AuctionResult reference = RunAuction(ref.auction, *ref.bidder);

  StochasticBidder sampler(prepared.auction.fm, *prepared.valuation,
                           cfg.bidder.noise, cell.seed ^ kSampleStream);
  std::vector<BundleMatrix> samples;
  for (int k = 0; k < cfg.objective_samples; ++k) {
    samples.push_back(sampler.DrawValues());
  }
  const FeatureMap& fm = prepared.auction.fm;
  return SampleAverageObjective(fm, run.averaged_w, samples, cfg.lambda,
                                cfg.max_exact_items) -
         SampleAverageObjective(fm, reference.averaged_w, samples, cfg.lambda,
                                cfg.max_exact_items);
}

}  // namespace

std::string CellSummaryToJson(const CellSummary& s) {
  json j = {{"name", s.name},
            {"seed", s.seed},
            {"rounds", s.rounds},
            {"scheme", s.scheme},
            {"rounds_run", s.rounds_run},
            {"cleared", s.cleared},
            {"cleared_round",
             s.cleared_round ? json(*s.cleared_round) : json(nullptr)},
            {"final_gap", s.final_gap ? json(*s.final_gap) : json(nullptr)},
            {"gap_kind", s.gap_kind.empty() ? json(nullptr) : json(s.gap_kind)},
            {"final_w_norm", s.final_w_norm}};
  return j.dump(2);
}

CellSummary CellSummaryFromJson(const std::string& text) {
  try {
    const json j = json::parse(text);
    CellSummary s;
    s.name = j.at("name").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.rounds = j.at("rounds").get<int>();
    s.scheme = j.at("scheme").get<std::string>();
    s.rounds_run = j.at("rounds_run").get<int>();
    s.cleared = j.at("cleared").get<bool>();
    if (!j.at("cleared_round").is_null()) {
      s.cleared_round = j["cleared_round"].get<int>();
    }
    if (!j.at("final_gap").is_null()) s.final_gap = j["final_gap"].get<double>();
    if (!j.at("gap_kind").is_null()) s.gap_kind = j["gap_kind"].get<std::string>();
    s.final_w_norm = j.at("final_w_norm").get<double>();
    return s;
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("malformed cell sidecar: ") + e.what());
  }
}

CellSummary RunCell(const ExperimentConfig& cfg, const CellPlan& cell) {
  PreparedCell prepared = PrepareCell(cfg, cell);
  const AuctionResult result =
      RunAuction(prepared.auction, *prepared.bidder);

  const std::filesystem::path base = cfg.output_dir / cell.name;
  {
    std::ostringstream csv;
    WriteTraceCsv(csv, prepared.auction, result);
    WriteText(base.string() + ".csv", csv.str());
  }
  if (cfg.full_json) {
    std::ostringstream js;
    WriteTraceJson(js, cell.pricing, prepared.auction, result);
    WriteText(base.string() + ".json", js.str());
  }

  CellSummary s;
  s.name = cell.name;
  s.seed = cell.seed;
  s.rounds = cell.rounds;
  s.scheme = cell.pricing.Tag();
  s.rounds_run = result.rounds_run;
  s.cleared = result.cleared;
  s.cleared_round = result.cleared_round;
  s.final_w_norm = Norm2(result.last_w);
  const std::string& model = cfg.bidder.model;
  if (model == "truthful") {
    const FeatureMap& fm = prepared.auction.fm;
    const GapReport gap = DualityGap(
        fm, ValueMatrix(fm, *prepared.valuation), cfg.lambda, result.trace,
        ResidualTolerance(prepared.valuation_scale), 0, cfg.max_exact_items);
    s.final_gap = gap.gap;
    s.gap_kind = "duality";
  } else if (model == "stochastic") {
    s.final_gap = StochasticGap(cfg, cell, prepared, result);
    s.gap_kind = "reference";
  }
  WriteText(base.string() + ".cell.json", CellSummaryToJson(s));
  return s;
}

ExperimentSummary RunExperiment(ExperimentConfig cfg,
                                const RunOptions& options) {
  if (options.seed) cfg.seeds = {*options.seed};
  std::filesystem::create_directories(cfg.output_dir);
  const std::vector<CellPlan> cells = PlanCells(cfg);
  ExperimentSummary summary;
  summary.cells.resize(cells.size());

  std::vector<std::size_t> pending;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto sidecar = cfg.output_dir / (cells[k].name + ".cell.json");
    if (options.resume && std::filesystem::exists(sidecar)) {
      std::ifstream in(sidecar);
      std::stringstream ss;
      ss << in.rdbuf();
      summary.cells[k] = CellSummaryFromJson(ss.str());
      summary.cells[k].resumed = true;
      ++summary.skipped;
      if (options.log) options.log("skip " + cells[k].name + " (done)");
    } else {
      pending.push_back(k);
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::vector<std::string> failures;
  auto worker = [&] {
    for (std::size_t i = next++; i < pending.size(); i = next++) {
      const CellPlan& cell = cells[pending[i]];
      try {
        CellSummary s = RunCell(cfg, cell);
        std::lock_guard<std::mutex> lock(mu);
        summary.cells[pending[i]] = std::move(s);
        ++summary.ran;
        if (options.log) options.log("done " + cell.name);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        failures.push_back(cell.name + ": " + e.what());
      }
    }
  };
  const int width = std::max(
      1, std::min<int>(options.workers, static_cast<int>(pending.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < width; ++k) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (!failures.empty()) {
    std::string msg = "experiment cells failed:";
    for (const auto& f : failures) msg += "\n  " + f;
    throw std::runtime_error(msg);
  }

  json out;
  out["cells"] = json::array();
  for (const CellSummary& s : summary.cells) {
    out["cells"].push_back(json::parse(CellSummaryToJson(s)));
  }
  out["ran"] = summary.ran;
  out["skipped"] = summary.skipped;
  WriteText(cfg.output_dir / "summary.json", out.dump(2) + "\n");
  return summary;
}

}  // namespace clockforge

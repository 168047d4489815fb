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


#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "clockforge/auction.h"
#include "clockforge/config.h"
#include "clockforge/errors.h"
#include "clockforge/experiment.h"
#include "clockforge/trace_io.h"
#include "json.hpp"

namespace clockforge {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("clockforge-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void WriteFile(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr const char* kValuations =
    R"([{"agent":0,"bundle":[0],"value":5},{"agent":0,"bundle":[0,1],"value":8},
        {"agent":1,"bundle":[1],"value":4},{"agent":1,"bundle":[0],"value":3}])";

constexpr const char* kTruthful = R"({"schema_version":1,"items":2,"agents":2,
  "pricing":{"scheme":"bundle","personalized":true},
  "auction":{"rounds":400,"lambda":0,"early_stop":false},
  "bidder":{"model":"truthful","valuations":"v.json"}})";

constexpr const char* kSweep = R"({"schema_version":1,"items":2,"agents":2,
  "pricing":{"scheme":"linear"},
  "auction":{"rounds":300,"lambda":0.5},
  "bidder":{"model":"stochastic","valuations":"v.json",
            "noise":{"family":"gumbel","scale":0.3}},
  "sweep":{"seeds":[1,2,3],"rounds":[100,200]},
  "output":{"dir":"out"},
  "verify":{"reference_factor":2,"objective_samples":50}})";

TEST(ConfigTest, ParsesAndFillsDefaults) {
  TempDir dir;
  WriteFile(dir.path() / "v.json", kValuations);
  const ExperimentConfig cfg = ParseConfig(kTruthful, dir.path());
  EXPECT_EQ(cfg.items, 2);
  EXPECT_EQ(cfg.agents, 2);
  EXPECT_EQ(cfg.pricing.Tag(), "bundle-pers");
  const auto cells = PlanCells(cfg);
  ASSERT_EQ(cells.size(), 1u);
  const PreparedCell prep = PrepareCell(cfg, cells[0]);
  EXPECT_DOUBLE_EQ(prep.valuation_scale, 8.0);
  EXPECT_DOUBLE_EQ(prep.auction.radius, SelectRadius(prep.auction.fm, 8.0));
}

TEST(ConfigTest, ReportsEveryViolationWithPointer) {
  const std::string bad =
      R"({"schema_version":1,"items":2,"agents":2,
          "pricing":{"scheme":"poly","degree":0},"auction":{"rounds":0},
          "bidder":{"model":"truthful"},"extra":1})";
  try {
    ParseConfig(bad);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    std::string all;
    for (const auto& v : e.violations()) all += v + "\n";
    EXPECT_NE(all.find("/pricing/degree"), std::string::npos) << all;
    EXPECT_NE(all.find("/auction/rounds"), std::string::npos) << all;
    EXPECT_NE(all.find("/extra"), std::string::npos) << all;
    EXPECT_GE(e.violations().size(), 3u);
  }
  EXPECT_THROW(ParseConfig("{not json"), InvalidConfigError);
}

TEST(ConfigTest, ValuationsRoundTrip) {
  const ValuationProfile v = ParseValuations(kValuations, 2, 2);
  EXPECT_DOUBLE_EQ(v.Value(0, Bundle(3)), 8.0);
  const ValuationProfile again = ParseValuations(ValuationsToJson(v), 2, 2);
  for (int i = 0; i < 2; ++i) EXPECT_EQ(v.Entries(i), again.Entries(i));
  EXPECT_THROW(ParseValuations(R"([{"agent":3,"bundle":[0],"value":1}])", 2, 2),
               InvalidInputError);
}

TEST(ConfigTest, SweepPlansCrossProduct) {
  TempDir dir;
  WriteFile(dir.path() / "v.json", kValuations);
  const ExperimentConfig cfg = ParseConfig(kSweep, dir.path());
  const auto cells = PlanCells(cfg);
  ASSERT_EQ(cells.size(), 6u);
  EXPECT_EQ(cells[0].name, "cell-linear-T100-s1");
}

class TraceIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    cfg_.fm = FeatureMap::Linear(2, 2);
    cfg_.rounds = 50;
    cfg_.radius = 2.0;
    cfg_.early_stop = false;
    RandomBidder bidder(cfg_.fm, 3);
    result_ = RunAuction(cfg_, bidder);
  }
  AuctionConfig cfg_;
  AuctionResult result_;
};

TEST_F(TraceIoTest, CsvRoundTripAndInvariants) {
  std::stringstream ss;
  WriteTraceCsv(ss, cfg_, result_);
  const TraceCsv csv = ReadTraceCsv(ss);
  ASSERT_EQ(csv.rows.size(), 50u);
  EXPECT_EQ(csv.meta.at("scheme"), "linear");
  EXPECT_TRUE(CheckTraceCsv(csv).empty());
  for (std::size_t k = 0; k < csv.rows.size(); ++k) {
    EXPECT_EQ(csv.rows[k].eta, result_.trace[k].eta);
    EXPECT_EQ(csv.rows[k].gamma, result_.trace[k].gamma);
  }
  std::stringstream bad("t,eta\n1,2\n");
  EXPECT_THROW(ReadTraceCsv(bad), InvalidInputError);
}

TEST_F(TraceIoTest, CsvInvariantViolationsAreReported) {
  std::stringstream ss;
  WriteTraceCsv(ss, cfg_, result_);
  TraceCsv csv = ReadTraceCsv(ss);
  csv.rows[3].gamma = 1.5;
  csv.rows[4].w_norm = 10.0;
  EXPECT_EQ(CheckTraceCsv(csv).size(), 2u);
}

TEST_F(TraceIoTest, JsonRoundTripPreservesRounds) {
  PricingSpec pricing;
  pricing.scheme = PricingScheme::kLinear;
  std::stringstream ss;
  WriteTraceJson(ss, pricing, cfg_, result_);
  const LoadedTrace t = ReadTraceJson(ss);
  ASSERT_EQ(t.rounds.size(), 50u);
  EXPECT_EQ(t.items, 2);
  for (std::size_t k = 0; k < 50; ++k) {
    EXPECT_EQ(t.rounds[k].w, result_.trace[k].w);
    EXPECT_EQ(t.rounds[k].bids, result_.trace[k].bids);
    EXPECT_EQ(t.rounds[k].allocation, result_.trace[k].allocation);
  }
  const History h = HistoryFromTrace(t);
  EXPECT_EQ(h.rounds().size(), 50u);
}

TEST(ExperimentTest, DeterministicCsvAndResume) {
  TempDir a;
  TempDir b;
  for (const TempDir* d : {&a, &b}) {
    WriteFile(d->path() / "v.json", kValuations);
    WriteFile(d->path() / "sweep.json", kSweep);
  }
  RunOptions two;
  two.workers = 2;
  const ExperimentSummary sa = RunExperiment(LoadConfig(a.path() / "sweep.json"), two);
  const ExperimentSummary sb = RunExperiment(LoadConfig(b.path() / "sweep.json"), {});
  ASSERT_EQ(sa.ran, 6);
  for (const CellSummary& c : sa.cells) {
    EXPECT_EQ(ReadFile(a.path() / "out" / (c.name + ".csv")),
              ReadFile(b.path() / "out" / (c.name + ".csv")))
        << c.name;
    ASSERT_TRUE(c.final_gap.has_value());
    EXPECT_EQ(c.gap_kind, "reference");
  }
  EXPECT_TRUE(fs::exists(a.path() / "out" / "summary.json"));

  // Delete one sidecar; resume reruns only that cell.
  const std::string victim = sa.cells[2].name;
  const std::string before = ReadFile(a.path() / "out" / (victim + ".csv"));
  fs::remove(a.path() / "out" / (victim + ".cell.json"));
  RunOptions resume;
  resume.resume = true;
  const ExperimentSummary again =
      RunExperiment(LoadConfig(a.path() / "sweep.json"), resume);
  EXPECT_EQ(again.ran, 1);
  EXPECT_EQ(again.skipped, 5);
  EXPECT_EQ(ReadFile(a.path() / "out" / (victim + ".csv")), before);
}

TEST(ExperimentTest, SummaryJsonRoundTrip) {
  CellSummary s;
  s.name = "cell-x";
  s.seed = 7;
  s.rounds = 10;
  s.final_gap = 0.25;
  s.gap_kind = "duality";
  s.cleared_round = 4;
  const CellSummary t = CellSummaryFromJson(CellSummaryToJson(s));
  EXPECT_EQ(t.name, s.name);
  EXPECT_EQ(t.final_gap, s.final_gap);
  EXPECT_EQ(t.cleared_round, s.cleared_round);
}

int RunCli(const std::string& args) {
  const int status = std::system((std::string(CLOCKFORGE_CLI_PATH) + " " +
                                  args + " >/dev/null 2>&1")
                                     .c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, EndToEndExitCodes) {
  TempDir dir;
  const fs::path p = dir.path();
  WriteFile(p / "v.json", kValuations);
  WriteFile(p / "cfg.json", kTruthful);
  const std::string csv = (p / "t.csv").string();
  const std::string js = (p / "t.json").string();
  ASSERT_EQ(RunCli("run --config " + (p / "cfg.json").string() + " --out " +
                   csv + " --full-json " + js),
            0);
  EXPECT_TRUE(fs::exists(csv));
  const std::string report = (p / "gap.json").string();
  EXPECT_EQ(RunCli("verify duality --trace " + js + " --valuations " +
                   (p / "v.json").string() + " --out " + report),
            0);
  const auto gap = nlohmann::json::parse(ReadFile(report));
  EXPECT_TRUE(gap.contains("gap"));
  EXPECT_EQ(RunCli("verify bounds --trace " + js + " --valuations " +
                   (p / "v.json").string()),
            0);
  EXPECT_EQ(RunCli("garp check --trace " + js), 0);
  EXPECT_EQ(RunCli("garp recover --trace " + js + " --out " +
                   (p / "rec.json").string()),
            0);
  EXPECT_NO_THROW(LoadValuations(p / "rec.json", 2, 2));

  WriteFile(p / "bad.json", R"({"items":0})");
  EXPECT_EQ(RunCli("run --config " + (p / "bad.json").string()), 1);
  EXPECT_EQ(RunCli("verify duality --trace " + (p / "missing.json").string() +
                   " --valuations " + (p / "v.json").string()),
            1);
}

TEST(CliTest, VerifyRatesWritesReports) {
  TempDir dir;
  const fs::path p = dir.path();
  WriteFile(p / "v.json", kValuations);
  WriteFile(p / "sweep.json", kSweep);
  const std::string out = (p / "rates.json").string();
  ASSERT_EQ(RunCli("verify rates --config " + (p / "sweep.json").string() +
                   " --out " + out + " --fit-horizon 100"),
            0);
  const auto j = nlohmann::json::parse(ReadFile(out));
  EXPECT_EQ(j.at("horizons").size(), 2u);
  EXPECT_TRUE(fs::exists(p / "rates.csv"));
}

TEST(CliTest, GarpCheckFailsOnViolatingTrace) {
  TempDir dir;
  nlohmann::json t = {
      {"format", "clockforge-trace"},
      {"version", 1},
      {"items", 1},
      {"agents", 1},
      {"pricing", {{"scheme", "linear"}}},
      {"lambda", 0.0},
      {"radius", 10.0},
      {"seed", 0},
      {"averaged_w", {0.0}},
      {"rounds",
       {{{"t", 1}, {"eta", 1.0}, {"gamma", 1.0}, {"w", {4.0}}, {"g", {0.0}},
         {"bids", {{0}}}, {"allocation", {{0}}}, {"cleared", false}},
        {{"t", 2}, {"eta", 1.0}, {"gamma", 1.0}, {"w", {1.0}}, {"g", {0.0}},
         {"bids", {nlohmann::json::array()}}, {"allocation", {{0}}},
         {"cleared", false}}}}};
  WriteFile(dir.path() / "t.json", t.dump());
  EXPECT_EQ(RunCli("garp check --trace " + (dir.path() / "t.json").string()),
            2);
}

}  // namespace
}  // namespace clockforge

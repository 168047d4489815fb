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


#include "clockforge/trace_io.h"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace clockforge {

using nlohmann::json;

namespace {

std::string Num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double ParseNum(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw InvalidInputError("trace line " + std::to_string(line) +
                            ": bad number \"" + s + "\"");
  }
}

json BundlesJson(const std::vector<Bundle>& bs) {
  json out = json::array();
  for (Bundle b : bs) out.push_back(b.Items());
  return out;
}

std::vector<Bundle> BundlesFromJson(const json& j) {
  std::vector<Bundle> out;
  for (const json& items : j) {
    out.push_back(Bundle::FromItems(items.get<std::vector<int>>()));
  }
  return out;
}

}  // namespace

void WriteTraceCsv(std::ostream& out, const AuctionConfig& cfg,
                   const AuctionResult& result) {
  out << kTraceCsvMagic << '\n';
  out << "# scheme=" << ToString(cfg.fm.scheme())
      << " degree=" << cfg.fm.degree()
      << " personalized=" << (cfg.fm.personalized() ? 1 : 0)
      << " items=" << cfg.fm.item_count()
      << " agents=" << cfg.fm.agent_count() << " rounds=" << cfg.rounds
      << " lambda=" << Num(cfg.lambda) << " radius=" << Num(cfg.radius)
      << " seed=" << cfg.seed << '\n';
  out << kTraceCsvColumns << '\n';
  for (const RoundTrace& r : result.trace) {
    out << r.t << ',' << Num(r.eta) << ',' << Num(r.gamma) << ','
        << Num(Norm2(r.w)) << ',' << Num(Norm2(r.g)) << ','
        << (r.objective ? Num(*r.objective) : "") << ','
        << (r.cleared ? 1 : 0) << '\n';
  }
}

TraceCsv ReadTraceCsv(std::istream& in) {
  TraceCsv trace;
  std::string line;
  if (!std::getline(in, line) || line != kTraceCsvMagic) {
    throw InvalidInputError("not a clockforge v1 trace (bad first line)");
  }
  int lineno = 1;
  bool columns = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string kv;
      while (ss >> kv) {
        const auto eq = kv.find('=');
        if (eq != std::string::npos) {
          trace.meta[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
      }
      continue;
    }
    if (!columns) {
      if (line != kTraceCsvColumns) {
        throw InvalidInputError("trace line " + std::to_string(lineno) +
                                ": unexpected columns \"" + line + "\"");
      }
      columns = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 7) {
      throw InvalidInputError("trace line " + std::to_string(lineno) +
                              ": expected 7 fields");
    }
    TraceCsvRow row;
    row.t = static_cast<int>(ParseNum(f[0], lineno));
    row.eta = ParseNum(f[1], lineno);
    row.gamma = ParseNum(f[2], lineno);
    row.w_norm = ParseNum(f[3], lineno);
    row.g_norm = ParseNum(f[4], lineno);
    if (!f[5].empty()) row.objective = ParseNum(f[5], lineno);
    row.cleared = f[6] == "1";
    trace.rows.push_back(row);
  }
  if (!columns) throw InvalidInputError("trace has no column header");
  return trace;
}

std::vector<std::string> CheckTraceCsv(const TraceCsv& trace) {
  std::vector<std::string> out;
  double radius = std::numeric_limits<double>::infinity();
  if (auto it = trace.meta.find("radius"); it != trace.meta.end()) {
    radius = std::stod(it->second);
  }
  int last = 0;
  for (const TraceCsvRow& r : trace.rows) {
    const std::string at = "t=" + std::to_string(r.t) + ": ";
    if (r.t <= last) out.push_back(at + "round index not increasing");
    last = r.t;
    if (!(r.gamma > 0.0 && r.gamma <= 1.0)) {
      out.push_back(at + "gamma outside (0, 1]");
    }
    if (!(r.eta > 0.0)) out.push_back(at + "non-positive step");
    if (r.t == 1 && r.w_norm != 0.0) out.push_back(at + "w^1 is not zero");
    if (r.t >= 2 && r.w_norm > radius * (1.0 + 1e-12)) {
      out.push_back(at + "iterate outside the radius");
    }
  }
  return out;
}

void WriteTraceJson(std::ostream& out, const PricingSpec& pricing,
                    const AuctionConfig& cfg, const AuctionResult& result) {
  json j;
  j["format"] = "clockforge-trace";
  j["version"] = 1;
  j["items"] = cfg.fm.item_count();
  j["agents"] = cfg.fm.agent_count();
  j["pricing"] = {{"scheme", ToString(pricing.scheme)},
                  {"degree", pricing.degree},
                  {"personalized", pricing.personalized}};
  if (!pricing.bundles.empty()) {
    j["pricing"]["bundles"] = BundlesJson(pricing.bundles);
  }
  j["bundle_set"] = BundlesJson(cfg.fm.bundles());
  j["lambda"] = cfg.lambda;
  j["radius"] = cfg.radius;
  j["seed"] = cfg.seed;
  j["averaged_w"] = result.averaged_w;
  json rounds = json::array();
  for (const RoundTrace& r : result.trace) {
    json e;
    e["t"] = r.t;
    e["eta"] = r.eta;
    e["gamma"] = r.gamma;
    e["w"] = r.w;
    e["g"] = r.g;
    e["bids"] = BundlesJson(r.bids.bundles);
    e["allocation"] = BundlesJson(r.allocation.bundles);
    e["objective"] = r.objective ? json(*r.objective) : json(nullptr);
    e["cleared"] = r.cleared;
    rounds.push_back(std::move(e));
  }
  j["rounds"] = std::move(rounds);
  out << j.dump() << '\n';
}

LoadedTrace ReadTraceJson(std::istream& in) {
  LoadedTrace t;
  try {
    const json j = json::parse(in);
    if (j.at("format") != "clockforge-trace" || j.at("version") != 1) {
      throw InvalidInputError("not a clockforge v1 JSON trace");
    }
    t.items = j.at("items").get<int>();
    t.agents = j.at("agents").get<int>();
    const json& p = j.at("pricing");
    const std::string scheme = p.at("scheme").get<std::string>();
    t.pricing.scheme = scheme == "linear" ? PricingScheme::kLinear
                       : scheme == "poly" ? PricingScheme::kPolynomial
                                          : PricingScheme::kBundle;
    if (scheme != "linear" && scheme != "poly" && scheme != "bundle") {
      throw InvalidInputError("unknown scheme " + scheme);
    }
    t.pricing.degree = p.value("degree", 1);
    t.pricing.personalized = p.value("personalized", false);
    if (p.contains("bundles")) t.pricing.bundles = BundlesFromJson(p["bundles"]);
    t.lambda = j.at("lambda").get<double>();
    t.radius = j.at("radius").get<double>();
    for (const json& e : j.at("rounds")) {
      RoundTrace r;
      r.t = e.at("t").get<int>();
      r.eta = e.at("eta").get<double>();
      r.gamma = e.at("gamma").get<double>();
      r.w = e.at("w").get<PriceParams>();
      r.g = e.at("g").get<PriceParams>();
      r.bids.bundles = BundlesFromJson(e.at("bids"));
      r.allocation.bundles = BundlesFromJson(e.at("allocation"));
      if (e.contains("objective") && !e["objective"].is_null()) {
        r.objective = e["objective"].get<double>();
      }
      r.cleared = e.at("cleared").get<bool>();
      t.rounds.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("malformed JSON trace: ") + e.what());
  }
  return t;
}

History HistoryFromTrace(const LoadedTrace& trace) {
  const FeatureMap fm = trace.BuildFeatureMap();
  History h(trace.agents, trace.items);
  for (const RoundTrace& r : trace.rounds) h.Append(r.t, r.bids, fm, r.w);
  return h;
}

}  // namespace clockforge

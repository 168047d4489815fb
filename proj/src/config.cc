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


#include "clockforge/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "clockforge/verify.h"

namespace clockforge {

using nlohmann::json;

namespace {

std::string JoinViolations(const std::vector<std::string>& v) {
  std::string out = "invalid config:";
  for (const auto& s : v) out += "\n  " + s;
  return out;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Walks a JSON document and records violations instead of throwing.
class Reader {
 public:
  std::vector<std::string> errors;

  void Fail(const std::string& ptr, const std::string& what) {
    errors.push_back((ptr.empty() ? "/" : ptr) + ": " + what);
  }

  bool IsObject(const json& j, const std::string& ptr) {
    if (j.is_object()) return true;
    Fail(ptr, "expected an object");
    return false;
  }

  void Known(const json& j, const std::string& ptr,
             std::initializer_list<const char*> keys) {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
      if (!allowed.count(k)) Fail(ptr + "/" + k, "unknown field");
    }
  }

  template <class T>
  std::optional<T> Get(const json& j, const std::string& key,
                       const std::string& ptr, bool required) {
    const std::string p = ptr + "/" + key;
    if (!j.contains(key) || j.at(key).is_null()) {
      if (required) Fail(p, "missing field");
      return std::nullopt;
    }
    const json& v = j.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) return Bad<T>(p, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) return Bad<T>(p, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() &&
            v.get<long long>() < 0) {
          return Bad<T>(p, "expected a non-negative integer");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) return Bad<T>(p, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) return Bad<T>(p, "expected a string");
    }
    return v.get<T>();
  }

 private:
  template <class T>
  std::optional<T> Bad(const std::string& p, const std::string& what) {
    Fail(p, what);
    return std::nullopt;
  }
};

std::optional<Bundle> ParseBundle(Reader& r, const json& j,
                                  const std::string& ptr, int items) {
  if (!j.is_array()) {
    r.Fail(ptr, "expected an item list");
    return std::nullopt;
  }
  std::uint32_t mask = 0;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string p = ptr + "/" + std::to_string(k);
    if (!j[k].is_number_integer()) {
      r.Fail(p, "expected an item index");
      return std::nullopt;
    }
    const long long item = j[k].get<long long>();
    if (item < 0 || item >= items) {
      r.Fail(p, "item " + std::to_string(item) + " outside 0.." +
                    std::to_string(items - 1));
      return std::nullopt;
    }
    mask |= 1u << item;
  }
  return Bundle(mask);
}

PricingSpec ParsePricing(Reader& r, const json& j, const std::string& ptr,
                         int items) {
  PricingSpec spec;
  if (!r.IsObject(j, ptr)) return spec;
  r.Known(j, ptr, {"scheme", "degree", "personalized", "bundles"});
  const auto scheme = r.Get<std::string>(j, "scheme", ptr, true);
  if (scheme) {
    if (*scheme == "linear") {
      spec.scheme = PricingScheme::kLinear;
    } else if (*scheme == "poly") {
      spec.scheme = PricingScheme::kPolynomial;
    } else if (*scheme == "bundle") {
      spec.scheme = PricingScheme::kBundle;
    } else {
      r.Fail(ptr + "/scheme", "unknown scheme \"" + *scheme +
                                  "\" (expected linear, poly or bundle)");
    }
  }
  if (spec.scheme == PricingScheme::kPolynomial) {
    if (auto d = r.Get<int>(j, "degree", ptr, true)) {
      if (*d < 1) {
        r.Fail(ptr + "/degree", "degree must be ≥ 1");
      } else if (*d > items) {
        r.Fail(ptr + "/degree", "degree must be ≤ the item count " +
                                    std::to_string(items));
      } else {
        spec.degree = *d;
      }
    }
  } else if (j.contains("degree") && spec.scheme == PricingScheme::kLinear) {
    if (auto d = r.Get<int>(j, "degree", ptr, false); d && *d != 1) {
      r.Fail(ptr + "/degree", "linear pricing has degree 1");
    }
  }
  if (auto p = r.Get<bool>(j, "personalized", ptr, false)) {
    spec.personalized = *p;
  }
  if (j.contains("bundles")) {
    const std::string bp = ptr + "/bundles";
    if (spec.scheme != PricingScheme::kBundle) {
      r.Fail(bp, "bundle restriction needs the bundle scheme");
    } else if (!j["bundles"].is_array() || j["bundles"].empty()) {
      r.Fail(bp, "expected a non-empty list of item lists");
    } else {
      for (std::size_t k = 0; k < j["bundles"].size(); ++k) {
        const std::string p = bp + "/" + std::to_string(k);
        auto b = ParseBundle(r, j["bundles"][k], p, items);
        if (b && b->empty()) {
          r.Fail(p, "the empty bundle is implicit");
        } else if (b) {
          spec.bundles.push_back(*b);
        }
      }
    }
  }
  return spec;
}

NoiseSpec ParseNoise(Reader& r, const json& j, const std::string& ptr) {
  NoiseSpec n;
  if (!r.IsObject(j, ptr)) return n;
  r.Known(j, ptr, {"family", "scale", "correlation"});
  if (auto f = r.Get<std::string>(j, "family", ptr, true)) {
    if (*f == "gumbel") {
      n.family = NoiseFamily::kGumbel;
    } else if (*f == "gaussian") {
      n.family = NoiseFamily::kGaussian;
    } else if (*f == "uniform") {
      n.family = NoiseFamily::kBoundedUniform;
    } else {
      r.Fail(ptr + "/family",
             "unknown noise family \"" + *f +
                 "\" (expected gumbel, gaussian or uniform)");
    }
  }
  if (auto s = r.Get<double>(j, "scale", ptr, true)) {
    if (!(*s > 0.0) || !std::isfinite(*s)) {
      r.Fail(ptr + "/scale", "scale must be positive");
    } else {
      n.scale = *s;
    }
  }
  if (auto c = r.Get<double>(j, "correlation", ptr, false)) {
    if (!(*c >= 0.0 && *c < 1.0)) {
      r.Fail(ptr + "/correlation", "correlation must lie in [0, 1)");
    } else {
      n.correlation = *c;
    }
  }
  return n;
}

BidderSpec ParseBidder(Reader& r, const json& j, const std::string& ptr,
                       const std::filesystem::path& base) {
  BidderSpec b;
  if (!r.IsObject(j, ptr)) return b;
  r.Known(j, ptr, {"model", "valuations", "noise", "inner", "seed"});
  if (auto m = r.Get<std::string>(j, "model", ptr, true)) {
    static const std::set<std::string> kModels = {
        "truthful", "stochastic", "oscillator", "garp", "random"};
    if (!kModels.count(*m)) {
      r.Fail(ptr + "/model", "unknown model \"" + *m + "\"");
    }
    b.model = *m;
  }
  if (auto s = r.Get<std::uint64_t>(j, "seed", ptr, false)) b.seed = *s;
  const bool needs_values = b.model == "truthful" || b.model == "stochastic";
  if (auto v = r.Get<std::string>(j, "valuations", ptr, needs_values)) {
    std::filesystem::path path = *v;
    if (path.is_relative() && !base.empty()) path = base / path;
    if (!std::filesystem::exists(path)) {
      r.Fail(ptr + "/valuations", "file not found: " + path.string());
    }
    b.valuations = path.string();
  }
  if (b.model == "stochastic") {
    if (!j.contains("noise")) {
      r.Fail(ptr + "/noise", "missing field");
    } else {
      b.noise = ParseNoise(r, j["noise"], ptr + "/noise");
    }
  }
  if (b.model == "garp") {
    if (!j.contains("inner")) {
      r.Fail(ptr + "/inner", "missing field");
    } else {
      b.inner = std::make_shared<BidderSpec>(
          ParseBidder(r, j["inner"], ptr + "/inner", base));
      if (b.inner->model == "garp") {
        r.Fail(ptr + "/inner/model", "GARP wrappers do not nest");
      }
    }
  }
  return b;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : InvalidConfigError(JoinViolations(violations)),
      violations_(std::move(violations)) {}

FeatureMap PricingSpec::Build(int items, int agents) const {
  return FeatureMap(scheme, items, agents,
                    scheme == PricingScheme::kPolynomial ? degree : 1,
                    personalized, bundles);
}

std::string PricingSpec::Tag() const {
  std::string tag = scheme == PricingScheme::kLinear       ? "linear"
                    : scheme == PricingScheme::kPolynomial ? "poly" +
                                                                 std::to_string(degree)
                                                           : "bundle";
  if (personalized) tag += "-pers";
  return tag;
}

ExperimentConfig ParseConfig(const std::string& json_text,
                             const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("/: malformed JSON: ") + e.what()});
  }
  Reader r;
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  if (!r.IsObject(j, "")) throw ConfigError(r.errors);
  r.Known(j, "", {"schema_version", "items", "agents", "pricing", "auction",
                  "bidder", "sweep", "output", "verify"});

  if (auto v = r.Get<int>(j, "schema_version", "", true)) {
    if (*v != kConfigSchemaVersion) {
      r.Fail("/schema_version", "unsupported schema version " +
                                    std::to_string(*v));
    }
  }
  if (auto m = r.Get<int>(j, "items", "", true)) {
    if (*m < 1 || *m > kMaxItems) {
      r.Fail("/items", "items must lie in 1.." + std::to_string(kMaxItems));
    } else {
      cfg.items = *m;
    }
  }
  if (auto n = r.Get<int>(j, "agents", "", true)) {
    if (*n < 1) {
      r.Fail("/agents", "agents must be ≥ 1");
    } else {
      cfg.agents = *n;
    }
  }
  if (!j.contains("pricing")) {
    r.Fail("/pricing", "missing field");
  } else {
    cfg.pricing = ParsePricing(r, j["pricing"], "/pricing", cfg.items);
  }

  if (j.contains("auction") && r.IsObject(j["auction"], "/auction")) {
    const json& a = j["auction"];
    const std::string p = "/auction";
    r.Known(a, p, {"rounds", "lambda", "radius", "step", "clearing_epsilon",
                   "early_stop", "objective_every", "max_exact_items"});
    if (auto t = r.Get<int>(a, "rounds", p, true)) {
      if (*t < 1) r.Fail(p + "/rounds", "rounds must be ≥ 1");
      cfg.rounds = *t;
    }
    if (auto l = r.Get<double>(a, "lambda", p, false)) {
      if (!(*l >= 0.0)) r.Fail(p + "/lambda", "lambda must be ≥ 0");
      cfg.lambda = *l;
    }
    if (auto rad = r.Get<double>(a, "radius", p, false)) {
      if (!(*rad > 0.0)) r.Fail(p + "/radius", "radius must be positive");
      cfg.radius = *rad;
    }
    if (auto e = r.Get<double>(a, "clearing_epsilon", p, false)) {
      if (!(*e >= 0.0)) {
        r.Fail(p + "/clearing_epsilon", "clearing_epsilon must be ≥ 0");
      }
      cfg.clearing_epsilon = *e;
    }
    if (auto b = r.Get<bool>(a, "early_stop", p, false)) cfg.early_stop = *b;
    if (auto k = r.Get<int>(a, "objective_every", p, false)) {
      if (*k < 0) r.Fail(p + "/objective_every", "must be ≥ 0");
      cfg.objective_every = *k;
    }
    if (auto c = r.Get<int>(a, "max_exact_items", p, false)) {
      if (*c < 1) r.Fail(p + "/max_exact_items", "must be ≥ 1");
      cfg.max_exact_items = *c;
    }
    if (a.contains("step") && r.IsObject(a["step"], p + "/step")) {
      const json& s = a["step"];
      const std::string sp = p + "/step";
      r.Known(s, sp, {"rule", "scale", "steps"});
      if (auto rule = r.Get<std::string>(s, "rule", sp, true)) {
        if (*rule == "v_over_sqrt_t") {
          if (auto c = r.Get<double>(s, "scale", sp, false)) {
            if (!(*c > 0.0)) r.Fail(sp + "/scale", "scale must be positive");
            cfg.step.scale = *c;
          }
        } else if (*rule == "explicit") {
          cfg.step.explicit_schedule = true;
          if (!s.contains("steps") || !s["steps"].is_array() ||
              s["steps"].empty()) {
            r.Fail(sp + "/steps", "expected a non-empty list of step sizes");
          } else {
            for (std::size_t k = 0; k < s["steps"].size(); ++k) {
              const json& e = s["steps"][k];
              if (!e.is_number() || !(e.get<double>() > 0.0)) {
                r.Fail(sp + "/steps/" + std::to_string(k),
                       "step sizes must be positive numbers");
              } else {
                cfg.step.steps.push_back(e.get<double>());
              }
            }
          }
        } else {
          r.Fail(sp + "/rule", "unknown step rule \"" + *rule +
                                   "\" (expected v_over_sqrt_t or explicit)");
        }
      }
    }
  } else if (!j.contains("auction")) {
    r.Fail("/auction", "missing field");
  }

  if (!j.contains("bidder")) {
    r.Fail("/bidder", "missing field");
  } else {
    cfg.bidder = ParseBidder(r, j["bidder"], "/bidder", base_dir);
  }

  if (j.contains("sweep") && r.IsObject(j["sweep"], "/sweep")) {
    const json& s = j["sweep"];
    r.Known(s, "/sweep", {"seeds", "rounds", "schemes"});
    auto list = [&](const char* key) -> const json* {
      if (!s.contains(key)) return nullptr;
      const std::string p = std::string("/sweep/") + key;
      if (!s[key].is_array() || s[key].empty()) {
        r.Fail(p, "sweep lists must be non-empty arrays");
        return nullptr;
      }
      return &s[key];
    };
    if (const json* seeds = list("seeds")) {
      for (std::size_t k = 0; k < seeds->size(); ++k) {
        if (!(*seeds)[k].is_number_unsigned()) {
          r.Fail("/sweep/seeds/" + std::to_string(k),
                 "expected a non-negative integer");
        } else {
          cfg.seeds.push_back((*seeds)[k].get<std::uint64_t>());
        }
      }
    }
    if (const json* ts = list("rounds")) {
      for (std::size_t k = 0; k < ts->size(); ++k) {
        if (!(*ts)[k].is_number_integer() || (*ts)[k].get<long long>() < 1) {
          r.Fail("/sweep/rounds/" + std::to_string(k),
                 "expected a positive integer");
        } else {
          cfg.horizons.push_back((*ts)[k].get<int>());
        }
      }
    }
    if (const json* schemes = list("schemes")) {
      for (std::size_t k = 0; k < schemes->size(); ++k) {
        cfg.schemes.push_back(ParsePricing(
            r, (*schemes)[k], "/sweep/schemes/" + std::to_string(k),
            cfg.items));
      }
    }
  }
  if (j.contains("output") && r.IsObject(j["output"], "/output")) {
    const json& o = j["output"];
    r.Known(o, "/output", {"dir", "full_json"});
    if (auto d = r.Get<std::string>(o, "dir", "/output", false)) {
      cfg.output_dir = *d;
    }
    if (auto f = r.Get<bool>(o, "full_json", "/output", false)) {
      cfg.full_json = *f;
    }
  }
  if (j.contains("verify") && r.IsObject(j["verify"], "/verify")) {
    const json& v = j["verify"];
    r.Known(v, "/verify", {"reference_factor", "objective_samples"});
    if (auto f = r.Get<int>(v, "reference_factor", "/verify", false)) {
      if (*f < 1) r.Fail("/verify/reference_factor", "must be ≥ 1");
      cfg.reference_factor = *f;
    }
    if (auto k = r.Get<int>(v, "objective_samples", "/verify", false)) {
      if (*k < 1) r.Fail("/verify/objective_samples", "must be ≥ 1");
      cfg.objective_samples = *k;
    }
  }
  if (cfg.bidder.model == "oscillator" &&
      (cfg.agents != 2 || cfg.items != 1)) {
    r.Fail("/bidder/model", "the oscillator needs agents = 2 and items = 1");
  }
  if (!r.errors.empty()) throw ConfigError(r.errors);

  if (cfg.seeds.empty()) cfg.seeds.push_back(cfg.bidder.seed);
  if (cfg.horizons.empty()) cfg.horizons.push_back(cfg.rounds);
  if (cfg.schemes.empty()) cfg.schemes.push_back(cfg.pricing);
  if (cfg.output_dir.is_relative() && !base_dir.empty()) {
    cfg.output_dir = base_dir / cfg.output_dir;
  }

  // Surface run-time warnings (lambda > 1/V) at load time.
  const std::vector<CellPlan> cells = PlanCells(cfg);
  cfg.warnings = PrepareCell(cfg, cells.front()).warnings;
  return cfg;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  return ParseConfig(ReadFile(path), path.parent_path());
}

ValuationProfile ParseValuations(const std::string& json_text, int agents,
                                 int items) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInputError(std::string("malformed valuation JSON: ") +
                            e.what());
  }
  if (!j.is_array()) {
    throw InvalidInputError("valuations must be a list of entries");
  }
  if (j.size() > kMaxValuationEntries) {
    throw CapacityError("valuation file has " + std::to_string(j.size()) +
                        " entries; the cap is " +
                        std::to_string(kMaxValuationEntries));
  }
  Reader r;
  ValuationProfile v(agents, items);
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string p = "/" + std::to_string(k);
    const json& e = j[k];
    if (!r.IsObject(e, p)) continue;
    r.Known(e, p, {"agent", "bundle", "value"});
    const auto agent = r.Get<int>(e, "agent", p, true);
    const auto value = r.Get<double>(e, "value", p, true);
    std::optional<Bundle> bundle;
    if (!e.contains("bundle")) {
      r.Fail(p + "/bundle", "missing field");
    } else {
      bundle = ParseBundle(r, e["bundle"], p + "/bundle", items);
    }
    if (!agent || !value || !bundle) continue;
    if (*agent < 0 || *agent >= agents) {
      r.Fail(p + "/agent", "agent outside 0.." + std::to_string(agents - 1));
      continue;
    }
    try {
      v.Set(*agent, *bundle, *value);
    } catch (const InvalidInputError& err) {
      r.Fail(p, err.what());
    }
  }
  if (!r.errors.empty()) {
    std::string msg = "invalid valuations:";
    for (const auto& s : r.errors) msg += "\n  " + s;
    throw InvalidInputError(msg);
  }
  return v;
}

ValuationProfile LoadValuations(const std::filesystem::path& path, int agents,
                                int items) {
  return ParseValuations(ReadFile(path), agents, items);
}

std::string ValuationsToJson(const ValuationProfile& v) {
  json out = json::array();
  for (int i = 0; i < v.agent_count(); ++i) {
    for (const auto& [x, value] : v.Entries(i)) {
      out.push_back({{"agent", i}, {"bundle", x.Items()}, {"value", value}});
    }
  }
  return out.dump(2);
}

std::vector<CellPlan> PlanCells(const ExperimentConfig& cfg) {
  std::vector<CellPlan> cells;
  for (const PricingSpec& scheme : cfg.schemes) {
    for (int t : cfg.horizons) {
      for (std::uint64_t seed : cfg.seeds) {
        CellPlan c{seed, t, scheme, ""};
        c.name = "cell-" + scheme.Tag() + "-T" + std::to_string(t) + "-s" +
                 std::to_string(seed);
        cells.push_back(std::move(c));
      }
    }
  }
  return cells;
}

namespace {

double SpecScale(const ExperimentConfig& cfg, const BidderSpec& spec,
                 const FeatureMap& fm,
                 std::optional<ValuationProfile>* valuation) {
  if (spec.model == "garp") return SpecScale(cfg, *spec.inner, fm, valuation);
  if (spec.model == "oscillator" || spec.model == "random") return 1.0;
  ValuationProfile v = LoadValuations(*spec.valuations, cfg.agents, cfg.items);
  double scale = v.MaxAbs();
  if (spec.model == "stochastic") {
    scale = VBound(spec.noise, scale, cfg.agents, fm.bundles().size());
  }
  if (valuation) *valuation = std::move(v);
  return scale > 0.0 ? scale : 1.0;
}

}  // namespace

std::unique_ptr<BidderModel> MakeBidder(const ExperimentConfig& cfg,
                                        const BidderSpec& spec,
                                        const FeatureMap& fm,
                                        const StepSchedule& steps,
                                        std::uint64_t seed) {
  if (spec.model == "truthful" || spec.model == "stochastic") {
    const ValuationProfile v =
        LoadValuations(*spec.valuations, cfg.agents, cfg.items);
    if (spec.model == "truthful") {
      return std::make_unique<TruthfulBidder>(fm, v);
    }
    return std::make_unique<StochasticBidder>(fm, v, spec.noise, seed);
  }
  if (spec.model == "oscillator") {
    return std::make_unique<OscillatorBidder>(fm, steps);
  }
  if (spec.model == "random") return std::make_unique<RandomBidder>(fm, seed);
  if (spec.model == "garp") {
    return std::make_unique<GarpConstrainedBidder>(
        fm, MakeBidder(cfg, *spec.inner, fm, steps, seed));
  }
  throw InvalidConfigError("unknown bidder model " + spec.model);
}

PreparedCell PrepareCell(const ExperimentConfig& cfg, const CellPlan& cell) {
  PreparedCell out;
  AuctionConfig& a = out.auction;
  a.fm = cell.pricing.Build(cfg.items, cfg.agents);
  out.valuation_scale = SpecScale(cfg, cfg.bidder, a.fm, &out.valuation);
  const double v = out.valuation_scale;
  a.rounds = cell.rounds;
  a.lambda = cfg.lambda;
  a.radius = cfg.radius.value_or(SelectRadius(a.fm, v));
  a.step = cfg.step.explicit_schedule
               ? StepSchedule::Explicit(cfg.step.steps)
               : StepSchedule::InverseSqrt(cfg.step.scale.value_or(v));
  a.seed = cell.seed;
  a.clearing_epsilon = cfg.clearing_epsilon.value_or(1e-6 * v);
  a.early_stop = cfg.early_stop;
  a.objective_every = cfg.objective_every;
  a.max_exact_items = cfg.max_exact_items;
  out.warnings = a.Validate(v);
  out.bidder = MakeBidder(cfg, cfg.bidder, a.fm, a.step, cell.seed);
  return out;
}

}  // namespace clockforge

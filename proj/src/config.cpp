#include "crossdiff/config.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "crossdiff/error.hpp"

namespace crossdiff {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError("invalid_config", where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) {
      throw ConfigError("unknown_key", "unknown key '" + key + "' in " + where);
    }
  }
}

double number(const json& obj, const std::string& key, const std::string& where,
              std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("missing_key", "missing '" + key + "' in " + where);
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("invalid_type", where + "." + key + " must be a number");
  return v.get<double>();
}

int integer(const json& obj, const std::string& key, const std::string& where, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError("invalid_type", where + "." + key + " must be an integer");
  }
  return v.get<int>();
}

std::string text(const json& obj, const std::string& key, const std::string& where,
                 const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError("invalid_type", where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) return {};
  const json& v = obj.at(key);
  if (!v.is_array()) throw ConfigError("invalid_type", where + "." + key + " must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError("invalid_type", where + "." + key + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

ReactionParams parse_reaction(const json& j) {
  reject_unknown(j, "reaction", {"r_u", "r_v", "r11", "r12", "r21", "r22", "d_u", "d_v", "d12"});
  ReactionParams p;
  p.r_u = number(j, "r_u", "reaction");
  p.r_v = number(j, "r_v", "reaction");
  p.r11 = number(j, "r11", "reaction");
  p.r12 = number(j, "r12", "reaction");
  p.r21 = number(j, "r21", "reaction");
  p.r22 = number(j, "r22", "reaction");
  p.d_u = number(j, "d_u", "reaction", 1.0);
  p.d_v = number(j, "d_v", "reaction", 1.0);
  p.d12 = number(j, "d12", "reaction", 0.0);
  p.validate();
  return p;
}

TransitionRates parse_rates(const json& j, const ReactionParams& p, bool dds) {
  if (j.is_null()) {
    if (dds) return TransitionRates(Affine{1.0, 1.0});
    return TransitionRates(SktLinear{1.1 * p.r_v / p.r22});
  }
  const std::string family = text(j, "family", "rates", "");
  if (family == "skt_linear") {
    reject_unknown(j, "rates", {"family", "M"});
    return TransitionRates(SktLinear{number(j, "M", "rates", 1.1 * p.r_v / p.r22)});
  }
  if (family == "affine") {
    reject_unknown(j, "rates", {"family", "A", "B"});
    return TransitionRates(Affine{number(j, "A", "rates"), number(j, "B", "rates")});
  }
  if (family == "power_law") {
    reject_unknown(j, "rates", {"family", "A", "B", "alpha", "beta"});
    return TransitionRates(PowerLaw{number(j, "A", "rates"), number(j, "B", "rates"),
                                    number(j, "alpha", "rates"), number(j, "beta", "rates")});
  }
  if (family == "custom") {
    reject_unknown(j, "rates", {"family", "w", "h", "k"});
    return TransitionRates(
        Custom{numbers(j, "w", "rates"), numbers(j, "h", "rates"), numbers(j, "k", "rates")});
  }
  throw ConfigError("unknown_rate_family", "unknown rate family '" + family + "'");
}

json rates_json(const TransitionRates& r) {
  return std::visit(
      [](const auto& f) -> json {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, SktLinear>) {
          return {{"family", "skt_linear"}, {"M", f.M}};
        } else if constexpr (std::is_same_v<F, Affine>) {
          return {{"family", "affine"}, {"A", f.A}, {"B", f.B}};
        } else if constexpr (std::is_same_v<F, PowerLaw>) {
          return {{"family", "power_law"}, {"A", f.A}, {"B", f.B}, {"alpha", f.alpha},
                  {"beta", f.beta}};
        } else {
          return {{"family", "custom"}, {"w", f.w}, {"h", f.h}, {"k", f.k}};
        }
      },
      r.family());
}

// Uniform double in [0, 1) from the top 53 bits; identical across platforms.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

RunConfig parse_config(const json& doc) {
  reject_unknown(doc, "config",
                 {"schema_version", "model", "reaction", "rates", "dds", "grid", "time",
                  "initial", "perturbation", "dispersion", "sweep", "analysis", "seed"});
  if (!doc.contains("schema_version") || !doc.at("schema_version").is_number_integer()) {
    throw ConfigError("missing_schema_version", "config needs an integer schema_version");
  }
  if (doc.at("schema_version").get<int>() != kSchemaVersion) {
    throw ConfigError("unsupported_schema_version",
                      "schema_version must be " + std::to_string(kSchemaVersion));
  }
  if (!doc.contains("reaction")) throw ConfigError("missing_key", "missing 'reaction'");

  RunConfig cfg;
  const json model = doc.value("model", json::object());
  reject_unknown(model, "model", {"variant", "epsilon"});
  cfg.model.variant = variant_from_string(text(model, "variant", "model", "skt_plus_limit"));
  cfg.model.epsilon = number(model, "epsilon", "model", cfg.model.is_fast() ? 1e-2 : 0.0);
  cfg.model.reaction = parse_reaction(doc.at("reaction"));
  if (doc.contains("dds")) {
    const json& d = doc.at("dds");
    reject_unknown(d, "dds", {"a", "b", "c", "d", "d_a", "d_b"});
    DdsParams dp;
    dp.a = number(d, "a", "dds");
    dp.b = number(d, "b", "dds");
    dp.c = number(d, "c", "dds", 0.0);
    dp.d = number(d, "d", "dds");
    dp.d_a = number(d, "d_a", "dds");
    dp.d_b = number(d, "d_b", "dds");
    dp.validate();
    cfg.model.dds = dp;
  }
  cfg.model.rates = parse_rates(doc.value("rates", json()), cfg.model.reaction, cfg.model.is_dds());
  cfg.model.validate();

  const json grid = doc.value("grid", json::object());
  reject_unknown(grid, "grid", {"L", "N"});
  cfg.length = number(grid, "L", "grid", 10.0);
  cfg.cells = integer(grid, "N", "grid", 128);
  (void)cfg.grid();

  const json time = doc.value("time", json::object());
  reject_unknown(time, "time", {"t_end", "dt_max", "safety", "snapshot_every", "scheme"});
  cfg.t_end = number(time, "t_end", "time", 100.0);
  if (!(cfg.t_end > 0.0)) throw ConfigError("invalid_t_end", "time.t_end must be > 0");
  cfg.controls.dt_max = number(time, "dt_max", "time", 1e-2);
  cfg.controls.safety = number(time, "safety", "time", 0.9);
  cfg.controls.snapshot_every = number(time, "snapshot_every", "time", 1.0);
  cfg.controls.scheme = time_scheme_from_string(text(time, "scheme", "time", "rk4"));
  cfg.controls.validate();

  const json init = doc.value("initial", json::object());
  reject_unknown(init, "initial", {"kind", "u", "v"});
  cfg.base.kind = text(init, "kind", "initial", "coexistence");
  if (cfg.base.kind == "explicit") {
    cfg.base.u = number(init, "u", "initial");
    cfg.base.v = number(init, "v", "initial");
    if (!(cfg.base.u >= 0.0) || !(cfg.base.v >= 0.0)) {
      throw ConfigError("invalid_initial", "initial densities must be >= 0");
    }
  } else if (cfg.base.kind == "coexistence") {
    const Equilibrium eq = coexistence(cfg.model.reaction);
    cfg.base.u = eq.u;
    cfg.base.v = eq.v;
  } else {
    throw ConfigError("invalid_initial", "initial.kind must be coexistence or explicit");
  }

  const json pert = doc.value("perturbation", json::object());
  reject_unknown(pert, "perturbation", {"kind", "mode", "amplitude", "field"});
  cfg.perturbation.kind = text(pert, "kind", "perturbation", "cosine");
  cfg.perturbation.mode = integer(pert, "mode", "perturbation", 1);
  cfg.perturbation.amplitude = number(pert, "amplitude", "perturbation", 1e-3);
  cfg.perturbation.field = text(pert, "field", "perturbation", "u");
  if (cfg.perturbation.kind != "cosine" && cfg.perturbation.kind != "noise" &&
      cfg.perturbation.kind != "none") {
    throw ConfigError("invalid_perturbation", "perturbation.kind must be cosine, noise or none");
  }
  if (cfg.perturbation.field != "u" && cfg.perturbation.field != "v") {
    throw ConfigError("invalid_perturbation", "perturbation.field must be u or v");
  }
  if (cfg.perturbation.mode < 0 || !(cfg.perturbation.amplitude >= 0.0) ||
      cfg.perturbation.amplitude >= 1.0) {
    throw ConfigError("invalid_perturbation", "need mode >= 0 and 0 <= amplitude < 1");
  }

  const json disp = doc.value("dispersion", json::object());
  reject_unknown(disp, "dispersion", {"lambda_min", "lambda_max", "points"});
  cfg.dispersion.lambda_min = number(disp, "lambda_min", "dispersion", 0.0);
  if (disp.contains("lambda_max")) cfg.dispersion.lambda_max = number(disp, "lambda_max", "dispersion");
  cfg.dispersion.points = integer(disp, "points", "dispersion", 401);
  if (cfg.dispersion.points < 2 || cfg.dispersion.lambda_min < 0.0 ||
      (cfg.dispersion.lambda_max && !(*cfg.dispersion.lambda_max > cfg.dispersion.lambda_min))) {
    throw ConfigError("invalid_dispersion_range", "need points >= 2 and 0 <= lambda_min < lambda_max");
  }

  const json sweep = doc.value("sweep", json::object());
  reject_unknown(sweep, "sweep", {"epsilons", "d12", "norm"});
  cfg.sweep.epsilons = numbers(sweep, "epsilons", "sweep");
  cfg.sweep.d12 = numbers(sweep, "d12", "sweep");
  cfg.sweep.norm = gap_norm_from_string(text(sweep, "norm", "sweep", "l2_final"));

  const json an = doc.value("analysis", json::object());
  reject_unknown(an, "analysis", {"fit_mode", "fit_lower", "fit_upper", "steady_window",
                                  "steady_tol"});
  cfg.analysis.fit_mode = integer(an, "fit_mode", "analysis", cfg.perturbation.mode > 0 ? cfg.perturbation.mode : 1);
  if (an.contains("fit_lower")) cfg.analysis.window.lower = number(an, "fit_lower", "analysis");
  if (an.contains("fit_upper")) cfg.analysis.window.upper = number(an, "fit_upper", "analysis");
  cfg.analysis.steady_window = number(an, "steady_window", "analysis", 50.0);
  cfg.analysis.steady_tol = number(an, "steady_tol", "analysis", 1e-6);
  if (!(cfg.analysis.steady_window > 0.0) || !(cfg.analysis.steady_tol > 0.0)) {
    throw ConfigError("invalid_analysis", "steady_window and steady_tol must be > 0");
  }

  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) {
      throw ConfigError("invalid_type", "seed must be a non-negative integer");
    }
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config_not_found", "cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config_parse_error", e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& cfg) {
  const auto& p = cfg.model.reaction;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["model"] = {{"variant", std::string(to_string(cfg.model.variant))},
                {"epsilon", cfg.model.epsilon}};
  j["reaction"] = {{"r_u", p.r_u}, {"r_v", p.r_v}, {"r11", p.r11}, {"r12", p.r12},
                   {"r21", p.r21}, {"r22", p.r22}, {"d_u", p.d_u}, {"d_v", p.d_v},
                   {"d12", p.d12}};
  j["rates"] = rates_json(cfg.model.rates);
  if (cfg.model.dds) {
    const auto& d = *cfg.model.dds;
    j["dds"] = {{"a", d.a}, {"b", d.b}, {"c", d.c}, {"d", d.d}, {"d_a", d.d_a}, {"d_b", d.d_b}};
  }
  j["grid"] = {{"L", cfg.length}, {"N", cfg.cells}};
  j["time"] = {{"t_end", cfg.t_end},
               {"dt_max", cfg.controls.dt_max},
               {"safety", cfg.controls.safety},
               {"snapshot_every", cfg.controls.snapshot_every},
               {"scheme", std::string(to_string(cfg.controls.scheme))}};
  j["initial"] = {{"kind", cfg.base.kind}, {"u", cfg.base.u}, {"v", cfg.base.v}};
  j["perturbation"] = {{"kind", cfg.perturbation.kind},
                       {"mode", cfg.perturbation.mode},
                       {"amplitude", cfg.perturbation.amplitude},
                       {"field", cfg.perturbation.field}};
  j["dispersion"] = {{"lambda_min", cfg.dispersion.lambda_min},
                     {"points", cfg.dispersion.points}};
  if (cfg.dispersion.lambda_max) j["dispersion"]["lambda_max"] = *cfg.dispersion.lambda_max;
  j["sweep"] = {{"epsilons", cfg.sweep.epsilons},
                {"d12", cfg.sweep.d12},
                {"norm", std::string(to_string(cfg.sweep.norm))}};
  j["analysis"] = {{"fit_mode", cfg.analysis.fit_mode},
                   {"steady_window", cfg.analysis.steady_window},
                   {"steady_tol", cfg.analysis.steady_tol}};
  if (cfg.analysis.window.lower) j["analysis"]["fit_lower"] = *cfg.analysis.window.lower;
  if (cfg.analysis.window.upper) j["analysis"]["fit_upper"] = *cfg.analysis.window.upper;
  j["seed"] = cfg.seed;
  return j;
}

std::string content_hash(const json& doc) {
  const std::string text = doc.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("hash_failed", "SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

SimState initial_state(const RunConfig& cfg) {
  const Grid1D grid = cfg.grid();
  SimState base = homogeneous_state(cfg.model.limit(), grid, cfg.base.u, cfg.base.v);
  const auto& pert = cfg.perturbation;
  Field& target = pert.field == "u" ? base.fields[0] : base.fields[1];
  const double ref = pert.field == "u" ? cfg.base.u : cfg.base.v;
  const double amp = pert.amplitude * ref;
  if (pert.kind == "cosine") {
    for (int i = 0; i < grid.cells(); ++i) {
      target[i] += amp * std::cos(pert.mode * std::numbers::pi * grid.x(i) / grid.length());
    }
  } else if (pert.kind == "noise") {
    std::mt19937_64 rng(cfg.seed);
    for (double& x : target) x += amp * (2.0 * unit(rng) - 1.0);
  }
  if (!cfg.model.is_fast()) return base;
  return matched_initial(cfg.model, cfg.model.limit(), base).first;
}

}  // namespace crossdiff

#include "crossdiff/cli.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "crossdiff/config.hpp"
#include "crossdiff/error.hpp"
#include "crossdiff/turing.hpp"

namespace crossdiff {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw ConfigError("io_error", "cannot write '" + path.string() + "'");
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  void row(const std::vector<double>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << num(cells[i]);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ConfigError("io_error", "cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json band_json(const std::optional<Band>& b) {
  if (!b) return nullptr;
  return {{"lambda_lo", b->lo}, {"lambda_hi", b->hi},
          {"homogeneous_unstable", b->homogeneous_unstable}};
}

json mat_json(const Mat2& m) { return json::array({{m.a11, m.a12}, {m.a21, m.a22}}); }

json coeffs_json(const DispersionCoeffs& c) {
  return {{"a2", c.a2}, {"b1", c.b1}, {"c0", c.c0}, {"dD_du", c.d1}, {"dD_dv", c.d2},
          {"d_v", c.d_v}, {"jacobian", mat_json(c.jac)}};
}

// Output context shared by every command.
struct Run {
  std::string command;
  fs::path dir;
  json manifest;
  std::vector<std::string> outputs;

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return dir / name;
  }
};

Run open_run(const CliOptions& opts, const json& identity) {
  Run run;
  run.command = opts.command;
  const std::string hash = content_hash(identity);
  run.dir = opts.out / hash.substr(0, 12);
  std::error_code ec;
  fs::create_directories(run.dir, ec);
  if (ec) throw ConfigError("io_error", "cannot create '" + run.dir.string() + "': " + ec.message());
  run.manifest = {{"command", opts.command},
                  {"config_hash", hash},
                  {"schema_version", kSchemaVersion},
                  {"version", kVersion}};
  if (identity.contains("config")) run.manifest["config"] = identity.at("config");
  return run;
}

void close_run(Run& run, const json& result) {
  run.manifest["outputs"] = run.outputs;
  run.manifest["result"] = result;
  run.manifest["created"] = utc_now();
  write_json(run.dir / "manifest.json", run.manifest);
}

Equilibrium require_coexistence(const ReactionParams& p) {
  const RegimeClass rc = classify_regime(p);
  if (rc.tag == Regime::NoCoexistence) {
    throw ConfigError("no_coexistence", "NoCoexistence: R, S, T do not share a sign (R=" +
                                            num(rc.rst.R) + ", S=" + num(rc.rst.S) +
                                            ", T=" + num(rc.rst.T) + ")");
  }
  return coexistence(p);
}

json cmd_analyze(const RunConfig& cfg, Run& run) {
  const auto& p = cfg.model.reaction;
  require_coexistence(p);
  const RegimeClass rc = classify_regime(p);
  json eqs = json::array();
  for (const auto& e : equilibria(p)) {
    const Mat2 j = jacobian(e.u, e.v, p);
    const auto re = eigen_real_parts(j);
    eqs.push_back({{"kind", std::string(to_string(e.kind))},
                   {"u", e.u},
                   {"v", e.v},
                   {"stability", std::string(to_string(e.stability))},
                   {"jacobian", mat_json(j)},
                   {"eigen_real_parts", {re[0], re[1]}}});
  }
  json report = {{"regime", std::string(to_string(rc.tag))},
                 {"R", rc.rst.R},
                 {"S", rc.rst.S},
                 {"T", rc.rst.T},
                 {"equilibria", eqs}};
  write_json(run.file("kinetics.json"), report);
  return report;
}

json cmd_threshold(const RunConfig& cfg, Run& run) {
  const auto& m = cfg.model;
  json report;
  if (m.is_dds()) {
    const Equilibrium eq = require_coexistence(m.reaction);
    const DdsCondition c = dds_necessary_condition(*m.dds, m.rates, eq);
    const DispersionCoeffs co = dispersion_coeffs(m.limit(), eq);
    const auto band = unstable_band(co);
    report = {{"model", "dds"},
              {"u_star", eq.u},
              {"v_star", eq.v},
              {"u_a", c.partition.u_a},
              {"u_b", c.partition.u_b},
              {"dQ_dv", c.dq3},
              {"lhs", c.lhs},
              {"necessary_condition", c.satisfied},
              {"coefficients", coeffs_json(co)},
              {"band", band_json(band)},
              {"unstable_modes", band ? unstable_modes(*band, cfg.length) : std::vector<int>{}}};
  } else if (m.limit_variant() == Variant::SktMinusLimit) {
    const HidingCheck h = hiding_stability_check(m.reaction, m.rates);
    report = {{"model", "skt_minus"},
              {"verdict", std::string(to_string(h.verdict))},
              {"reason", h.verdict == HidingVerdict::AlwaysStable ? "hiding_no_turing"
                                                                  : "counterexample"},
              {"b1", h.b1},
              {"b1_summands", {h.summands[0], h.summands[1], h.summands[2]}},
              {"dD_dv_sign", h.d2_sign},
              {"band", band_json(h.band)}};
  } else {
    const ThresholdReport r = turing_threshold_plus(m.reaction, m.rates, cfg.length);
    report = {{"model", "skt_plus"},
              {"u_star", r.u_star},
              {"v_star", r.v_star},
              {"det_j", r.det_j},
              {"phi_star", r.phi_star},
              {"phi_prime_star", r.phi_prime_star},
              {"alpha", r.alpha},
              {"beta", r.beta},
              {"tilde_d12", r.tilde_d12},
              {"q2", r.q2},
              {"q1", r.q1},
              {"q0", r.q0},
              {"d12_minus", r.d12_minus},
              {"d12_plus", r.d12_plus},
              {"delta_star_star", r.delta_star_star},
              {"alt_delta_star_star", r.alt_delta_star_star},
              {"alt_d12_minus", r.alt_d12_minus},
              {"alt_d12_plus", r.alt_d12_plus},
              {"turing_possible", r.turing_possible},
              {"reason", r.reason},
              {"d12", r.d12},
              {"unstable_at_d12", r.unstable_at_d12},
              {"band_at_d12", band_json(r.band_at_d12)},
              {"length", cfg.length},
              {"unstable_modes_at_d12", r.unstable_modes_at_d12}};
  }
  write_json(run.file("threshold.json"), report);
  return report;
}

json cmd_dispersion(const RunConfig& cfg, Run& run) {
  const ModelSpec lim = cfg.model.limit();
  const Equilibrium eq = require_coexistence(lim.reaction);
  const DispersionCoeffs c = dispersion_coeffs(lim, eq);
  const double tr = c.jac.trace();
  const auto band = unstable_band(c);
  const int n_max = cfg.cells / 2;
  const auto lambdas = neumann_eigenvalues(cfg.length, n_max);

  double hi = cfg.dispersion.lambda_max.value_or(0.0);
  if (!cfg.dispersion.lambda_max) {
    hi = lambdas[std::min(n_max, 10)];
    if (band) hi = std::max(hi, 2.0 * band->hi);
  }
  const double lo = cfg.dispersion.lambda_min;
  if (!(hi > lo)) throw ConfigError("invalid_dispersion_range", "lambda_max must exceed lambda_min");

  Csv curve(run.file("dispersion.csv"), {"lambda", "mode_det", "growth_rate"});
  for (int i = 0; i < cfg.dispersion.points; ++i) {
    const double lam = lo + (hi - lo) * i / (cfg.dispersion.points - 1);
    curve.row({lam, mode_determinant(c, lam), growth_rate(c, tr, lam)});
  }
  Csv modes(run.file("modes.csv"), {"n", "lambda", "mode_det", "growth_rate", "unstable"});
  std::vector<int> unstable;
  for (int n = 0; n <= n_max; ++n) {
    const double g = growth_rate(c, tr, lambdas[n]);
    if (g > 0.0) unstable.push_back(n);
    modes.row({static_cast<double>(n), lambdas[n], mode_determinant(c, lambdas[n]), g,
               g > 0.0 ? 1.0 : 0.0});
  }
  json report = {{"u_star", eq.u},
                 {"v_star", eq.v},
                 {"coefficients", coeffs_json(c)},
                 {"band", band_json(band)},
                 {"lambda_range", {lo, hi}},
                 {"unstable_modes", unstable}};
  write_json(run.file("dispersion.json"), report);
  return report;
}

json fit_json(const std::optional<GrowthFit>& f) {
  if (!f) return nullptr;
  return {{"mode", f->mode},       {"lambda", f->lambda}, {"rate", f->rate},
          {"intercept", f->intercept}, {"points", f->points}, {"t_first", f->t_first},
          {"t_last", f->t_last}};
}

json cmd_simulate(const RunConfig& cfg, Run& run) {
  const Grid1D grid = cfg.grid();
  const Trajectory traj = simulate(cfg.model, grid, initial_state(cfg), cfg.t_end, cfg.controls);

  std::vector<std::string> header = {"t", "x"};
  for (const auto& name : traj.field_names) header.push_back(name);
  Csv csv(run.file("trajectory.csv"), header);
  std::vector<double> row(2 + traj.field_names.size());
  for (const auto& s : traj.states) {
    for (int i = 0; i < grid.cells(); ++i) {
      row[0] = s.t;
      row[1] = grid.x(i);
      for (std::size_t k = 0; k < s.fields.size(); ++k) row[2 + k] = s.fields[k][i];
      csv.row(row);
    }
  }

  Csv diag(run.file("diagnostics.csv"),
           {"t_begin", "t_end", "steps", "dt_min", "dt_max", "max_stages", "min_density",
            "max_density", "positivity_violations"});
  for (const auto& d : traj.diagnostics) {
    diag.row({d.t_begin, d.t_end, static_cast<double>(d.steps), d.dt_min, d.dt_max,
              static_cast<double>(d.max_stages), d.min_density, d.max_density,
              static_cast<double>(d.positivity_violations)});
  }

  const int fit_mode = cfg.analysis.fit_mode;
  const auto amps = mode_amplitudes(traj, fit_mode, cfg.length);
  Csv amp(run.file("amplitudes.csv"), {"t", "range_u", "mode_amplitude"});
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const Field u = traj.states[k].total_u();
    const auto [mn, mx] = std::minmax_element(u.begin(), u.end());
    amp.row({traj.times[k], *mx - *mn, amps[k]});
  }

  const PatternReport rep = pattern_report(traj, cfg.length, cfg.analysis);
  json predicted = nullptr;
  if (classify_regime(cfg.model.reaction).tag != Regime::NoCoexistence) {
    try {
      const DispersionCoeffs c =
          dispersion_coeffs(cfg.model.limit(), coexistence(cfg.model.reaction));
      const double lam = std::pow(fit_mode * std::numbers::pi / cfg.length, 2);
      predicted = growth_rate(c, c.jac.trace(), lam);
    } catch (const DomainError&) {
      predicted = nullptr;
    }
  }
  json report = {{"final_amplitude", rep.final_amplitude},
                 {"dominant_mode", rep.dominant.mode},
                 {"dominant_share", rep.dominant.share},
                 {"growth_fit", fit_json(rep.growth_fit)},
                 {"predicted_rate", predicted},
                 {"steady", rep.steady.steady},
                 {"steady_residual", rep.steady.residual},
                 {"steady_window", rep.steady_window},
                 {"steady_tol", rep.steady_tol},
                 {"snapshots", traj.times.size()},
                 {"total_steps", traj.total_steps}};
  write_json(run.file("pattern.json"), report);
  return report;
}

json cmd_sweep(const RunConfig& cfg, Run& run, const std::vector<double>& epsilons,
               const std::vector<double>& d12s) {
  if (epsilons.empty() && d12s.empty()) {
    throw ConfigError("empty_sweep", "sweep needs --epsilons, --d12 or a sweep section");
  }
  json result = json::object();
  if (!epsilons.empty()) {
    const Grid1D grid = cfg.grid();
    RunConfig limit_cfg = cfg;
    limit_cfg.model = cfg.model.limit();
    const SweepResult r = epsilon_sweep(cfg.model, grid, initial_state(limit_cfg), cfg.t_end,
                                        epsilons, cfg.controls, cfg.sweep.norm);
    Csv csv(run.file("sweep_epsilon.csv"), {"epsilon", "error", "order"});
    for (std::size_t i = 0; i < r.errors.size(); ++i) {
      csv.row({num(r.epsilons[i]), num(r.errors[i]), i < r.orders.size() ? num(r.orders[i]) : ""});
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < r.errors.size(); ++i) decreasing &= r.errors[i] < r.errors[i - 1];
    json runs = json::array();
    for (const auto& s : r.runs) {
      runs.push_back({{"variant", s.variant}, {"epsilon", s.epsilon}, {"steps", s.steps},
                      {"t_end", s.t_end}, {"dt_min", s.dt_min}, {"dt_max", s.dt_max}});
    }
    result["epsilon"] = {{"norm", std::string(to_string(r.norm))},
                         {"epsilons", r.epsilons},
                         {"errors", r.errors},
                         {"orders", r.orders},
                         {"strictly_decreasing", decreasing},
                         {"runs", runs}};
  }
  if (!d12s.empty()) {
    if (cfg.model.is_dds()) {
      throw ConfigError("d12_sweep_not_applicable", "d12 sweeps need an SKT variant");
    }
    const Equilibrium eq = require_coexistence(cfg.model.reaction);
    const auto lambdas = neumann_eigenvalues(cfg.length, cfg.cells / 2);
    Csv csv(run.file("sweep_d12.csv"), {"d12", "a2", "b1", "c0", "delta_star", "lambda_lo",
                                        "lambda_hi", "unstable_modes", "max_mode_growth"});
    json rows = json::array();
    for (double d12 : d12s) {
      ModelSpec m = cfg.model.limit();
      m.reaction.d12 = d12;
      m.validate();
      const DispersionCoeffs c = dispersion_coeffs(m, eq);
      const auto band = unstable_band(c);
      const auto modes = band ? unstable_modes(*band, cfg.length) : std::vector<int>{};
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t n = 1; n < lambdas.size(); ++n) {
        best = std::max(best, growth_rate(c, c.jac.trace(), lambdas[n]));
      }
      const double ds = c.b1 * c.b1 - 4.0 * c.a2 * c.c0;
      csv.row({num(d12), num(c.a2), num(c.b1), num(c.c0), num(ds),
               band ? num(band->lo) : "", band ? num(band->hi) : "",
               std::to_string(modes.size()), num(best)});
      rows.push_back({{"d12", d12}, {"band", band_json(band)}, {"unstable_modes", modes}});
    }
    result["d12"] = rows;
  }
  return result;
}

int sign_token(const std::string& tok, bool allow_zero) {
  if (tok == "+" || tok == "+1" || tok == "1") return 1;
  if (tok == "-" || tok == "-1") return -1;
  if (allow_zero && (tok == "0" || tok == "+0" || tok == "-0")) return 0;
  throw ConfigError(allow_zero ? "invalid_sign" : "zero_sign",
                    "cannot read sign '" + tok + "'");
}

json cmd_classify(const CliOptions& opts, Run& run, const std::array<int, 4>& signs, int d2) {
  (void)opts;
  const SignStructure s = sign_classify(signs, d2);
  json report = {{"signs", {s.signs[0], s.signs[1], s.signs[2], s.signs[3]}},
                 {"d2_sign", s.d2_sign},
                 {"category", std::string(to_string(s.category))},
                 {"verdict", std::string(to_string(s.verdict))},
                 {"favours_instability", s.favours_instability}};
  write_json(run.file("classification.json"), report);
  return report;
}

std::array<int, 4> parse_signs(const std::string& text) {
  std::array<int, 4> out{};
  std::stringstream ss(text);
  std::string tok;
  int i = 0;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
    if (i >= 4) throw ConfigError("invalid_signs", "--signs takes exactly four entries");
    out[i++] = sign_token(tok, true);
  }
  if (i != 4) throw ConfigError("invalid_signs", "--signs takes exactly four entries");
  return out;
}

CommandResult dispatch(const CliOptions& opts, std::ostream& out) {
  static const std::vector<std::string> known = {"analyze",  "threshold", "dispersion",
                                                 "simulate", "sweep",     "classify"};
  if (std::find(known.begin(), known.end(), opts.command) == known.end()) {
    throw ConfigError("unknown_command", "unknown command '" + opts.command + "'");
  }

  if (opts.command == "classify") {
    if (opts.signs.empty()) throw ConfigError("missing_signs", "classify needs --signs");
    const auto signs = parse_signs(opts.signs);
    const int d2 = opts.d2_sign.empty() ? 0 : sign_token(opts.d2_sign, true);
    json identity = {{"command", opts.command},
                     {"signs", {signs[0], signs[1], signs[2], signs[3]}},
                     {"d2_sign", d2}};
    Run run = open_run(opts, identity);
    const json result = cmd_classify(opts, run, signs, d2);
    close_run(run, result);
    if (!opts.quiet) {
      out << run.dir.string() << " " << result.at("category").get<std::string>() << " "
          << result.at("verdict").get<std::string>() << '\n';
    }
    return {kExitOk, run.dir};
  }

  if (!opts.config) throw ConfigError("missing_config", opts.command + " needs --config");
  RunConfig cfg = load_config(*opts.config);
  if (opts.seed) cfg.seed = *opts.seed;
  const std::vector<double> epsilons = opts.epsilons.empty() ? cfg.sweep.epsilons : opts.epsilons;
  const std::vector<double> d12s = opts.d12.empty() ? cfg.sweep.d12 : opts.d12;
  if (opts.command == "sweep") {
    cfg.sweep.epsilons = epsilons;
    cfg.sweep.d12 = d12s;
  }

  const json identity = {{"command", opts.command}, {"config", to_json(cfg)}};
  Run run = open_run(opts, identity);
  json result;
  if (opts.command == "analyze") result = cmd_analyze(cfg, run);
  else if (opts.command == "threshold") result = cmd_threshold(cfg, run);
  else if (opts.command == "dispersion") result = cmd_dispersion(cfg, run);
  else if (opts.command == "simulate") result = cmd_simulate(cfg, run);
  else result = cmd_sweep(cfg, run, epsilons, d12s);
  close_run(run, result);
  if (!opts.quiet) out << run.dir.string() << '\n';
  return {kExitOk, run.dir};
}

}  // namespace

CommandResult run_command(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  auto fail = [&](int code, const std::string& id, const std::string& what) {
    err << json{{"error", id}, {"message", what}, {"exit_code", code}}.dump() << '\n';
    return CommandResult{code, {}};
  };
  try {
    return dispatch(opts, out);
  } catch (const ConfigError& e) {
    return fail(kExitConfig, e.code(), e.what());
  } catch (const DomainError& e) {
    return fail(kExitNumerical, e.code(), e.what());
  } catch (const NumericalError& e) {
    return fail(kExitNumerical, e.code(), e.what());
  } catch (const json::exception& e) {
    return fail(kExitConfig, "invalid_config", e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(kExitConfig, "io_error", e.what());
  }
}

}  // namespace crossdiff

#include "crossdiff/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

#include "crossdiff/error.hpp"

namespace crossdiff {

std::string_view to_string(GapNorm n) {
  return n == GapNorm::FinalL2 ? "l2_final" : "l2_sup_snapshots";
}

GapNorm gap_norm_from_string(std::string_view name) {
  if (name == "l2_final") return GapNorm::FinalL2;
  if (name == "l2_sup_snapshots") return GapNorm::SupSnapshotsL2;
  throw ConfigError("unknown_norm", "unknown gap norm '" + std::string(name) + "'");
}

std::pair<SimState, SimState> matched_initial(const ModelSpec& fast, const ModelSpec& limit,
                                              const SimState& base) {
  if (!fast.is_fast() || limit.is_fast() || fast.limit_variant() != limit.variant) {
    throw ConfigError("mismatched_models", "matched_initial needs a fast model and its limit");
  }
  if (base.fields.size() != 2) {
    throw ConfigError("invalid_state", "matched_initial needs a (u, v) base state");
  }
  const Field& u = base.fields[0];
  const Field& v = base.fields[1];
  SimState f;
  f.t = base.t;
  f.fields.assign(3, Field(u.size()));
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Partition part = quasi_steady_partition(fast, u[i], v[i]);
    f.fields[1][i] = part.u_b;
    f.fields[0][i] = u[i] - part.u_b;
    f.fields[2][i] = v[i];
  }
  return {f, base};
}

double l2_gap(const Field& a, const Field& b, double dx) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(dx * acc);
}

namespace {

RunSummary summarize(const ModelSpec& m, const Trajectory& traj) {
  RunSummary s;
  s.variant = std::string(to_string(m.variant));
  s.epsilon = m.epsilon;
  s.steps = traj.total_steps;
  s.t_end = traj.times.back();
  s.dt_min = std::numeric_limits<double>::infinity();
  for (const auto& d : traj.diagnostics) {
    s.dt_min = std::min(s.dt_min, d.dt_min);
    s.dt_max = std::max(s.dt_max, d.dt_max);
  }
  return s;
}

}  // namespace

SweepResult epsilon_sweep(const ModelSpec& model, const Grid1D& grid, const SimState& base,
                          double t_end, const std::vector<double>& epsilons,
                          const Controls& controls, GapNorm norm) {
  if (epsilons.empty()) throw ConfigError("invalid_epsilons", "epsilon list is empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw ConfigError("invalid_epsilons", "epsilons must be > 0");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw ConfigError("invalid_epsilons", "epsilons must be strictly decreasing");
    }
  }
  const ModelSpec limit = model.limit();

  auto limit_run = std::async(std::launch::async, [&] {
    return simulate(limit, grid, base, t_end, controls);
  });
  std::vector<std::future<Trajectory>> fast_runs;
  std::vector<ModelSpec> fast_models;
  for (double eps : epsilons) fast_models.push_back(model.fast(eps));
  for (const auto& fm : fast_models) {
    fast_runs.push_back(std::async(std::launch::async, [&grid, &base, &fm, t_end, controls] {
      const auto [fast_init, limit_init] = matched_initial(fm, fm.limit(), base);
      (void)limit_init;
      // The split step leaves an O(dt) floor once dt exceeds epsilon.
      Controls c = controls;
      c.dt_max = std::min(c.dt_max, fm.epsilon);
      try {
        return simulate(fm, grid, fast_init, t_end, c);
      } catch (const NumericalError& e) {
        throw NumericalError(e.code(), std::string(e.what()) +
                                           " (epsilon=" + std::to_string(fm.epsilon) + ")");
      }
    }));
  }

  SweepResult out;
  out.epsilons = epsilons;
  out.norm = norm;
  const Trajectory lim = limit_run.get();
  out.runs.push_back(summarize(limit, lim));
  for (std::size_t k = 0; k < fast_runs.size(); ++k) {
    const Trajectory fast = fast_runs[k].get();
    out.runs.push_back(summarize(fast_models[k], fast));
    double err = 0.0;
    if (norm == GapNorm::FinalL2) {
      err = l2_gap(fast.final_state().total_u(), lim.final_state().fields[0], grid.dx());
    } else {
      const std::size_t count = std::min(fast.states.size(), lim.states.size());
      for (std::size_t s = 0; s < count; ++s) {
        err = std::max(err, l2_gap(fast.states[s].total_u(), lim.states[s].fields[0], grid.dx()));
      }
    }
    out.errors.push_back(err);
  }
  for (std::size_t i = 0; i + 1 < out.errors.size(); ++i) {
    out.orders.push_back(std::log(out.errors[i] / out.errors[i + 1]) /
                         std::log(out.epsilons[i] / out.epsilons[i + 1]));
  }
  return out;
}

}  // namespace crossdiff

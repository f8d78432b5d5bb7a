#include "crossdiff/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <numbers>
#include <numeric>

#include "crossdiff/error.hpp"

namespace crossdiff {

std::vector<double> cosine_coefficients(const Field& field, double length) {
  const std::size_t n = field.size();
  if (n == 0) return {};
  const double dx = length / static_cast<double>(n);
  std::vector<double> out(n / 2 + 1, 0.0);
  for (std::size_t m = 0; m < out.size(); ++m) {
    const double k = static_cast<double>(m) * std::numbers::pi / length;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += field[i] * std::cos(k * (static_cast<double>(i) + 0.5) * dx);
    }
    out[m] = (m == 0 ? 1.0 : 2.0) * acc / static_cast<double>(n);
  }
  return out;
}

std::vector<double> cosine_modes(const Field& field, double length) {
  std::vector<double> e = cosine_coefficients(field, length);
  for (std::size_t m = 0; m < e.size(); ++m) e[m] = (m == 0 ? 1.0 : 0.5) * e[m] * e[m];
  return e;
}

DominantMode dominant_mode(const std::vector<double>& energies) {
  DominantMode out;
  if (energies.size() < 2) return {0, 1.0};
  const double total = std::accumulate(energies.begin() + 1, energies.end(), 0.0);
  const double scale = std::max(energies[0], total);
  if (!(total > 1e-28 * scale) || total == 0.0) return {0, 1.0};
  const auto it = std::max_element(energies.begin() + 1, energies.end());
  out.mode = static_cast<int>(it - energies.begin());
  out.share = *it / total;
  return out;
}

std::vector<double> mode_amplitudes(const Trajectory& traj, int mode, double length) {
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (const auto& s : traj.states) {
    const Field u = s.total_u();
    const double k = mode * std::numbers::pi / length;
    const double dx = length / static_cast<double>(u.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      acc += u[i] * std::cos(k * (static_cast<double>(i) + 0.5) * dx);
    }
    out.push_back(std::abs((mode == 0 ? 1.0 : 2.0) * acc / static_cast<double>(u.size())));
  }
  return out;
}

GrowthFit fit_exponential(const std::vector<double>& t, const std::vector<double>& a) {
  const std::size_t n = t.size();
  GrowthFit fit;
  fit.points = static_cast<int>(n);
  if (n < 2) return fit;
  double mt = 0.0;
  double ml = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += t[i];
    ml += std::log(a[i]);
  }
  mt /= static_cast<double>(n);
  ml /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (t[i] - mt) * (std::log(a[i]) - ml);
    sxx += (t[i] - mt) * (t[i] - mt);
  }
  fit.rate = sxy / sxx;
  fit.intercept = ml - fit.rate * mt;
  fit.t_first = t.front();
  fit.t_last = t.back();
  return fit;
}

GrowthFit fit_growth(const Trajectory& traj, int mode, double length, const FitWindow& window) {
  const std::vector<double> amp = mode_amplitudes(traj, mode, length);
  if (amp.empty()) {
    throw NumericalError("insufficient_linear_window", "empty trajectory");
  }
  double u_ref = 0.0;
  if (window.u_ref) {
    u_ref = *window.u_ref;
  } else {
    const Field u0 = traj.states.front().total_u();
    u_ref = std::accumulate(u0.begin(), u0.end(), 0.0) / static_cast<double>(u0.size());
  }
  const double lower = window.lower.value_or(window.lower_factor * amp.front());
  const double upper = window.upper.value_or(window.upper_fraction * u_ref);

  std::vector<double> ts;
  std::vector<double> as;
  for (std::size_t k = 0; k < amp.size(); ++k) {
    const bool inside = amp[k] >= lower && amp[k] <= upper && amp[k] > 0.0;
    if (inside) {
      ts.push_back(traj.times[k]);
      as.push_back(amp[k]);
    } else if (!ts.empty()) {
      break;
    }
  }
  if (static_cast<int>(ts.size()) < window.min_points) {
    throw NumericalError("insufficient_linear_window",
                         "only " + std::to_string(ts.size()) +
                             " snapshots inside the linear window [" + std::to_string(lower) +
                             ", " + std::to_string(upper) + "]");
  }
  GrowthFit fit = fit_exponential(ts, as);
  fit.mode = mode;
  const double k = mode * std::numbers::pi / length;
  fit.lambda = k * k;
  return fit;
}

SteadyResult steady_check(const Trajectory& traj, double window, double tol) {
  if (traj.times.empty()) throw ConfigError("empty_trajectory", "steady_check on empty trajectory");
  const double t_last = traj.times.back();
  if (window > t_last - traj.times.front() || !(window >= 0.0)) {
    throw ConfigError("invalid_window", "steady window exceeds the trajectory span");
  }
  const SimState& last = traj.states.back();
  double scale = 0.0;
  for (const auto& f : last.fields) {
    for (double x : f) scale = std::max(scale, std::abs(x));
  }
  scale = std::max(scale, std::numeric_limits<double>::min());
  double change = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    if (traj.times[k] < t_last - window) continue;
    const auto& s = traj.states[k];
    for (std::size_t f = 0; f < s.fields.size(); ++f) {
      for (std::size_t i = 0; i < s.fields[f].size(); ++i) {
        change = std::max(change, std::abs(s.fields[f][i] - last.fields[f][i]));
      }
    }
  }
  SteadyResult out;
  out.residual = change / scale;
  out.steady = out.residual <= tol;
  return out;
}

PatternReport pattern_report(const Trajectory& traj, double length, const PatternOptions& opts) {
  PatternReport r;
  const Field u = traj.final_state().total_u();
  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  r.final_amplitude = *hi - *lo;
  r.dominant = dominant_mode(cosine_modes(u, length));
  try {
    r.growth_fit = fit_growth(traj, opts.fit_mode, length, opts.window);
  } catch (const NumericalError&) {
    r.growth_fit.reset();
  }
  r.steady_window = std::min(opts.steady_window, traj.times.back() - traj.times.front());
  r.steady_tol = opts.steady_tol;
  r.steady = steady_check(traj, r.steady_window, opts.steady_tol);
  return r;
}

}  // namespace crossdiff

#pragma once

#include <optional>
#include <vector>

#include "crossdiff/pde.hpp"

namespace crossdiff {

// Projection coefficients a_n of a cell-centred field onto cos(n pi x / L),
// n = 0..N/2: a_0 is the mean, a_n = (2/N) sum_i w_i cos(n pi x_i / L).
std::vector<double> cosine_coefficients(const Field& field, double length);

// Mode energies e_0 = a_0^2 and e_n = a_n^2 / 2, so that sum_{n>=1} e_n is the
// variance of a field band-limited to n <= N/2.
std::vector<double> cosine_modes(const Field& field, double length);

struct DominantMode {
  int mode = 0;
  double share = 0.0;  // fraction of the non-mean energy (1 for constant fields)
};

// Largest-energy mode among n >= 1; mode 0 when the field is constant.
DominantMode dominant_mode(const std::vector<double>& energies);

// Amplitude band used for the exponential fit. Unset bounds default to
// lower = 10 * (initial amplitude) and upper = 0.05 * u_ref.
struct FitWindow {
  std::optional<double> lower;
  std::optional<double> upper;
  double lower_factor = 10.0;
  double upper_fraction = 0.05;
  std::optional<double> u_ref;  // defaults to the initial mean of u
  int min_points = 10;
};

struct GrowthFit {
  int mode = 0;
  double lambda = 0.0;  // (n pi / L)^2
  double rate = 0.0;
  double intercept = 0.0;
  int points = 0;
  double t_first = 0.0;
  double t_last = 0.0;
};

// Per-snapshot |a_n| of total u.
std::vector<double> mode_amplitudes(const Trajectory& traj, int mode, double length);

// Least-squares slope of log|a_n(t)| over the first contiguous run of
// snapshots whose amplitude lies inside the window. Throws
// NumericalError("insufficient_linear_window") with fewer than min_points.
GrowthFit fit_growth(const Trajectory& traj, int mode, double length,
                     const FitWindow& window = {});

// Least-squares slope of log(a) against t.
GrowthFit fit_exponential(const std::vector<double>& t, const std::vector<double>& a);

struct SteadyResult {
  bool steady = false;
  double residual = 0.0;
};

// Max-norm change of all fields over the trailing window, relative to the
// final-state scale max|field|.
SteadyResult steady_check(const Trajectory& traj, double window, double tol);

struct PatternReport {
  double final_amplitude = 0.0;  // max - min of u at the final time
  DominantMode dominant;
  std::optional<GrowthFit> growth_fit;
  std::optional<double> predicted_rate;
  SteadyResult steady;
  double steady_window = 0.0;
  double steady_tol = 0.0;
};

struct PatternOptions {
  int fit_mode = 1;
  FitWindow window;
  double steady_window = 50.0;
  double steady_tol = 1e-6;
};

// Assembles the report; a failed growth fit leaves growth_fit empty.
PatternReport pattern_report(const Trajectory& traj, double length, const PatternOptions& opts);

}  // namespace crossdiff

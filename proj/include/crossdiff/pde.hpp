#pragma once

#include <span>
#include <string>
#include <vector>

#include "crossdiff/model.hpp"

namespace crossdiff {

// Uniform cell-centred grid on [0, L]; x_i = (i + 1/2) dx.
class Grid1D {
 public:
  Grid1D(double length, int cells);

  double length() const { return length_; }
  int cells() const { return cells_; }
  double dx() const { return length_ / cells_; }
  double x(int i) const { return (i + 0.5) * dx(); }
  std::vector<double> nodes() const;

 private:
  double length_;
  int cells_;
};

using Field = std::vector<double>;

// Fields are ordered as ModelSpec::field_names(): {u, v} or {u_a, u_b, v}.
struct SimState {
  double t = 0.0;
  std::vector<Field> fields;

  // Total u (u, or u_a + u_b for fast variants).
  Field total_u() const;
  const Field& v() const { return fields.back(); }
};

// Second-order Neumann Laplacian with mirror ghost cells w_{-1} = w_0 and
// w_N = w_{N-1} (the zero-flux condition on a cell-centred grid).
void neumann_laplacian(std::span<const double> w, double dx, std::span<double> out);
Field neumann_laplacian(const Field& w, double dx);

enum class TimeScheme {
  Rk4,   // classical RK4 under the diffusive CFL limit
  Rkc2,  // second-order Runge-Kutta-Chebyshev, stage count from the spectral radius
};

std::string_view to_string(TimeScheme s);
TimeScheme time_scheme_from_string(std::string_view name);

struct Controls {
  double dt_max = 1e-2;
  double safety = 0.9;
  double snapshot_every = 1.0;
  TimeScheme scheme = TimeScheme::Rk4;
  double positivity_tol = 1e-8;
  double blowup_limit = 1e12;
  int max_rkc_stages = 400;
  bool kinetics = true;  // false integrates transport (and fast exchange) only

  void validate() const;
};

// Aggregated step statistics between two consecutive snapshots.
struct StepDiagnostics {
  double t_begin = 0.0;
  double t_end = 0.0;
  long steps = 0;
  double dt_min = 0.0;
  double dt_max = 0.0;
  int max_stages = 0;
  double max_density = 0.0;
  double min_density = 0.0;
  long positivity_violations = 0;  // negative values inside the tolerance band
};

struct Trajectory {
  std::vector<std::string> field_names;
  std::vector<double> times;
  std::vector<SimState> states;
  std::vector<StepDiagnostics> diagnostics;  // diagnostics[k] covers (times[k], times[k+1]]
  long total_steps = 0;

  const SimState& final_state() const { return states.back(); }
};

SimState homogeneous_state(const ModelSpec& model, const Grid1D& grid, double u, double v);

// Non-stiff time derivative. Fast variants exclude the 1/epsilon exchange.
SimState rhs(const ModelSpec& model, const Grid1D& grid, const SimState& state);

// Advances only the exchange term of a fast variant over dt. SKT variants
// use the exact relaxation with v frozen; DDS uses implicit-midpoint
// substeps of length <= epsilon / 4.
SimState exchange_step(const ModelSpec& model, const SimState& state, double dt);

// max over the grid of the local effective diffusivity max(dD/du, d_v)
// (max(d_a, d_b, d_v) for fast variants and the DDS bound max(d_a, d_b)).
double max_effective_diffusivity(const ModelSpec& model, const SimState& state);

// Method-of-lines integration to t_end. Fast variants use Strang splitting
// exchange(dt/2) / non-stiff(dt) / exchange(dt/2).
Trajectory simulate(const ModelSpec& model, const Grid1D& grid, const SimState& initial,
                    double t_end, const Controls& controls);

}  // namespace crossdiff

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "crossdiff/pde.hpp"

namespace crossdiff {

enum class GapNorm {
  FinalL2,         // L2 in space at the final time
  SupSnapshotsL2,  // max over snapshots of the spatial L2 gap
};

std::string_view to_string(GapNorm n);
GapNorm gap_norm_from_string(std::string_view name);

// Places the fast state on the quasi-steady manifold of `fast`: u_b = phi(v) u
// for SKT, the Q_DDS root for DDS. Returns {fast state, limit state = base}.
std::pair<SimState, SimState> matched_initial(const ModelSpec& fast, const ModelSpec& limit,
                                              const SimState& base);

struct RunSummary {
  std::string variant;
  double epsilon = 0.0;
  long steps = 0;
  double t_end = 0.0;
  double dt_min = 0.0;
  double dt_max = 0.0;
};

struct SweepResult {
  std::vector<double> epsilons;
  std::vector<double> errors;
  // log(e_i / e_{i+1}) / log(eps_i / eps_{i+1}); observational only.
  std::vector<double> orders;
  GapNorm norm = GapNorm::FinalL2;
  std::vector<RunSummary> runs;  // limit run first, then one per epsilon
};

// Spatial L2 norm sqrt(dx sum (a - b)^2).
double l2_gap(const Field& a, const Field& b, double dx);

// Integrates the fast system for every epsilon and the limit system once from
// matched data and measures the gap between u_a + u_b and u. `model` may be
// either the fast or the limit variant of the family. Runs are executed
// concurrently and reduced in epsilon order. Fast runs cap dt_max at epsilon.
SweepResult epsilon_sweep(const ModelSpec& model, const Grid1D& grid, const SimState& base,
                          double t_end, const std::vector<double>& epsilons,
                          const Controls& controls, GapNorm norm = GapNorm::FinalL2);

}  // namespace crossdiff

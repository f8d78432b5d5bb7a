#pragma once

#include <optional>

#include "crossdiff/kinetics.hpp"
#include "crossdiff/rates.hpp"

namespace crossdiff {

// Partial derivatives (d/du, d/dv) of a diffusivity function D(u, v).
struct Grad2 {
  double d1 = 0.0;
  double d2 = 0.0;
};

// phi = h / (h + k), the quasi-steady fraction of u in the excited state.
double phi(const TransitionRates& rates, double v);
// phi' = (h'k - hk') / (h + k)^2.
double phi_prime(const TransitionRates& rates, double v);

// Avoidance diffusivity D+ = u (d_u + d12 phi(v)).
double d_plus(const ReactionParams& p, const TransitionRates& rates, double u, double v);
Grad2 grad_d_plus(const ReactionParams& p, const TransitionRates& rates, double u, double v);

// Hiding diffusivity D- = u (d_u - d12 phi(v)); requires d12 < d_u.
double d_minus(const ReactionParams& p, const TransitionRates& rates, double u, double v);
Grad2 grad_d_minus(const ReactionParams& p, const TransitionRates& rates, double u, double v);

// Throws ConfigError("hiding_d12_ge_du") unless d12 < d_u.
void require_hiding_admissible(const ReactionParams& p);

// Coupling weights of the starvation exchange Q = k(b u_b + d v) u_b - h(a u_a + c v) u_a.
struct DdsParams {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
  double d = 1.0;
  double d_a = 1.0;
  double d_b = 1.0;

  void validate() const;
};

struct Partition {
  double u_a = 0.0;
  double u_b = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Exchange residual F(u_b) = Q(u - u_b, u_b, v) and dF/du_b at fixed (u, v).
struct ExchangeResidual {
  double value = 0.0;
  double slope = 0.0;
};
ExchangeResidual dds_residual(const DdsParams& dp, const TransitionRates& rates, double u,
                              double v, double u_b);

// Residual tolerance 1e-12 * max(1, u h(a u + c v)).
double dds_tolerance(const DdsParams& dp, const TransitionRates& rates, double u, double v);

// Unique root of F on [0, u] by Newton with bisection fallback. `guess` warm
// starts the iteration (clamped into [0, u]).
Partition dds_partition(const DdsParams& dp, const TransitionRates& rates, double u, double v,
                        std::optional<double> guess = std::nullopt);

struct PartitionPartials {
  double du_b_du = 0.0;
  double du_b_dv = 0.0;
  double du_a_du = 0.0;
  double du_a_dv = 0.0;
};

// Gradients of Q with respect to (u_a, u_b, v) at a partitioned point.
struct QGradient {
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};
QGradient dds_q_gradient(const DdsParams& dp, const TransitionRates& rates, double u_a,
                         double u_b, double v);

// Implicit-function partials of (u_a, u_b) with respect to (u, v).
PartitionPartials dds_partials(const DdsParams& dp, const TransitionRates& rates, double u,
                               double v);
PartitionPartials dds_partials(const DdsParams& dp, const TransitionRates& rates,
                               const Partition& part, double v);

double d_dds(const DdsParams& dp, const TransitionRates& rates, double u, double v);
Grad2 grad_d_dds(const DdsParams& dp, const TransitionRates& rates, double u, double v);

}  // namespace crossdiff

#include "crossdiff/diffusivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <variant>

#include "crossdiff/error.hpp"

namespace crossdiff {

double phi(const TransitionRates& rates, double v) {
  if (const auto* lin = std::get_if<SktLinear>(&rates.family())) {
    return rates.clamp(v) / lin->M;
  }
  const RateValues r = rates.eval(v);
  return r.h / (r.h + r.k);
}

double phi_prime(const TransitionRates& rates, double v) {
  const RateValues r = rates.eval(v);
  const double s = r.h + r.k;
  return (r.dh * r.k - r.h * r.dk) / (s * s);
}

double d_plus(const ReactionParams& p, const TransitionRates& rates, double u, double v) {
  return u * (p.d_u + p.d12 * phi(rates, v));
}

Grad2 grad_d_plus(const ReactionParams& p, const TransitionRates& rates, double u, double v) {
  return {p.d_u + p.d12 * phi(rates, v), p.d12 * u * phi_prime(rates, v)};
}

void require_hiding_admissible(const ReactionParams& p) {
  if (!(p.d12 < p.d_u)) {
    throw ConfigError("hiding_d12_ge_du",
                      "hiding diffusivity requires d12 < d_u (got d12=" + std::to_string(p.d12) +
                          ", d_u=" + std::to_string(p.d_u) + ")");
  }
}

double d_minus(const ReactionParams& p, const TransitionRates& rates, double u, double v) {
  require_hiding_admissible(p);
  return u * (p.d_u - p.d12 * phi(rates, v));
}

Grad2 grad_d_minus(const ReactionParams& p, const TransitionRates& rates, double u, double v) {
  require_hiding_admissible(p);
  return {p.d_u - p.d12 * phi(rates, v), -p.d12 * u * phi_prime(rates, v)};
}

void DdsParams::validate() const {
  const auto positive = [](double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ConfigError("invalid_dds_params", std::string(name) + " must be finite and > 0");
    }
  };
  positive(a, "a");
  positive(b, "b");
  positive(d, "d");
  positive(d_a, "d_a");
  positive(d_b, "d_b");
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw ConfigError("invalid_dds_params", "c must be finite and >= 0");
  }
}

ExchangeResidual dds_residual(const DdsParams& dp, const TransitionRates& rates, double u,
                              double v, double u_b) {
  const double u_a = u - u_b;
  const RateValues kr = rates.eval(dp.b * u_b + dp.d * v);
  const RateValues hr = rates.eval(dp.a * u_a + dp.c * v);
  return {kr.k * u_b - hr.h * u_a, kr.k + dp.b * u_b * kr.dk + hr.h + dp.a * u_a * hr.dh};
}

double dds_tolerance(const DdsParams& dp, const TransitionRates& rates, double u, double v) {
  const double h_scale = rates.eval(dp.a * u + dp.c * v).h;
  return 1e-12 * std::max(1.0, u * h_scale);
}

Partition dds_partition(const DdsParams& dp, const TransitionRates& rates, double u, double v,
                        std::optional<double> guess) {
  constexpr int kMaxIterations = 100;
  if (u < 0.0 || v < 0.0) {
    throw DomainError("negative_density", "dds_partition needs u, v >= 0");
  }
  if (u == 0.0) return {0.0, 0.0, 0.0, 0};

  const double tol = dds_tolerance(dp, rates, u, v);
  double y;
  if (guess) {
    y = std::clamp(*guess, 0.0, u);
  } else {
    const double h0 = rates.eval(dp.a * u + dp.c * v).h;
    const double k0 = rates.eval(dp.d * v).k;
    y = u * h0 / (h0 + k0);
  }

  // F is increasing on [0, u] with F(0) <= 0 <= F(u); keep a sign bracket.
  double lo = 0.0;
  double hi = u;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const ExchangeResidual r = dds_residual(dp, rates, u, v, y);
    if (std::abs(r.value) <= tol) return {u - y, y, std::abs(r.value), it};
    if (r.value < 0.0) {
      lo = y;
    } else {
      hi = y;
    }
    double next = (r.slope > 0.0 && std::isfinite(r.slope)) ? y - r.value / r.slope : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == y || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * u) {
      const ExchangeResidual last = dds_residual(dp, rates, u, v, next);
      if (std::abs(last.value) <= tol) return {u - next, next, std::abs(last.value), it};
      break;
    }
    y = next;
  }
  throw NumericalError("partition_no_convergence",
                       "dds_partition did not converge at u=" + std::to_string(u) +
                           ", v=" + std::to_string(v));
}

QGradient dds_q_gradient(const DdsParams& dp, const TransitionRates& rates, double u_a,
                         double u_b, double v) {
  const RateValues hr = rates.eval(dp.a * u_a + dp.c * v);
  const RateValues kr = rates.eval(dp.b * u_b + dp.d * v);
  return {-(hr.h + dp.a * u_a * hr.dh), kr.k + dp.b * u_b * kr.dk,
          dp.d * u_b * kr.dk - dp.c * u_a * hr.dh};
}

PartitionPartials dds_partials(const DdsParams& dp, const TransitionRates& rates,
                               const Partition& part, double v) {
  const QGradient q = dds_q_gradient(dp, rates, part.u_a, part.u_b, v);
  const double den = q.d2 - q.d1;
  PartitionPartials out;
  out.du_b_du = -q.d1 / den;
  out.du_b_dv = -q.d3 / den;
  out.du_a_du = 1.0 - out.du_b_du;
  out.du_a_dv = -out.du_b_dv;
  return out;
}

PartitionPartials dds_partials(const DdsParams& dp, const TransitionRates& rates, double u,
                               double v) {
  return dds_partials(dp, rates, dds_partition(dp, rates, u, v), v);
}

double d_dds(const DdsParams& dp, const TransitionRates& rates, double u, double v) {
  const Partition part = dds_partition(dp, rates, u, v);
  // Exactly d_a * u when d_a == d_b.
  return dp.d_a * u + (dp.d_b - dp.d_a) * part.u_b;
}

Grad2 grad_d_dds(const DdsParams& dp, const TransitionRates& rates, double u, double v) {
  const PartitionPartials pp = dds_partials(dp, rates, u, v);
  return {dp.d_a + (dp.d_b - dp.d_a) * pp.du_b_du, (dp.d_b - dp.d_a) * pp.du_b_dv};
}

}  // namespace crossdiff

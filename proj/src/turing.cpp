#include "crossdiff/turing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "crossdiff/error.hpp"

namespace crossdiff {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Real roots of a x^2 + b x + c (a != 0, disc >= 0), ascending, computed
// without cancellation.
std::array<double, 2> quadratic_roots(double a, double b, double c) {
  const double disc = std::max(0.0, b * b - 4.0 * a * c);
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (q == 0.0) return {0.0, 0.0};
  const double r1 = q / a;
  const double r2 = c / q;
  return {std::min(r1, r2), std::max(r1, r2)};
}

void require_weak(const ReactionParams& p) {
  if (classify_regime(p).tag != Regime::Weak) {
    throw ConfigError("regime_not_weak",
                      "threshold analysis is only defined in the weak competition regime");
  }
}

}  // namespace

std::vector<double> neumann_eigenvalues(double length, int n_max) {
  if (!(length > 0.0) || n_max < 0) {
    throw ConfigError("invalid_domain", "neumann_eigenvalues needs L > 0 and n_max >= 0");
  }
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    const double k = n * std::numbers::pi / length;
    out[static_cast<std::size_t>(n)] = k * k;
  }
  return out;
}

DispersionCoeffs dispersion_coeffs(const ModelSpec& model, const Equilibrium& eq) {
  DispersionCoeffs c;
  c.jac = jacobian(eq.u, eq.v, model.reaction);
  const Grad2 g = diffusivity_gradient(model, eq.u, eq.v);
  c.d1 = g.d1;
  c.d2 = g.d2;
  c.d_v = model.reaction.d_v;
  c.a2 = c.d_v * c.d1;
  c.b1 = -c.d1 * c.jac.a22 - c.d_v * c.jac.a11 + c.d2 * c.jac.a21;
  c.c0 = c.jac.det();
  return c;
}

double mode_determinant(const DispersionCoeffs& c, double lambda) {
  return (c.a2 * lambda + c.b1) * lambda + c.c0;
}

Mat2 mode_matrix(const DispersionCoeffs& c, double lambda) {
  return {c.jac.a11 - c.d1 * lambda, c.jac.a12 - c.d2 * lambda, c.jac.a21,
          c.jac.a22 - c.d_v * lambda};
}

double growth_rate(const DispersionCoeffs& c, double trace_at_eq, double lambda) {
  const double tr = trace_at_eq - (c.d1 + c.d_v) * lambda;
  const double det = mode_determinant(c, lambda);
  const double disc = tr * tr - 4.0 * det;
  if (disc < 0.0) return 0.5 * tr;
  const double q = 0.5 * (tr + std::copysign(std::sqrt(disc), tr));
  if (q == 0.0) return 0.0;
  return std::max(q, det / q);
}

std::optional<Band> unstable_band(const DispersionCoeffs& c) {
  if (!(c.a2 > 0.0)) {
    throw ConfigError("nonpositive_a2", "unstable_band needs a2 = d_v dD/du > 0");
  }
  if (c.c0 < 0.0) {
    const auto roots = quadratic_roots(c.a2, c.b1, c.c0);
    return Band{0.0, roots[1], true};
  }
  if (c.c0 == 0.0) {
    if (c.b1 < 0.0) return Band{0.0, -c.b1 / c.a2, true};
    return std::nullopt;
  }
  const double disc = c.b1 * c.b1 - 4.0 * c.a2 * c.c0;
  if (c.b1 < 0.0 && disc > 0.0) {
    const auto roots = quadratic_roots(c.a2, c.b1, c.c0);
    return Band{roots[0], roots[1], false};
  }
  return std::nullopt;
}

std::vector<int> unstable_modes(const Band& band, double length) {
  std::vector<int> out;
  for (int n = 1;; ++n) {
    const double k = n * std::numbers::pi / length;
    const double lambda = k * k;
    if (lambda >= band.hi) break;
    if (band.contains(lambda)) out.push_back(n);
  }
  return out;
}

ThresholdReport turing_threshold_plus(const ReactionParams& p, const TransitionRates& rates,
                                      std::optional<double> length) {
  p.validate();
  require_weak(p);
  const Equilibrium eq = coexistence(p);
  const Rst k = rst(p);

  ThresholdReport r;
  r.u_star = eq.u;
  r.v_star = eq.v;
  r.det_j = eq.u * eq.v * k.R;
  r.phi_star = phi(rates, eq.v);
  r.phi_prime_star = phi_prime(rates, eq.v);
  r.alpha = p.r21 * eq.u * r.phi_prime_star - p.r22 * r.phi_star;
  r.beta = p.d_u * p.r22 * eq.v + p.d_v * p.r11 * eq.u;

  const double av = r.alpha * eq.v;
  const double dphi_det = p.d_v * r.phi_star * r.det_j;
  r.q2 = av * av;
  r.q1 = -2.0 * (r.alpha * r.beta * eq.v + 2.0 * dphi_det);
  r.q0 = r.beta * r.beta - 4.0 * p.d_u * p.d_v * r.det_j;

  r.d12 = p.d12;
  if (!(r.alpha > 0.0)) {
    r.turing_possible = false;
    r.reason = "alpha_nonpositive";
    r.tilde_d12 = r.d12_minus = r.d12_plus = kNaN;
    r.delta_star_star = r.alt_delta_star_star = kNaN;
    r.alt_d12_minus = r.alt_d12_plus = kNaN;
  } else {
    r.turing_possible = true;
    r.reason = "ok";
    r.tilde_d12 = r.beta / av;
    const auto roots = quadratic_roots(r.q2, r.q1, r.q0);
    r.d12_minus = roots[0];
    r.d12_plus = roots[1];
    r.delta_star_star = (r.q1 * r.q1 - 4.0 * r.q2 * r.q0) / 16.0;
    r.alt_delta_star_star = dphi_det * dphi_det + av * (r.beta * r.phi_star + p.d_v * av);
    const double scale = 2.0 / (av * av);
    r.alt_d12_minus = r.tilde_d12 + scale * (dphi_det - std::sqrt(r.alt_delta_star_star));
    r.alt_d12_plus = r.tilde_d12 + scale * (dphi_det + std::sqrt(r.alt_delta_star_star));
  }

  ModelSpec model;
  model.variant = Variant::SktPlusLimit;
  model.reaction = p;
  model.rates = rates;
  r.band_at_d12 = unstable_band(dispersion_coeffs(model, eq));
  r.unstable_at_d12 = r.turing_possible && p.d12 > r.d12_plus;
  r.length = length;
  if (length && r.band_at_d12) r.unstable_modes_at_d12 = unstable_modes(*r.band_at_d12, *length);
  return r;
}

double delta_star(const ReactionParams& p, const TransitionRates& rates, double d12) {
  ReactionParams q = p;
  q.d12 = d12;
  ModelSpec model;
  model.variant = Variant::SktPlusLimit;
  model.reaction = q;
  model.rates = rates;
  const DispersionCoeffs c = dispersion_coeffs(model, coexistence(q));
  return c.b1 * c.b1 - 4.0 * c.a2 * c.c0;
}

HidingCheck hiding_stability_check(const ReactionParams& p, const TransitionRates& rates) {
  p.validate();
  require_weak(p);
  require_hiding_admissible(p);
  const Equilibrium eq = coexistence(p);
  ModelSpec model;
  model.variant = Variant::SktMinusLimit;
  model.reaction = p;
  model.rates = rates;
  model.validate();
  const DispersionCoeffs c = dispersion_coeffs(model, eq);

  HidingCheck out;
  out.summands = {c.d1 * p.r22 * eq.v, p.d_v * p.r11 * eq.u, -c.d2 * p.r21 * eq.v};
  out.b1 = c.b1;
  out.d2_sign = sign_of(c.d2);
  out.band = unstable_band(c);
  const bool ok = out.b1 > 0.0 && out.summands[0] > 0.0 && out.summands[1] > 0.0 &&
                  out.summands[2] >= 0.0 && !out.band;
  out.verdict = ok ? HidingVerdict::AlwaysStable : HidingVerdict::Counterexample;
  return out;
}

DdsCondition dds_necessary_condition(const DdsParams& dp, const TransitionRates& rates,
                                     const Equilibrium& eq) {
  DdsCondition out;
  out.partition = dds_partition(dp, rates, eq.u, eq.v);
  out.dq3 = dds_q_gradient(dp, rates, out.partition.u_a, out.partition.u_b, eq.v).d3;
  out.lhs = (dp.d_b - dp.d_a) * out.dq3;
  out.lhs_sign = sign_of(out.lhs);
  out.satisfied = out.lhs < 0.0;
  return out;
}

SignStructure sign_classify(const std::array<int, 4>& signs, int d2_sign) {
  for (int s : signs) {
    if (s != 1 && s != -1) {
      throw ConfigError("zero_sign", "Jacobian sign entries must be +1 or -1");
    }
  }
  if (d2_sign < -1 || d2_sign > 1) {
    throw ConfigError("invalid_sign", "d2 sign must be -1, 0 or +1");
  }
  SignStructure out;
  out.signs = signs;
  out.d2_sign = d2_sign;
  const auto [s11, s12, s21, s22] = signs;

  // tr < 0 and det > 0 must be attainable for some magnitudes.
  if (s11 > 0 && s22 > 0) {
    out.category = SignCategory::ReactionUnstable;
  } else if (s11 < 0 && s22 < 0) {
    out.category = SignCategory::NonActivatorInhibitor;
  } else {
    out.category = (s12 * s21 < 0) ? SignCategory::ActivatorInhibitor
                                   : SignCategory::ReactionUnstable;
  }

  switch (out.category) {
    case SignCategory::ReactionUnstable:
      out.verdict = CrossDiffusionVerdict::NotApplicable;
      break;
    case SignCategory::NonActivatorInhibitor:
      out.verdict = s21 < 0 ? CrossDiffusionVerdict::RequiredIncreasing
                            : CrossDiffusionVerdict::RequiredDecreasing;
      break;
    case SignCategory::ActivatorInhibitor:
      if (d2_sign == 0) {
        out.verdict = CrossDiffusionVerdict::NotApplicable;
      } else {
        out.verdict = d2_sign * s21 < 0 ? CrossDiffusionVerdict::Enhances
                                        : CrossDiffusionVerdict::Reduces;
      }
      break;
  }
  out.favours_instability = out.category != SignCategory::ReactionUnstable && d2_sign * s21 < 0;
  return out;
}

std::string_view to_string(HidingVerdict v) {
  return v == HidingVerdict::AlwaysStable ? "AlwaysStable" : "Counterexample";
}

std::string_view to_string(SignCategory c) {
  switch (c) {
    case SignCategory::ReactionUnstable: return "ReactionUnstable";
    case SignCategory::ActivatorInhibitor: return "ActivatorInhibitor";
    case SignCategory::NonActivatorInhibitor: return "NonActivatorInhibitor";
  }
  return "?";
}

std::string_view to_string(CrossDiffusionVerdict v) {
  switch (v) {
    case CrossDiffusionVerdict::RequiredIncreasing: return "RequiredIncreasing";
    case CrossDiffusionVerdict::RequiredDecreasing: return "RequiredDecreasing";
    case CrossDiffusionVerdict::Enhances: return "Enhances";
    case CrossDiffusionVerdict::Reduces: return "Reduces";
    case CrossDiffusionVerdict::NotApplicable: return "NotApplicable";
  }
  return "?";
}

}  // namespace crossdiff

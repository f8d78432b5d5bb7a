#include "crossdiff/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crossdiff/error.hpp"

namespace crossdiff {

namespace {

constexpr double kRatioTol = 1e-12;
constexpr double kStabilityTol = 1e-12;

// Sign of a - b, with |a - b| <= tol * max(|a|, |b|) mapped to zero.
int strict_sign(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  const double diff = a - b;
  if (std::abs(diff) <= kRatioTol * scale) return 0;
  return diff > 0 ? 1 : -1;
}

}  // namespace

void ReactionParams::validate() const {
  const auto positive = [](double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ConfigError("invalid_reaction_params",
                        std::string(name) + " must be finite and > 0");
    }
  };
  positive(r_u, "r_u");
  positive(r_v, "r_v");
  positive(r11, "r11");
  positive(r12, "r12");
  positive(r21, "r21");
  positive(r22, "r22");
  positive(d_u, "d_u");
  positive(d_v, "d_v");
  if (!(d12 >= 0.0) || !std::isfinite(d12)) {
    throw ConfigError("invalid_reaction_params", "d12 must be finite and >= 0");
  }
}

Rst rst(const ReactionParams& p) {
  return {p.r11 * p.r22 - p.r12 * p.r21, p.r_v * p.r11 - p.r_u * p.r21,
          p.r_u * p.r22 - p.r_v * p.r12};
}

RegimeClass classify_regime(const ReactionParams& p) {
  RegimeClass out;
  out.rst = rst(p);
  // r12/r22 < r_u/r_v  <=>  T > 0;   r_u/r_v < r11/r21  <=>  S > 0.
  const int t_sign = strict_sign(p.r_u * p.r22, p.r_v * p.r12);
  const int s_sign = strict_sign(p.r_v * p.r11, p.r_u * p.r21);
  const int r_sign = strict_sign(p.r11 * p.r22, p.r12 * p.r21);
  if (t_sign > 0 && s_sign > 0 && r_sign > 0) {
    out.tag = Regime::Weak;
  } else if (t_sign < 0 && s_sign < 0 && r_sign < 0) {
    out.tag = Regime::Strong;
  } else {
    out.tag = Regime::NoCoexistence;
  }
  return out;
}

std::vector<Equilibrium> equilibria(const ReactionParams& p) {
  std::vector<Equilibrium> out;
  out.push_back({0.0, 0.0, EquilibriumKind::Trivial});
  out.push_back({p.r_u / p.r11, 0.0, EquilibriumKind::SemiTrivialU});
  out.push_back({0.0, p.r_v / p.r22, EquilibriumKind::SemiTrivialV});
  const RegimeClass regime = classify_regime(p);
  if (regime.tag != Regime::NoCoexistence) {
    out.push_back({regime.rst.T / regime.rst.R, regime.rst.S / regime.rst.R,
                   EquilibriumKind::Coexistence});
  }
  for (auto& eq : out) eq.stability = classify_equilibrium(p, eq);
  return out;
}

Equilibrium coexistence(const ReactionParams& p) {
  for (const auto& eq : equilibria(p)) {
    if (eq.kind == EquilibriumKind::Coexistence) return eq;
  }
  throw ConfigError("no_coexistence",
                    "reaction parameters admit no coexistence equilibrium "
                    "(NoCoexistence regime)");
}

ReactionRates reaction(double u, double v, const ReactionParams& p) {
  return {u * (p.r_u - p.r11 * u - p.r12 * v),
          v * (p.r_v - p.r21 * u - p.r22 * v)};
}

Mat2 jacobian(double u, double v, const ReactionParams& p) {
  return {p.r_u - 2.0 * p.r11 * u - p.r12 * v, -p.r12 * u, -p.r21 * v,
          p.r_v - p.r21 * u - 2.0 * p.r22 * v};
}

std::array<double, 2> eigen_real_parts(const Mat2& m) {
  const double tr = m.trace();
  const double det = m.det();
  const double disc = tr * tr - 4.0 * det;
  if (disc < 0.0) return {0.5 * tr, 0.5 * tr};
  // Larger-magnitude root first, the other from the product.
  const double q = 0.5 * (tr + std::copysign(std::sqrt(disc), tr));
  if (q == 0.0) return {0.0, 0.0};
  const double l1 = q;
  const double l2 = det / q;
  return {std::min(l1, l2), std::max(l1, l2)};
}

Stability classify_stability(const Mat2& m) {
  const double tr = m.trace();
  const double det = m.det();
  const double scale = std::max({std::abs(tr), std::sqrt(std::abs(det)), 1.0});
  const auto [lo, hi] = eigen_real_parts(m);
  if (std::abs(lo) < kStabilityTol * scale || std::abs(hi) < kStabilityTol * scale) {
    return Stability::Marginal;
  }
  return (tr < 0.0 && det > 0.0) ? Stability::Stable : Stability::Unstable;
}

Stability classify_equilibrium(const ReactionParams& p, const Equilibrium& eq) {
  return classify_stability(jacobian(eq.u, eq.v, p));
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Weak: return "Weak";
    case Regime::Strong: return "Strong";
    case Regime::NoCoexistence: return "NoCoexistence";
  }
  return "?";
}

std::string_view to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::Trivial: return "Trivial";
    case EquilibriumKind::SemiTrivialU: return "SemiTrivialU";
    case EquilibriumKind::SemiTrivialV: return "SemiTrivialV";
    case EquilibriumKind::Coexistence: return "Coexistence";
  }
  return "?";
}

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "Stable";
    case Stability::Unstable: return "Unstable";
    case Stability::Marginal: return "Marginal";
  }
  return "?";
}

}  // namespace crossdiff

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crossdiff/diffusivity.hpp"
#include "crossdiff/kinetics.hpp"
#include "crossdiff/model.hpp"

namespace crossdiff {

// Mode determinant det M_n = a2 lambda^2 + b1 lambda + c0 of the linearised
// system at an equilibrium, plus what is needed to rebuild the mode matrix
//   [ J11 - D1 lambda   J12 - D2 lambda ]
//   [ J21               J22 - d_v lambda ].
struct DispersionCoeffs {
  double a2 = 0.0;
  double b1 = 0.0;
  double c0 = 0.0;
  double d1 = 0.0;   // dD/du at the equilibrium
  double d2 = 0.0;   // dD/dv at the equilibrium
  double d_v = 0.0;
  Mat2 jac;
};

struct Band {
  double lo = 0.0;
  double hi = 0.0;
  bool homogeneous_unstable = false;  // c0 < 0: the band touches lambda = 0

  bool contains(double lambda) const { return lambda > lo && lambda < hi; }
};

// lambda_n = (n pi / L)^2, n = 0..n_max (Neumann eigenvalues on [0, L]).
std::vector<double> neumann_eigenvalues(double length, int n_max);

DispersionCoeffs dispersion_coeffs(const ModelSpec& model, const Equilibrium& eq);

double mode_determinant(const DispersionCoeffs& c, double lambda);
Mat2 mode_matrix(const DispersionCoeffs& c, double lambda);

// Largest eigenvalue real part of the mode matrix with trace
// trace_at_eq - (D1 + d_v) lambda and determinant a2 lambda^2 + b1 lambda + c0.
double growth_rate(const DispersionCoeffs& c, double trace_at_eq, double lambda);

// Open lambda-interval with negative mode determinant, if any.
std::optional<Band> unstable_band(const DispersionCoeffs& c);

// Indices n >= 1 with lambda_n inside the band.
std::vector<int> unstable_modes(const Band& band, double length);

struct ThresholdReport {
  double u_star = 0.0;
  double v_star = 0.0;
  double det_j = 0.0;
  double phi_star = 0.0;
  double phi_prime_star = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double tilde_d12 = 0.0;
  // Delta*(d12) = q2 d12^2 + q1 d12 + q0.
  double q2 = 0.0;
  double q1 = 0.0;
  double q0 = 0.0;
  double d12_minus = 0.0;
  double d12_plus = 0.0;
  // Quarter discriminant of the d12 quadratic, normalised so that
  // d12_pm = tilde_d12 + 2 (d_v phi det J +- sqrt(delta_star_star)) / (alpha v*)^2.
  double delta_star_star = 0.0;
  // The alternative closed form
  //   (d_v phi det J)^2 + alpha v* (beta phi + d_v alpha v*)
  // and the roots it would give; reported for comparison only.
  double alt_delta_star_star = 0.0;
  double alt_d12_minus = 0.0;
  double alt_d12_plus = 0.0;
  bool turing_possible = false;
  std::string reason;

  // Verdict at the configured d12.
  double d12 = 0.0;
  bool unstable_at_d12 = false;
  std::optional<Band> band_at_d12;
  std::optional<double> length;
  std::vector<int> unstable_modes_at_d12;
};

// Avoidance-model thresholds. Requires the Weak regime. When `length` is set
// the discrete Neumann modes inside the band at p.d12 are listed.
ThresholdReport turing_threshold_plus(const ReactionParams& p, const TransitionRates& rates,
                                      std::optional<double> length = std::nullopt);

// Delta*(d12) = B^2 - 4 a2 c0 built from the dispersion coefficients of the
// avoidance model with cross-diffusion d12.
double delta_star(const ReactionParams& p, const TransitionRates& rates, double d12);

enum class HidingVerdict { AlwaysStable, Counterexample };

struct HidingCheck {
  double b1 = 0.0;
  // d1 r22 v*, d_v r11 u*, -d2 r21 v*  (sum == b1)
  std::array<double, 3> summands{};
  int d2_sign = 0;
  HidingVerdict verdict = HidingVerdict::AlwaysStable;
  std::optional<Band> band;
};

HidingCheck hiding_stability_check(const ReactionParams& p, const TransitionRates& rates);

struct DdsCondition {
  Partition partition;
  double dq3 = 0.0;
  double lhs = 0.0;  // (d_b - d_a) dQ/dv
  int lhs_sign = 0;
  bool satisfied = false;
};

// Necessary condition (d_b - d_a) dQ_DDS/dv < 0 for Turing instability.
DdsCondition dds_necessary_condition(const DdsParams& dp, const TransitionRates& rates,
                                     const Equilibrium& eq);

enum class SignCategory { ReactionUnstable, ActivatorInhibitor, NonActivatorInhibitor };
enum class CrossDiffusionVerdict {
  RequiredIncreasing,
  RequiredDecreasing,
  Enhances,
  Reduces,
  NotApplicable
};

struct SignStructure {
  std::array<int, 4> signs{};  // J11, J12, J21, J22 in {-1, +1}
  int d2_sign = 0;             // sign of dD/dv in {-1, 0, +1}
  SignCategory category = SignCategory::ReactionUnstable;
  CrossDiffusionVerdict verdict = CrossDiffusionVerdict::NotApplicable;
  // Cross-diffusion lowers B (sign(dD/dv) * J21 < 0). dB/d(dD/dv) = J21.
  bool favours_instability = false;
};

// Throws ConfigError("zero_sign") on zero Jacobian signs or |sign| != 1.
SignStructure sign_classify(const std::array<int, 4>& signs, int d2_sign);

std::string_view to_string(HidingVerdict v);
std::string_view to_string(SignCategory c);
std::string_view to_string(CrossDiffusionVerdict v);

}  // namespace crossdiff

#pragma once

#include <array>
#include <string_view>
#include <vector>

namespace crossdiff {

// Lotka-Volterra competition rates and the diffusion constants of the
// triangular systems. Rates are 1/time (r_u, r_v) or 1/(density*time)
// (r11..r22); d_u, d_v, d12 are length^2/time.
struct ReactionParams {
  double r_u = 1.0;
  double r_v = 1.0;
  double r11 = 1.0;
  double r12 = 0.0;
  double r21 = 0.0;
  double r22 = 1.0;
  double d_u = 1.0;
  double d_v = 1.0;
  double d12 = 0.0;

  // Throws ConfigError unless all rates and d_u, d_v are > 0 and d12 >= 0.
  void validate() const;
};

struct Rst {
  double R = 0.0;
  double S = 0.0;
  double T = 0.0;
};

enum class Regime { Weak, Strong, NoCoexistence };

struct RegimeClass {
  Regime tag = Regime::NoCoexistence;
  Rst rst;
};

enum class EquilibriumKind { Trivial, SemiTrivialU, SemiTrivialV, Coexistence };
enum class Stability { Stable, Unstable, Marginal };

struct Equilibrium {
  double u = 0.0;
  double v = 0.0;
  EquilibriumKind kind = EquilibriumKind::Trivial;
  Stability stability = Stability::Marginal;
};

// Row-major 2x2 matrix.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

  double trace() const { return a11 + a22; }
  double det() const { return a11 * a22 - a12 * a21; }
};

struct ReactionRates {
  double f = 0.0;
  double g = 0.0;
};

Rst rst(const ReactionParams& p);

// Ratios equal within 1e-12 relative are treated as boundary cases and
// classified NoCoexistence.
RegimeClass classify_regime(const ReactionParams& p);

// Always the three boundary equilibria; the coexistence state (T/R, S/R)
// only in the Weak and Strong regimes. Stability is filled in.
std::vector<Equilibrium> equilibria(const ReactionParams& p);

// Coexistence equilibrium; throws ConfigError("no_coexistence") otherwise.
Equilibrium coexistence(const ReactionParams& p);

ReactionRates reaction(double u, double v, const ReactionParams& p);
Mat2 jacobian(double u, double v, const ReactionParams& p);

// Closed-form 2x2 eigenvalue real parts, {min, max}.
std::array<double, 2> eigen_real_parts(const Mat2& m);

// Marginal if some eigenvalue real part is within 1e-12 * max(|tr|, sqrt|det|, 1)
// of zero; otherwise Stable iff tr < 0 and det > 0.
Stability classify_stability(const Mat2& m);
Stability classify_equilibrium(const ReactionParams& p, const Equilibrium& eq);

std::string_view to_string(Regime r);
std::string_view to_string(EquilibriumKind k);
std::string_view to_string(Stability s);

}  // namespace crossdiff

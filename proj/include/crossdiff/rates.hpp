#pragma once

#include <string_view>
#include <variant>
#include <vector>

namespace crossdiff {

// h(w) = w/M, k(w) = 1 - w/M on [0, M]; gives phi(v) = v/M.
struct SktLinear {
  double M = 1.0;
};

// h(w) = A + w, k(w) = B + w on [0, inf).
struct Affine {
  double A = 1.0;
  double B = 1.0;
};

// h(w) = (A + w)^alpha, k(w) = (B + w)^beta on [0, inf). Requires A > 0,
// B >= 0 and 0 < alpha <= beta; no further restriction is imposed.
struct PowerLaw {
  double A = 1.0;
  double B = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
};

// Tabulated h, k on strictly increasing nodes w, interpolated by monotone
// piecewise cubic Hermite (Fritsch-Carlson) splines.
struct Custom {
  std::vector<double> w;
  std::vector<double> h;
  std::vector<double> k;
};

struct RateValues {
  double h = 0.0;
  double k = 0.0;
  double dh = 0.0;
  double dk = 0.0;
};

// Monotone cubic Hermite interpolant with analytic derivative.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  // Value and first derivative at t (t must lie in [front, back]).
  std::pair<double, double> eval(double t) const;

 private:
  std::vector<double> x_, y_, m_;
};

// Transition rates (h, k) of the fast exchange u_a <-> u_b. Immutable after
// construction.
class TransitionRates {
 public:
  using Family = std::variant<SktLinear, Affine, PowerLaw, Custom>;

  TransitionRates() : TransitionRates(SktLinear{}) {}
  explicit TransitionRates(Family family);

  const Family& family() const { return family_; }
  std::string_view name() const;

  // Admissible argument range [lo, hi] (hi may be +inf).
  double lower() const { return lo_; }
  double upper() const { return hi_; }

  // Arguments outside the range by more than 1e-8 * max(1, |bound|) throw
  // DomainError; smaller excursions are clamped onto the range.
  RateValues eval(double w) const;
  double clamp(double w) const;

  // Sampled checks of the structural hypotheses. Endpoints where h or k
  // vanish (SktLinear at 0 and M) are excluded from the strict positivity
  // test. `upper` bounds the sampled range for unbounded families.
  bool skt_admissible(double upper = 10.0, int samples = 257) const;
  bool dds_admissible(double upper = 10.0, int samples = 257) const;

 private:
  Family family_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  MonotoneCubic h_spline_, k_spline_;
};

}  // namespace crossdiff

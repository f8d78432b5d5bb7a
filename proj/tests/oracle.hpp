#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerics; inputs are plain numbers.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

struct Lv {
  double r_u, r_v, r11, r12, r21, r22;
};

// Coexistence by Cramer's rule on r11 u + r12 v = r_u, r21 u + r22 v = r_v.
inline std::pair<double, double> coexistence(const Lv& p) {
  const double det = p.r11 * p.r22 - p.r12 * p.r21;
  return {(p.r_u * p.r22 - p.r12 * p.r_v) / det, (p.r11 * p.r_v - p.r21 * p.r_u) / det};
}

inline std::array<double, 2> lv_rhs(const Lv& p, double u, double v) {
  return {u * (p.r_u - p.r11 * u - p.r12 * v), v * (p.r_v - p.r21 * u - p.r22 * v)};
}

// Jacobian by central differences of the rhs; row-major {a11, a12, a21, a22}.
inline std::array<double, 4> fd_jacobian(const Lv& p, double u, double v, double h = 1e-6) {
  const auto fu_p = lv_rhs(p, u + h, v), fu_m = lv_rhs(p, u - h, v);
  const auto fv_p = lv_rhs(p, u, v + h), fv_m = lv_rhs(p, u, v - h);
  return {(fu_p[0] - fu_m[0]) / (2 * h), (fv_p[0] - fv_m[0]) / (2 * h),
          (fu_p[1] - fu_m[1]) / (2 * h), (fv_p[1] - fv_m[1]) / (2 * h)};
}

// Largest real part of the eigenvalues of a real 2x2 matrix via complex roots.
inline double max_real_eig(const std::array<double, 4>& m) {
  const double tr = m[0] + m[3];
  const double det = m[0] * m[3] - m[1] * m[2];
  const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4 * det, 0.0));
  return std::max(((tr + disc) / 2.0).real(), ((tr - disc) / 2.0).real());
}

// Real roots of q2 x^2 + q1 x + q0 in long double, ascending.
inline std::pair<double, double> quadratic_roots(long double q2, long double q1, long double q0) {
  const long double s = std::sqrt(q1 * q1 - 4 * q2 * q0);
  const long double a = (-q1 - s) / (2 * q2), b = (-q1 + s) / (2 * q2);
  return {static_cast<double>(std::min(a, b)), static_cast<double>(std::max(a, b))};
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-13) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > tol * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Dispersion coefficients of u_t = Lap(D(u,v)) + f, v_t = d_v Lap v + g, with
// D's gradient and the Jacobian taken by central differences.
struct Dispersion {
  double a2, b1, c0;
  std::array<double, 4> jac;
  double d1, d2;
};

inline Dispersion dispersion(const Lv& p, double d_v,
                             const std::function<double(double, double)>& D, double u,
                             double v, double h = 1e-6) {
  Dispersion out{};
  out.jac = fd_jacobian(p, u, v);
  out.d1 = (D(u + h, v) - D(u - h, v)) / (2 * h);
  out.d2 = (D(u, v + h) - D(u, v - h)) / (2 * h);
  out.a2 = d_v * out.d1;
  out.b1 = -out.d1 * out.jac[3] - d_v * out.jac[0] + out.d2 * out.jac[2];
  out.c0 = out.jac[0] * out.jac[3] - out.jac[1] * out.jac[2];
  return out;
}

// Eigenvalue of the cell-centred Neumann second difference for cos(n pi x / L).
inline double discrete_neumann_eigenvalue(int n, double length, int cells) {
  const double dx = length / cells;
  const double s = std::sin(n * std::numbers::pi * dx / (2 * length));
  return -4.0 * s * s / (dx * dx);
}

// Scalar DDS partition by plain bisection in long double.
struct DdsRates {
  // h(w) = A_h + w^alpha_h-style closures supplied by the caller.
  std::function<long double(long double)> h, k;
};

inline double dds_partition(double a, double b, double c, double d, const DdsRates& r,
                            double u, double v) {
  auto q = [&](long double ub) {
    const long double ua = u - ub;
    return r.k(b * ub + d * v) * ub - r.h(a * ua + c * v) * ua;
  };
  long double lo = 0, hi = u;
  for (int i = 0; i < 200; ++i) {
    const long double mid = (lo + hi) / 2;
    if (q(mid) < 0) lo = mid; else hi = mid;
  }
  return static_cast<double>((lo + hi) / 2);
}

// Sign matrices {J11, J12, J21, J22} displayed as the activator-inhibitor and
// non-activator-inhibitor lists; everything else is reaction-unstable.
inline const std::vector<std::array<int, 4>>& activator_inhibitor_list() {
  static const std::vector<std::array<int, 4>> m = {
      {+1, +1, -1, -1}, {+1, -1, +1, -1}, {-1, +1, -1, +1}, {-1, -1, +1, +1}};
  return m;
}

inline const std::vector<std::array<int, 4>>& non_activator_inhibitor_list() {
  static const std::vector<std::array<int, 4>> m = {
      {-1, -1, -1, -1}, {-1, +1, -1, -1}, {-1, -1, +1, -1}, {-1, +1, +1, -1}};
  return m;
}

// Random Lotka-Volterra draws in the weak (R, S, T > 0) or strong (all < 0)
// regime, built from a chosen coexistence point so the regime is guaranteed.
inline Lv random_weak(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0.2, 5.0), frac(0.05, 0.95);
  for (;;) {
    Lv p{};
    p.r11 = pos(rng);
    p.r22 = pos(rng);
    p.r12 = frac(rng) * p.r22 * frac(rng) * 1.9;
    p.r21 = frac(rng) * p.r11 * frac(rng) * 1.9;
    const double u = pos(rng), v = pos(rng);
    p.r_u = p.r11 * u + p.r12 * v;
    p.r_v = p.r21 * u + p.r22 * v;
    const double R = p.r11 * p.r22 - p.r12 * p.r21;
    const double S = p.r_v * p.r11 - p.r_u * p.r21;
    const double T = p.r_u * p.r22 - p.r_v * p.r12;
    const double scale = std::max({std::abs(p.r11 * p.r22), std::abs(p.r_v * p.r11),
                                   std::abs(p.r_u * p.r22)});
    if (R > 1e-3 * scale && S > 1e-3 * scale && T > 1e-3 * scale) return p;
  }
}

inline Lv random_strong(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0.2, 5.0), big(1.1, 4.0);
  for (;;) {
    Lv p{};
    p.r11 = pos(rng);
    p.r22 = pos(rng);
    p.r12 = big(rng) * p.r22;
    p.r21 = big(rng) * p.r11;
    const double u = pos(rng), v = pos(rng);
    p.r_u = p.r11 * u + p.r12 * v;
    p.r_v = p.r21 * u + p.r22 * v;
    const double R = p.r11 * p.r22 - p.r12 * p.r21;
    const double S = p.r_v * p.r11 - p.r_u * p.r21;
    const double T = p.r_u * p.r22 - p.r_v * p.r12;
    const double scale = std::max({std::abs(p.r12 * p.r21), std::abs(p.r_u * p.r21),
                                   std::abs(p.r_v * p.r12)});
    if (R < -1e-3 * scale && S < -1e-3 * scale && T < -1e-3 * scale) return p;
  }
}

}  // namespace oracle

#include "crossdiff/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "crossdiff/error.hpp"

namespace crossdiff {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) {
    throw ConfigError("invalid_table", "tabulated rates need >= 2 nodes and matching sizes");
  }
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double hx = x_[i + 1] - x_[i];
    if (!(hx > 0.0)) {
      throw ConfigError("invalid_table", "tabulated nodes must be strictly increasing");
    }
    delta[i] = (y_[i + 1] - y_[i]) / hx;
  }
  m_.assign(n, 0.0);
  m_[0] = delta[0];
  m_[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    m_[i] = (delta[i - 1] * delta[i] <= 0.0) ? 0.0 : 0.5 * (delta[i - 1] + delta[i]);
  }
  // Fritsch-Carlson limiter: keep (alpha, beta) inside the circle of radius 3.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (delta[i] == 0.0) {
      m_[i] = 0.0;
      m_[i + 1] = 0.0;
      continue;
    }
    const double a = m_[i] / delta[i];
    const double b = m_[i + 1] / delta[i];
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      m_[i] = tau * a * delta[i];
      m_[i + 1] = tau * b * delta[i];
    }
  }
}

std::pair<double, double> MonotoneCubic::eval(double t) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  i = std::min(i, x_.size() - 2);
  const double hx = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / hx;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  const double value = h00 * y_[i] + h10 * hx * m_[i] + h01 * y_[i + 1] + h11 * hx * m_[i + 1];
  const double d00 = (6 * s2 - 6 * s) / hx;
  const double d10 = 3 * s2 - 4 * s + 1;
  const double d01 = (-6 * s2 + 6 * s) / hx;
  const double d11 = 3 * s2 - 2 * s;
  const double slope = d00 * y_[i] + d10 * m_[i] + d01 * y_[i + 1] + d11 * m_[i + 1];
  return {value, slope};
}

TransitionRates::TransitionRates(Family family) : family_(std::move(family)) {
  std::visit(
      overloaded{
          [&](const SktLinear& f) {
            if (!finite_positive(f.M)) throw ConfigError("invalid_rates", "SktLinear needs M > 0");
            lo_ = 0.0;
            hi_ = f.M;
          },
          [&](const Affine& f) {
            if (!finite_positive(f.A) || !finite_positive(f.B)) {
              throw ConfigError("invalid_rates", "Affine needs A > 0 and B > 0");
            }
            lo_ = 0.0;
            hi_ = std::numeric_limits<double>::infinity();
          },
          [&](const PowerLaw& f) {
            if (!finite_positive(f.A) || !(f.B >= 0.0) || !finite_positive(f.alpha) ||
                !finite_positive(f.beta) || f.alpha > f.beta) {
              throw ConfigError("invalid_rates",
                                "PowerLaw needs A > 0, B >= 0 and 0 < alpha <= beta");
            }
            lo_ = 0.0;
            hi_ = std::numeric_limits<double>::infinity();
          },
          [&](const Custom& f) {
            h_spline_ = MonotoneCubic(f.w, f.h);
            k_spline_ = MonotoneCubic(f.w, f.k);
            lo_ = f.w.front();
            hi_ = f.w.back();
          },
      },
      family_);
}

std::string_view TransitionRates::name() const {
  return std::visit(overloaded{
                        [](const SktLinear&) { return std::string_view("skt_linear"); },
                        [](const Affine&) { return std::string_view("affine"); },
                        [](const PowerLaw&) { return std::string_view("power_law"); },
                        [](const Custom&) { return std::string_view("custom"); },
                    },
                    family_);
}

double TransitionRates::clamp(double w) const {
  if (w >= lo_ && w <= hi_) return w;
  const double slack_lo = 1e-8 * std::max(1.0, std::abs(lo_));
  const double slack_hi = std::isfinite(hi_) ? 1e-8 * std::max(1.0, std::abs(hi_)) : 0.0;
  if (w < lo_ && w >= lo_ - slack_lo) return lo_;
  if (w > hi_ && w <= hi_ + slack_hi) return hi_;
  throw DomainError("rate_domain", "transition-rate argument " + std::to_string(w) +
                                       " outside admissible range [" + std::to_string(lo_) +
                                       ", " + std::to_string(hi_) + "] of " +
                                       std::string(name()));
}

RateValues TransitionRates::eval(double w) const {
  w = clamp(w);
  return std::visit(
      overloaded{
          [&](const SktLinear& f) {
            return RateValues{w / f.M, 1.0 - w / f.M, 1.0 / f.M, -1.0 / f.M};
          },
          [&](const Affine& f) { return RateValues{f.A + w, f.B + w, 1.0, 1.0}; },
          [&](const PowerLaw& f) {
            const double hb = f.A + w;
            const double kb = f.B + w;
            const double h = std::pow(hb, f.alpha);
            const double k = std::pow(kb, f.beta);
            // pow(0, beta - 1) is +inf for beta < 1, 1 for beta == 1, 0 otherwise.
            const double dk = f.beta * std::pow(kb, f.beta - 1.0);
            return RateValues{h, k, f.alpha * h / hb, dk};
          },
          [&](const Custom&) {
            const auto [h, dh] = h_spline_.eval(w);
            const auto [k, dk] = k_spline_.eval(w);
            return RateValues{h, k, dh, dk};
          },
      },
      family_);
}

bool TransitionRates::skt_admissible(double upper, int samples) const {
  const double hi = std::isfinite(hi_) ? hi_ : upper;
  const bool open_ends = std::holds_alternative<SktLinear>(family_);
  for (int i = 0; i < samples; ++i) {
    const double w = lo_ + (hi - lo_) * static_cast<double>(i) / (samples - 1);
    const bool endpoint = (i == 0 || i == samples - 1);
    const RateValues r = eval(w);
    if (r.h > 1.0 || r.k > 1.0 || r.h < 0.0 || r.k < 0.0) return false;
    if (!(endpoint && open_ends) && (r.h <= 0.0 || r.k <= 0.0)) return false;
    if (r.dh < 0.0 || r.dk > 0.0) return false;
  }
  return true;
}

bool TransitionRates::dds_admissible(double upper, int samples) const {
  const double hi = std::isfinite(hi_) ? hi_ : upper;
  for (int i = 0; i < samples; ++i) {
    const double w = lo_ + (hi - lo_) * static_cast<double>(i) / (samples - 1);
    const RateValues r = eval(w);
    if (!(r.h > 0.0) || !(r.k > 0.0)) return false;
    if (r.dh < 0.0 || r.dk < 0.0) return false;
  }
  return true;
}

}  // namespace crossdiff

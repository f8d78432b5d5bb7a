#include "crossdiff/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <variant>

#include "crossdiff/error.hpp"

namespace crossdiff {

Grid1D::Grid1D(double length, int cells) : length_(length), cells_(cells) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ConfigError("invalid_grid", "grid length must be > 0");
  }
  if (cells < 8) throw ConfigError("invalid_grid", "grid needs at least 8 cells");
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> out(static_cast<std::size_t>(cells_));
  for (int i = 0; i < cells_; ++i) out[static_cast<std::size_t>(i)] = x(i);
  return out;
}

Field SimState::total_u() const {
  if (fields.size() == 2) return fields[0];
  Field out(fields[0].size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fields[0][i] + fields[1][i];
  return out;
}

void neumann_laplacian(std::span<const double> w, double dx, std::span<double> out) {
  const std::size_t n = w.size();
  if (n < 3 || out.size() != n) {
    throw ConfigError("invalid_field", "neumann_laplacian needs >= 3 values");
  }
  const double inv = 1.0 / (dx * dx);
  out[0] = (w[1] - w[0]) * inv;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (w[i - 1] - 2.0 * w[i] + w[i + 1]) * inv;
  out[n - 1] = (w[n - 2] - w[n - 1]) * inv;
}

Field neumann_laplacian(const Field& w, double dx) {
  Field out(w.size());
  neumann_laplacian(std::span<const double>(w), dx, std::span<double>(out));
  return out;
}

std::string_view to_string(TimeScheme s) { return s == TimeScheme::Rk4 ? "rk4" : "rkc2"; }

TimeScheme time_scheme_from_string(std::string_view name) {
  if (name == "rk4") return TimeScheme::Rk4;
  if (name == "rkc2" || name == "rkc") return TimeScheme::Rkc2;
  throw ConfigError("unknown_scheme", "unknown time scheme '" + std::string(name) + "'");
}

void Controls::validate() const {
  if (!(dt_max > 0.0)) throw ConfigError("invalid_controls", "dt_max must be > 0");
  if (!(safety > 0.0 && safety <= 1.0)) {
    throw ConfigError("invalid_controls", "CFL safety factor must lie in (0, 1]");
  }
  if (!(snapshot_every > 0.0)) throw ConfigError("invalid_controls", "snapshot_every must be > 0");
  if (max_rkc_stages < 2) throw ConfigError("invalid_controls", "max_rkc_stages must be >= 2");
}

namespace {

constexpr double kRkcDamping = 2.0 / 13.0;

// Flat layout: species s occupies [s*n, (s+1)*n).
std::vector<double> flatten(const SimState& s) {
  std::vector<double> y;
  for (const auto& f : s.fields) y.insert(y.end(), f.begin(), f.end());
  return y;
}

SimState unflatten(const std::vector<double>& y, std::size_t species, double t) {
  SimState s;
  s.t = t;
  const std::size_t n = y.size() / species;
  for (std::size_t k = 0; k < species; ++k) {
    s.fields.emplace_back(y.begin() + static_cast<std::ptrdiff_t>(k * n),
                          y.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
  }
  return s;
}

// Implicit-midpoint substeps of u_b' = -F(u_b) / eps with u = u_a + u_b fixed.
double dds_exchange_point(const DdsParams& dp, const TransitionRates& rates, double eps,
                          double u, double v, double u_b, double dt) {
  if (u <= 0.0) return u_b;
  const double slope0 = dds_residual(dp, rates, u, v, std::clamp(u_b, 0.0, u)).slope;
  const double stiff = std::max(4.0, slope0);
  const long substeps = std::clamp(static_cast<long>(std::ceil(dt * stiff / eps)), 1L, 10000000L);
  const double h = dt / static_cast<double>(substeps);
  const double c = h / eps;
  double y0 = std::clamp(u_b, 0.0, u);
  for (long s = 0; s < substeps; ++s) {
    // G(m) = 2 (m - y0) + c F(m) is increasing with G(0) <= 0 <= G(u).
    double lo = 0.0;
    double hi = u;
    double m = y0;
    for (int it = 0; it < 100; ++it) {
      const ExchangeResidual r = dds_residual(dp, rates, u, v, m);
      const double g = 2.0 * (m - y0) + c * r.value;
      if (g < 0.0) {
        lo = m;
      } else {
        hi = m;
      }
      const double dg = 2.0 + c * r.slope;
      double next = m - g / dg;
      if (!(next >= lo && next <= hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
      if (std::abs(next - m) <= 1e-15 * u || g == 0.0) {
        m = next;
        break;
      }
      m = next;
    }
    y0 = std::clamp(2.0 * m - y0, 0.0, u);
  }
  return y0;
}

class Integrator {
 public:
  Integrator(const ModelSpec& model, std::size_t n, double dx)
      : model_(model),
        n_(n),
        inv_dx2_(1.0 / (dx * dx)),
        species_(model.species()),
        sign_(model.limit_variant() == Variant::SktMinusLimit ? -1.0 : 1.0),
        linear_(std::get_if<SktLinear>(&model.rates.family())) {
    w_.assign(n_, 0.0);
    lap_a_.assign(n_, 0.0);
    lap_b_.assign(n_, 0.0);
    lap_c_.assign(n_, 0.0);
    cache_.assign(n_, -1.0);
  }

  void set_kinetics(bool on) { rx_ = on ? 1.0 : 0.0; }

  void eval(std::span<const double> y, std::span<double> dy) {
    const auto& p = model_.reaction;
    const double rx = rx_;
    const std::size_t n = n_;
    if (species_ == 2) {
      const double* u = y.data();
      const double* v = y.data() + n;
      for (std::size_t i = 0; i < n; ++i) w_[i] = composite(u[i], v[i], i);
      laplacian(w_.data(), lap_a_.data());
      laplacian(v, lap_b_.data());
      for (std::size_t i = 0; i < n; ++i) {
        dy[i] = lap_a_[i] + rx * u[i] * (p.r_u - p.r11 * u[i] - p.r12 * v[i]);
        dy[n + i] = p.d_v * lap_b_[i] + rx * v[i] * (p.r_v - p.r21 * u[i] - p.r22 * v[i]);
      }
      return;
    }
    const double* ua = y.data();
    const double* ub = y.data() + n;
    const double* v = y.data() + 2 * n;
    const double da = model_.d_a();
    const double db = model_.d_b();
    laplacian(ua, lap_a_.data());
    laplacian(ub, lap_b_.data());
    laplacian(v, lap_c_.data());
    for (std::size_t i = 0; i < n; ++i) {
      const double u = ua[i] + ub[i];
      const double growth = rx * (p.r_u - p.r11 * u - p.r12 * v[i]);
      dy[i] = da * lap_a_[i] + ua[i] * growth;
      dy[n + i] = db * lap_b_[i] + ub[i] * growth;
      dy[2 * n + i] = p.d_v * lap_c_[i] + rx * v[i] * (p.r_v - p.r21 * u - p.r22 * v[i]);
    }
  }

  double effective_diffusivity(std::span<const double> y) const {
    const auto& p = model_.reaction;
    if (model_.is_fast()) return std::max({model_.d_a(), model_.d_b(), p.d_v});
    if (model_.is_dds()) return std::max({model_.dds->d_a, model_.dds->d_b, p.d_v});
    double best = p.d_v;
    for (std::size_t i = 0; i < n_; ++i) {
      best = std::max(best, p.d_u + sign_ * p.d12 * phi_at(y[n_ + i]));
    }
    return best;
  }

  // Max absolute row sum of the reaction Jacobian over the grid.
  double reaction_bound(std::span<const double> y) const {
    const auto& p = model_.reaction;
    double best = 0.0;
    if (rx_ == 0.0) return best;
    for (std::size_t i = 0; i < n_; ++i) {
      const double u = species_ == 2 ? y[i] : y[i] + y[n_ + i];
      const double v = y[(species_ - 1) * n_ + i];
      const Mat2 j = jacobian(u, v, p);
      best = std::max({best, std::abs(j.a11) + std::abs(j.a12), std::abs(j.a21) + std::abs(j.a22)});
    }
    return best;
  }

  void exchange(std::vector<double>& y, double dt) const {
    if (!model_.is_fast()) return;
    const std::size_t n = n_;
    const double eps = model_.epsilon;
    for (std::size_t i = 0; i < n; ++i) {
      const double ua = y[i];
      const double ub = y[n + i];
      const double v = y[2 * n + i];
      const double u = ua + ub;
      double ub_new;
      if (model_.is_dds()) {
        ub_new = dds_exchange_point(*model_.dds, model_.rates, eps, u, std::max(v, 0.0), ub, dt);
      } else {
        const RateValues r = model_.rates.eval(v);
        const double s = r.h + r.k;
        const double target = r.h / s * u;
        ub_new = target + (ub - target) * std::exp(-s * dt / eps);
      }
      y[n + i] = ub_new;
      y[i] = u - ub_new;
    }
  }

  void rk4(std::vector<double>& y, double dt) {
    const std::size_t m = y.size();
    k1_.resize(m);
    k2_.resize(m);
    k3_.resize(m);
    k4_.resize(m);
    tmp_.resize(m);
    eval(y, k1_);
    for (std::size_t i = 0; i < m; ++i) tmp_[i] = y[i] + 0.5 * dt * k1_[i];
    eval(tmp_, k2_);
    for (std::size_t i = 0; i < m; ++i) tmp_[i] = y[i] + 0.5 * dt * k2_[i];
    eval(tmp_, k3_);
    for (std::size_t i = 0; i < m; ++i) tmp_[i] = y[i] + dt * k3_[i];
    eval(tmp_, k4_);
    for (std::size_t i = 0; i < m; ++i) {
      y[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
  }

  static int rkc_stages(double dt, double rho) {
    return 1 + static_cast<int>(std::ceil(std::sqrt(1.0 + 1.54 * dt * rho)));
  }

  // Second-order Runge-Kutta-Chebyshev step with s stages.
  void rkc2(std::vector<double>& y, double dt, int s) {
    const std::size_t m = y.size();
    f0_.resize(m);
    fj_.resize(m);
    yjm1_.resize(m);
    yjm2_.resize(m);
    yj_.resize(m);

    const double w0 = 1.0 + kRkcDamping / (s * s);
    std::vector<double> T(static_cast<std::size_t>(s) + 1), dT(T.size()), ddT(T.size());
    T[0] = 1.0;
    T[1] = w0;
    dT[0] = 0.0;
    dT[1] = 1.0;
    ddT[0] = 0.0;
    ddT[1] = 0.0;
    for (int j = 2; j <= s; ++j) {
      T[j] = 2.0 * w0 * T[j - 1] - T[j - 2];
      dT[j] = 2.0 * T[j - 1] + 2.0 * w0 * dT[j - 1] - dT[j - 2];
      ddT[j] = 4.0 * dT[j - 1] + 2.0 * w0 * ddT[j - 1] - ddT[j - 2];
    }
    const double w1 = dT[s] / ddT[s];
    std::vector<double> b(T.size());
    for (int j = 2; j <= s; ++j) b[j] = ddT[j] / (dT[j] * dT[j]);
    b[0] = b[1] = b[2];

    eval(y, f0_);
    yjm2_ = y;
    const double mu1 = b[1] * w1;
    for (std::size_t i = 0; i < m; ++i) yjm1_[i] = y[i] + mu1 * dt * f0_[i];
    for (int j = 2; j <= s; ++j) {
      const double mu = 2.0 * b[j] * w0 / b[j - 1];
      const double nu = -b[j] / b[j - 2];
      const double mut = 2.0 * b[j] * w1 / b[j - 1];
      const double a_prev = 1.0 - b[j - 1] * T[j - 1];
      const double gam = -a_prev * mut;
      eval(yjm1_, fj_);
      for (std::size_t i = 0; i < m; ++i) {
        yj_[i] = (1.0 - mu - nu) * y[i] + mu * yjm1_[i] + nu * yjm2_[i] + mut * dt * fj_[i] +
                 gam * dt * f0_[i];
      }
      std::swap(yjm2_, yjm1_);
      std::swap(yjm1_, yj_);
    }
    y.swap(yjm1_);
  }

  double phi_at(double v) const {
    if (linear_) return model_.rates.clamp(v) / linear_->M;
    return phi(model_.rates, v);
  }

 private:
  double composite(double u, double v, std::size_t i) {
    const auto& p = model_.reaction;
    if (!model_.is_dds()) return u * (p.d_u + sign_ * p.d12 * phi_at(v));
    const double uc = std::max(u, 0.0);
    try {
      const Partition part = dds_partition(*model_.dds, model_.rates, uc, std::max(v, 0.0),
                                           cache_[i] >= 0.0 ? std::optional(cache_[i])
                                                            : std::nullopt);
      cache_[i] = part.u_b;
      return model_.dds->d_a * uc + (model_.dds->d_b - model_.dds->d_a) * part.u_b;
    } catch (const NumericalError& e) {
      throw NumericalError(e.code(), std::string(e.what()) + " (grid point " +
                                         std::to_string(i) + ")");
    }
  }

  void laplacian(const double* w, double* out) const {
    const std::size_t n = n_;
    out[0] = (w[1] - w[0]) * inv_dx2_;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (w[i - 1] - 2.0 * w[i] + w[i + 1]) * inv_dx2_;
    out[n - 1] = (w[n - 2] - w[n - 1]) * inv_dx2_;
  }

  ModelSpec model_;
  std::size_t n_;
  double inv_dx2_;
  std::size_t species_;
  double sign_;
  const SktLinear* linear_;
  double rx_ = 1.0;
  std::vector<double> w_, lap_a_, lap_b_, lap_c_, cache_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
  std::vector<double> f0_, fj_, yjm1_, yjm2_, yj_;
};

void check_state(const ModelSpec& model, const Grid1D& grid, const SimState& s) {
  if (s.fields.size() != model.species()) {
    throw ConfigError("invalid_state", "state has " + std::to_string(s.fields.size()) +
                                           " fields, model expects " +
                                           std::to_string(model.species()));
  }
  for (const auto& f : s.fields) {
    if (f.size() != static_cast<std::size_t>(grid.cells())) {
      throw ConfigError("invalid_state", "field length does not match the grid");
    }
  }
}

}  // namespace

SimState homogeneous_state(const ModelSpec& model, const Grid1D& grid, double u, double v) {
  const std::size_t n = static_cast<std::size_t>(grid.cells());
  SimState s;
  if (model.is_fast()) {
    const Partition part = quasi_steady_partition(model, u, v);
    s.fields = {Field(n, part.u_a), Field(n, part.u_b), Field(n, v)};
  } else {
    s.fields = {Field(n, u), Field(n, v)};
  }
  return s;
}

SimState rhs(const ModelSpec& model, const Grid1D& grid, const SimState& state) {
  check_state(model, grid, state);
  Integrator integ(model, static_cast<std::size_t>(grid.cells()), grid.dx());
  const std::vector<double> y = flatten(state);
  std::vector<double> dy(y.size());
  integ.eval(y, dy);
  return unflatten(dy, model.species(), state.t);
}

SimState exchange_step(const ModelSpec& model, const SimState& state, double dt) {
  if (!model.is_fast()) {
    throw ConfigError("not_fast_variant", "exchange_step needs a fast variant");
  }
  if (!(dt > 0.0)) throw ConfigError("invalid_dt", "exchange_step needs dt > 0");
  Integrator integ(model, state.fields.at(0).size(), 1.0);
  std::vector<double> y = flatten(state);
  integ.exchange(y, dt);
  return unflatten(y, model.species(), state.t + dt);
}

double max_effective_diffusivity(const ModelSpec& model, const SimState& state) {
  Integrator integ(model, state.fields.at(0).size(), 1.0);
  return integ.effective_diffusivity(flatten(state));
}

Trajectory simulate(const ModelSpec& model, const Grid1D& grid, const SimState& initial,
                    double t_end, const Controls& controls) {
  model.validate();
  controls.validate();
  check_state(model, grid, initial);
  if (!(t_end > initial.t)) throw ConfigError("invalid_t_end", "t_end must exceed initial time");

  Integrator integ(model, static_cast<std::size_t>(grid.cells()), grid.dx());
  integ.set_kinetics(controls.kinetics);
  const std::size_t species = model.species();
  const double dx2 = grid.dx() * grid.dx();
  std::vector<double> y = flatten(initial);

  Trajectory traj;
  traj.field_names = model.field_names();
  traj.times.push_back(initial.t);
  traj.states.push_back(initial);

  const double t0 = initial.t;
  const double time_eps = 1e-12 * std::max(1.0, std::abs(t_end));
  long snapshot_index = 1;
  double t = t0;

  auto next_snapshot = [&]() {
    const double ts = t0 + static_cast<double>(snapshot_index) * controls.snapshot_every;
    return (ts >= t_end - 1e-9 * controls.snapshot_every) ? t_end : ts;
  };

  StepDiagnostics diag;
  auto reset_diag = [&]() {
    diag = StepDiagnostics{};
    diag.t_begin = t;
    diag.dt_min = std::numeric_limits<double>::infinity();
    diag.min_density = std::numeric_limits<double>::infinity();
  };
  reset_diag();

  while (t < t_end - time_eps) {
    const double target = next_snapshot();
    const double d_eff = integ.effective_diffusivity(y);
    double dt = std::min(controls.dt_max, target - t);
    int stages = 4;
    if (controls.scheme == TimeScheme::Rk4) {
      dt = std::min(dt, controls.safety * dx2 / (2.0 * d_eff));
    } else {
      const double rho = 4.0 * d_eff / dx2 / controls.safety + integ.reaction_bound(y);
      stages = Integrator::rkc_stages(dt, rho);
      if (stages > controls.max_rkc_stages) {
        const double s = controls.max_rkc_stages - 1.0;
        dt = std::min(dt, (s * s - 1.0) / (1.54 * rho));
        stages = Integrator::rkc_stages(dt, rho);
      }
      stages = std::max(stages, 2);
    }

    if (model.is_fast()) integ.exchange(y, 0.5 * dt);
    if (controls.scheme == TimeScheme::Rk4) {
      integ.rk4(y, dt);
    } else {
      integ.rkc2(y, dt, stages);
    }
    if (model.is_fast()) integ.exchange(y, 0.5 * dt);

    t = (std::abs(target - (t + dt)) <= time_eps) ? target : t + dt;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : y) {
      if (!std::isfinite(x) || std::abs(x) > controls.blowup_limit) {
        throw NumericalError("blowup", "solution blew up at t=" + std::to_string(t));
      }
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (lo < 0.0) {
      const double scale = std::max(hi, std::abs(lo));
      if (lo < -controls.positivity_tol * scale) {
        throw NumericalError("positivity", "density dropped to " + std::to_string(lo) +
                                               " at t=" + std::to_string(t));
      }
      for (double x : y) diag.positivity_violations += x < 0.0 ? 1 : 0;
    }
    ++diag.steps;
    ++traj.total_steps;
    diag.dt_min = std::min(diag.dt_min, dt);
    diag.dt_max = std::max(diag.dt_max, dt);
    diag.max_stages = std::max(diag.max_stages, stages);
    diag.max_density = std::max(diag.max_density, hi);
    diag.min_density = std::min(diag.min_density, lo);

    if (t == target) {
      diag.t_end = t;
      traj.diagnostics.push_back(diag);
      traj.times.push_back(t);
      traj.states.push_back(unflatten(y, species, t));
      ++snapshot_index;
      reset_diag();
    }
  }
  return traj;
}

}  // namespace crossdiff

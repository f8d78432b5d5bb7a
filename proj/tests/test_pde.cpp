#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "crossdiff/error.hpp"
#include "crossdiff/pde.hpp"
#include "oracle.hpp"

using namespace crossdiff;

namespace {

ModelSpec skt(Variant v, double d12, double eps = 0.0) {
  ModelSpec m;
  m.variant = v;
  m.epsilon = eps;
  m.reaction = {3, 1, 4, 1, 1, 1, 1, 1, d12};
  m.rates = TransitionRates(SktLinear{1.1});
  return m;
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (double x : f) m = std::max(m, std::abs(x));
  return m;
}

double mass(const Field& f, double dx) { return dx * std::accumulate(f.begin(), f.end(), 0.0); }

}  // namespace

TEST_CASE("laplacian null mode") {
  Field c(32, 2.5);
  auto out = neumann_laplacian(c, 0.1);
  for (double x : out) CHECK(x == 0.0);
}

TEST_CASE("laplacian eigenfunctions") {
  const double L = 10.0;
  for (int n : {1, 3}) {
    for (int cells : {16, 64, 256}) {
      Grid1D g(L, cells);
      Field w(cells);
      for (int i = 0; i < cells; ++i) w[i] = std::cos(n * std::numbers::pi * g.x(i) / L);
      auto lap = neumann_laplacian(w, g.dx());
      const double mu = oracle::discrete_neumann_eigenvalue(n, L, cells);
      for (int i = 0; i < cells; ++i) CHECK(lap[i] == doctest::Approx(mu * w[i]).epsilon(1e-9).scale(1));
    }
  }
}

TEST_CASE("laplacian refinement order") {
  const double L = 10.0;
  const double exact = std::pow(std::numbers::pi / L, 2);
  double prev = 0.0;
  for (int cells = 16; cells <= 512; cells *= 2) {
    Grid1D g(L, cells);
    Field w(cells);
    for (int i = 0; i < cells; ++i) w[i] = std::cos(std::numbers::pi * g.x(i) / L);
    auto lap = neumann_laplacian(w, g.dx());
    double err = 0.0;
    for (int i = 0; i < cells; ++i) err = std::max(err, std::abs(lap[i] + exact * w[i]));
    if (prev > 0.0) CHECK(std::log2(prev / err) >= 1.9);
    prev = err;
  }
}

TEST_CASE("equilibrium is a fixed point of the rhs") {
  Grid1D g(10, 64);
  for (auto v : {Variant::SktPlusLimit, Variant::SktMinusLimit}) {
    ModelSpec m = skt(v, 0.5);
    auto eq = coexistence(m.reaction);
    auto r = rhs(m, g, homogeneous_state(m, g, eq.u, eq.v));
    for (const auto& f : r.fields) CHECK(max_abs(f) < 1e-12);
  }
  ModelSpec f = skt(Variant::SktFastPlus, 150, 1e-3);
  auto eq = coexistence(f.reaction);
  auto r = rhs(f, g, homogeneous_state(f, g, eq.u, eq.v));
  for (const auto& x : r.fields) CHECK(max_abs(x) < 1e-12);
}

TEST_CASE("fast rhs on the manifold matches the limit rhs") {
  Grid1D g(10, 48);
  ModelSpec lim = skt(Variant::SktPlusLimit, 20);
  ModelSpec fast = lim.fast(1e-2);
  SimState s = homogeneous_state(lim, g, 0.5, 0.4);
  for (int i = 0; i < g.cells(); ++i) {
    s.fields[0][i] += 0.1 * std::cos(2 * std::numbers::pi * g.x(i) / 10);
    s.fields[1][i] += 0.05 * std::cos(std::numbers::pi * g.x(i) / 10);
  }
  SimState sf;
  sf.fields = {Field(g.cells()), Field(g.cells()), s.fields[1]};
  for (int i = 0; i < g.cells(); ++i) {
    const double ph = s.fields[1][i] / 1.1;
    sf.fields[1][i] = ph * s.fields[0][i];
    sf.fields[0][i] = s.fields[0][i] - sf.fields[1][i];
  }
  auto rl = rhs(lim, g, s);
  auto rf = rhs(fast, g, sf);
  for (int i = 0; i < g.cells(); ++i) {
    CHECK(rf.fields[0][i] + rf.fields[1][i] == doctest::Approx(rl.fields[0][i]).epsilon(1e-10).scale(1));
    CHECK(rf.fields[2][i] == doctest::Approx(rl.fields[1][i]).epsilon(1e-12).scale(1));
  }
}

TEST_CASE("exchange relaxation") {
  Grid1D g(1, 8);
  ModelSpec m = skt(Variant::SktFastPlus, 1, 1e-3);
  SimState s;
  s.fields = {Field(8, 0.9), Field(8, 0.1), Field(8, 0.55)};
  // h + k = 1 for SktLinear, target u_b = phi u = 0.5.
  auto half = exchange_step(m, s, 1e-3 * std::log(2.0));
  CHECK(half.fields[1][0] - 0.5 == doctest::Approx(0.5 * (0.1 - 0.5)));
  auto full = exchange_step(m, s, 1.0);
  CHECK(std::abs(full.fields[0][3] - full.fields[1][3]) < 1e-10);
  CHECK(full.fields[0][3] + full.fields[1][3] == doctest::Approx(1.0).epsilon(1e-15));

  ModelSpec d = m;
  d.variant = Variant::DdsFast;
  d.rates = TransitionRates(Affine{1, 1});
  d.dds = DdsParams{1, 1, 0.5, 0.5, 1, 2};
  auto dd = exchange_step(d, s, 1.0);
  CHECK(std::abs(dd.fields[0][2] - dd.fields[1][2]) < 1e-10);
  CHECK_THROWS_AS(exchange_step(skt(Variant::SktPlusLimit, 1), s, 1.0), ConfigError);
}

TEST_CASE("homogeneous equilibrium run stays put") {
  Grid1D g(10, 32);
  ModelSpec m = skt(Variant::SktPlusLimit, 0);
  auto eq = coexistence(m.reaction);
  Controls c;
  c.snapshot_every = 10;
  auto tr = simulate(m, g, homogeneous_state(m, g, eq.u, eq.v), 50, c);
  for (double x : tr.final_state().fields[0]) CHECK(std::abs(x - eq.u) < 1e-10);
  for (double x : tr.final_state().fields[1]) CHECK(std::abs(x - eq.v) < 1e-10);
  CHECK(tr.times.back() == 50.0);
  CHECK(tr.times.size() == 6);
}

TEST_CASE("mass conservation without kinetics") {
  Grid1D g(10, 64);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> noise(0.5, 1.5);
  for (auto scheme : {TimeScheme::Rk4, TimeScheme::Rkc2}) {
    for (auto v : {Variant::SktPlusLimit, Variant::SktFastPlus, Variant::DdsLimit}) {
      ModelSpec m = skt(v, v == Variant::SktPlusLimit ? 0.0 : 2.0, 1e-2);
      if (v == Variant::DdsLimit) {
        m.rates = TransitionRates(Affine{1, 2});
        m.dds = DdsParams{1, 1, 0.5, 1, 1, 2};
      }
      SimState s = homogeneous_state(m, g, 0.5, 0.3);
      for (auto& f : s.fields) for (double& x : f) x *= noise(rng);
      Controls c;
      c.kinetics = false;
      c.scheme = scheme;
      c.snapshot_every = 1;
      auto tr = simulate(m, g, s, 2, c);
      for (std::size_t k = 0; k < s.fields.size(); ++k) {
        if (m.is_fast() && k < 2) continue;
        const double m0 = mass(s.fields[k], g.dx());
        CHECK(std::abs(mass(tr.final_state().fields[k], g.dx()) - m0) <= 1e-12 * m0);
      }
      const double u0 = mass(s.total_u(), g.dx());
      CHECK(std::abs(mass(tr.final_state().total_u(), g.dx()) - u0) <= 1e-12 * u0);
    }
  }
}

TEST_CASE("RKC agrees with RK4") {
  Grid1D g(10, 32);
  ModelSpec m = skt(Variant::SktPlusLimit, 20);
  auto eq = coexistence(m.reaction);
  SimState s = homogeneous_state(m, g, eq.u, eq.v);
  for (int i = 0; i < g.cells(); ++i) s.fields[0][i] += 0.05 * std::cos(std::numbers::pi * g.x(i) / 10);
  Controls a;
  a.dt_max = 1e-3;
  Controls b;
  b.dt_max = 1e-2;
  b.scheme = TimeScheme::Rkc2;
  auto ra = simulate(m, g, s, 1, a);
  auto rb = simulate(m, g, s, 1, b);
  for (int i = 0; i < g.cells(); ++i) {
    CHECK(std::abs(ra.final_state().fields[0][i] - rb.final_state().fields[0][i]) < 1e-6);
  }
  CHECK(rb.total_steps < ra.total_steps);
}

TEST_CASE("fast system tracks the limit for small epsilon") {
  Grid1D g(10, 32);
  ModelSpec lim = skt(Variant::SktPlusLimit, 20);
  ModelSpec fast = lim.fast(1e-3);
  auto eq = coexistence(lim.reaction);
  SimState s = homogeneous_state(lim, g, eq.u, eq.v);
  for (int i = 0; i < g.cells(); ++i) s.fields[1][i] += 0.05 * std::cos(std::numbers::pi * g.x(i) / 10);
  SimState sf = homogeneous_state(fast, g, eq.u, eq.v);
  sf.fields[2] = s.fields[1];
  for (int i = 0; i < g.cells(); ++i) {
    const auto p = quasi_steady_partition(lim, s.fields[0][i], s.fields[1][i]);
    sf.fields[0][i] = p.u_a;
    sf.fields[1][i] = p.u_b;
  }
  Controls c;
  c.dt_max = 1e-3;
  c.scheme = TimeScheme::Rkc2;
  auto rl = simulate(lim, g, s, 1, c);
  auto rf = simulate(fast, g, sf, 1, c);
  const auto uf = rf.final_state().total_u();
  for (int i = 0; i < g.cells(); ++i) CHECK(std::abs(uf[i] - rl.final_state().fields[0][i]) < 1e-2);
}

TEST_CASE("validation and failures") {
  CHECK_THROWS_AS(Grid1D(10, 4), ConfigError);
  CHECK_THROWS_AS(Grid1D(-1, 16), ConfigError);
  Controls c;
  c.dt_max = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(time_scheme_from_string("rkc2") == TimeScheme::Rkc2);
  CHECK_THROWS_AS(time_scheme_from_string("euler"), ConfigError);

  Grid1D g(10, 16);
  ModelSpec m = skt(Variant::SktPlusLimit, 0);
  SimState bad = homogeneous_state(m, g, 0.5, 0.3);
  bad.fields[0].pop_back();
  CHECK_THROWS_AS(simulate(m, g, bad, 1, Controls{}), ConfigError);

  SimState neg = homogeneous_state(m, g, 0.5, 0.3);
  neg.fields[0][3] = -0.2;
  CHECK_THROWS_AS(simulate(m, g, neg, 1, Controls{}), NumericalError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crossdiff/error.hpp"
#include "crossdiff/kinetics.hpp"
#include "oracle.hpp"

using namespace crossdiff;

namespace {

ReactionParams witness() { return {3, 1, 4, 1, 1, 1, 1, 1, 0}; }

ReactionParams from(const oracle::Lv& o) {
  ReactionParams p;
  p.r_u = o.r_u;
  p.r_v = o.r_v;
  p.r11 = o.r11;
  p.r12 = o.r12;
  p.r21 = o.r21;
  p.r22 = o.r22;
  return p;
}

const Equilibrium& find(const std::vector<Equilibrium>& eqs, EquilibriumKind k) {
  for (const auto& e : eqs) {
    if (e.kind == k) return e;
  }
  throw std::runtime_error("missing equilibrium");
}

}  // namespace

TEST_CASE("rst values") {
  Rst a = rst({1, 1, 1, 0, 0, 1});
  CHECK(a.R == doctest::Approx(1));
  CHECK(a.S == doctest::Approx(1));
  CHECK(a.T == doctest::Approx(1));

  Rst b = rst(witness());
  CHECK(b.R == doctest::Approx(3));
  CHECK(b.S == doctest::Approx(1));
  CHECK(b.T == doctest::Approx(2));

  Rst c = rst({1, 1, 1, 2, 2, 1});
  CHECK(c.R == doctest::Approx(-3));
  CHECK(c.S == doctest::Approx(-1));
  CHECK(c.T == doctest::Approx(-1));
}

TEST_CASE("regime classification") {
  CHECK(classify_regime(witness()).tag == Regime::Weak);
  CHECK(classify_regime({1, 1, 1, 2, 2, 1}).tag == Regime::Strong);
  CHECK(classify_regime({1, 1, 1, 1, 1, 1}).tag == Regime::NoCoexistence);
}

TEST_CASE("equilibria") {
  auto eqs = equilibria(witness());
  REQUIRE(eqs.size() == 4);
  const auto& co = find(eqs, EquilibriumKind::Coexistence);
  CHECK(co.u == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(co.v == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(find(eqs, EquilibriumKind::SemiTrivialU).u == doctest::Approx(0.75));
  CHECK(find(eqs, EquilibriumKind::SemiTrivialV).v == doctest::Approx(1.0));

  ReactionParams p{1, 2, 1, 0, 0, 1};
  CHECK(find(equilibria(p), EquilibriumKind::SemiTrivialU).u == doctest::Approx(1.0));

  auto degenerate = equilibria({1, 1, 1, 1, 1, 1});
  CHECK(degenerate.size() == 3);
  CHECK_THROWS_AS(coexistence({1, 1, 1, 1, 1, 1}), ConfigError);

  for (const auto& e : eqs) {
    auto r = reaction(e.u, e.v, witness());
    CHECK(std::abs(r.f) < 1e-15);
    CHECK(std::abs(r.g) < 1e-15);
  }
}

TEST_CASE("reaction and jacobian") {
  auto r = reaction(1, 0, witness());
  CHECK(r.f == doctest::Approx(-1));
  CHECK(r.g == 0);

  Mat2 j = jacobian(2.0 / 3.0, 1.0 / 3.0, witness());
  CHECK(j.a11 == doctest::Approx(-8.0 / 3.0));
  CHECK(j.a12 == doctest::Approx(-2.0 / 3.0));
  CHECK(j.a21 == doctest::Approx(-1.0 / 3.0));
  CHECK(j.a22 == doctest::Approx(-1.0 / 3.0));
  CHECK(j.trace() == doctest::Approx(-3));
  CHECK(j.det() == doctest::Approx(2.0 / 3.0));

  Mat2 z = jacobian(0, 0, witness());
  CHECK(z.a11 == 3);
  CHECK(z.a22 == 1);
  CHECK(z.a12 == 0);
  CHECK(z.a21 == 0);
}

TEST_CASE("jacobian matches finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> s(0.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const auto o = oracle::random_weak(rng);
    const double u = s(rng), v = s(rng);
    const auto fd = oracle::fd_jacobian(o, u, v);
    const Mat2 j = jacobian(u, v, from(o));
    CHECK(j.a11 == doctest::Approx(fd[0]).epsilon(1e-6));
    CHECK(j.a12 == doctest::Approx(fd[1]).epsilon(1e-6));
    CHECK(j.a21 == doctest::Approx(fd[2]).epsilon(1e-6));
    CHECK(j.a22 == doctest::Approx(fd[3]).epsilon(1e-6));
  }
}

TEST_CASE("stability of equilibria") {
  auto eqs = equilibria(witness());
  CHECK(find(eqs, EquilibriumKind::Trivial).stability == Stability::Unstable);
  CHECK(find(eqs, EquilibriumKind::SemiTrivialU).stability == Stability::Unstable);
  CHECK(find(eqs, EquilibriumKind::SemiTrivialV).stability == Stability::Unstable);
  CHECK(find(eqs, EquilibriumKind::Coexistence).stability == Stability::Stable);

  auto strong = equilibria({1, 1, 1, 2, 2, 1});
  CHECK(find(strong, EquilibriumKind::SemiTrivialU).stability == Stability::Stable);
  CHECK(find(strong, EquilibriumKind::SemiTrivialV).stability == Stability::Stable);
  CHECK(find(strong, EquilibriumKind::Coexistence).stability == Stability::Unstable);
}

TEST_CASE("stability agrees with eigenvalue oracle") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const auto o = (i % 2) ? oracle::random_weak(rng) : oracle::random_strong(rng);
    const auto p = from(o);
    for (const auto& e : equilibria(p)) {
      const double re = oracle::max_real_eig(oracle::fd_jacobian(o, e.u, e.v));
      if (std::abs(re) < 1e-4) continue;
      CHECK(classify_equilibrium(p, e) == (re < 0 ? Stability::Stable : Stability::Unstable));
    }
  }
}

TEST_CASE("marginal and validation") {
  Mat2 center{0, 1, -1, 0};
  CHECK(classify_stability(center) == Stability::Marginal);
  ReactionParams bad = witness();
  bad.r11 = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

#include <cmath>
#include <random>

#include "doctest.h"
#include "sit/equilibria.hpp"
#include "sit/errors.hpp"
#include "sit/model.hpp"

using namespace sit;

namespace {

StatePoint random_state(std::mt19937& rng, double K) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {K * u(rng), 100.0 * u(rng), 150.0 * u(rng), 500.0 * u(rng)};
}

}  // namespace

TEST_CASE("gamma function values") {
  CHECK(gamma_fn(Monostable{}, 5.0) == 1.0);
  CHECK(gamma_fn(Bistable{0.5}, 0.0) == 0.0);
  CHECK(gamma_fn(Bistable{0.5}, 2.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
  CHECK(gamma_fn(Bistable{0.5}, 2.0) == doctest::Approx(0.63212).epsilon(1e-5));
  CHECK_THROWS_AS(gamma_fn(Bistable{0.5}, -1.0), DomainError);
}

TEST_CASE("gamma function is bounded by min(1, gamma m) and monotone") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int k = 0; k < 1000; ++k) {
    const double m = u(rng), g = u(rng) / 10.0;
    const double v = gamma_fn(Bistable{g}, m);
    CHECK(v >= 0.0);
    CHECK(v <= std::min(1.0, g * m) + 1e-15);
    CHECK(gamma_fn(Bistable{g}, m + 0.1) >= v);
    CHECK(gamma_fn(Bistable{g * 1.1}, m) >= v);
  }
}

TEST_CASE("parameter validation names the field") {
  auto p = ModelParams::reference();
  CHECK_NOTHROW(p.validate());
  p.rho = 1.5;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("rho"), DomainError);
  p = ModelParams::reference();
  p.K.amplitude = 250.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = ModelParams::reference();
  p.gamma_kind = Bistable{-1.0};
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("reaction vanishes at extinction and at the upper equilibrium") {
  const auto p = ModelParams::reference(0.5);
  const auto r0 = reaction(p, {0, 0, 0, 0}, 0.0, 0.0);
  CHECK(r0.fE == 0.0);
  CHECK(r0.fM == 0.0);
  CHECK(r0.fF == 0.0);
  CHECK(r0.fs == 0.0);

  const auto up = solve_equilibria(p).upper->state;
  const auto r = reaction(p, up, 0.0, 0.0);
  CHECK(std::abs(r.fE) < 1e-9 * up.E);
  CHECK(std::abs(r.fM) < 1e-9 * up.M);
  CHECK(std::abs(r.fF) < 1e-9 * up.F);
}

TEST_CASE("egg growth is nonpositive at carrying capacity") {
  const auto p = ModelParams::reference(0.5);
  const auto r = reaction(p, {p.K.base, 0.0, 42.0, 0.0}, 0.0, 0.0);
  CHECK(r.fE == doctest::Approx(-(p.mu_E + p.nu_E) * p.K.base));
}

TEST_CASE("flux conditions on the faces of the invariant region") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> lam(0.0, 1000.0);
  for (auto kind : {GammaKind{Monostable{}}, GammaKind{Bistable{0.5}}}) {
    auto p = ModelParams::reference();
    p.gamma_kind = kind;
    for (int k = 0; k < 1000; ++k) {
      auto s = random_state(rng, p.K.base);
      const double l = lam(rng);
      auto face = s;
      face.E = p.K.base;
      CHECK(reaction(p, face, l, 0.0).fE <= 0.0);
      face = s;
      face.E = 0.0;
      CHECK(reaction(p, face, l, 0.0).fE >= 0.0);
      face = s;
      face.M = 0.0;
      CHECK(reaction(p, face, l, 0.0).fM >= 0.0);
      face = s;
      face.F = 0.0;
      CHECK(reaction(p, face, l, 0.0).fF >= 0.0);
      face = s;
      face.Ms = 0.0;
      CHECK(reaction(p, face, l, 0.0).fs >= 0.0);
    }
  }
}

TEST_CASE("female production is nonincreasing in sterile males") {
  std::mt19937 rng(3);
  for (auto kind : {GammaKind{Monostable{}}, GammaKind{Bistable{0.5}}}) {
    auto p = ModelParams::reference();
    p.gamma_kind = kind;
    for (int k = 0; k < 1000; ++k) {
      const auto s = random_state(rng, p.K.base);
      const double h = 1e-6 * std::max(1.0, s.Ms);
      auto hi = s;
      hi.Ms += h;
      CHECK(reaction(p, hi, 0.0, 0.0).fF <= reaction(p, s, 0.0, 0.0).fF + 1e-12);
    }
  }
}

TEST_CASE("mating factor is zero at M = Ms = 0") {
  const auto p = ModelParams::reference(0.5);
  CHECK(mating_factor(p, 0.0, 0.0) == 0.0);
  CHECK(mating_factor(p, 0.0, 3.0) == 0.0);
}

TEST_CASE("cone order") {
  CHECK(cone_leq({1, 1, 1, 5}, {2, 2, 2, 3}));
  CHECK(cone_leq({1, 1, 1, 1}, {1, 1, 1, 1}));
  CHECK_FALSE(cone_leq({1, 1, 1, 1}, {2, 2, 2, 2}));

  std::mt19937 rng(4);
  std::uniform_int_distribution<int> d(0, 2);
  auto draw = [&] {
    return StatePoint{double(d(rng)), double(d(rng)), double(d(rng)), double(d(rng))};
  };
  for (int k = 0; k < 2000; ++k) {
    const auto a = draw(), b = draw(), c = draw();
    CHECK(cone_leq(a, a));
    if (cone_leq(a, b) && cone_leq(b, a)) {
      CHECK(a.E == b.E);
      CHECK(a.M == b.M);
      CHECK(a.F == b.F);
      CHECK(a.Ms == b.Ms);
    }
    if (cone_leq(a, b) && cone_leq(b, c)) CHECK(cone_leq(a, c));
  }
}

TEST_CASE("analytic Jacobian matches central differences") {
  std::mt19937 rng(5);
  for (auto kind : {GammaKind{Monostable{}}, GammaKind{Bistable{0.5}}}) {
    auto p = ModelParams::reference();
    p.gamma_kind = kind;
    for (int k = 0; k < 50; ++k) {
      auto s = random_state(rng, p.K.base);
      s.M += 1.0;
      const auto J = jacobian_ode(p, s);
      for (int j = 0; j < 3; ++j) {
        double* comp[3] = {&s.E, &s.M, &s.F};
        const double h = 1e-6 * std::max(1.0, *comp[j]);
        auto plus = s, minus = s;
        double* cp[3] = {&plus.E, &plus.M, &plus.F};
        double* cm[3] = {&minus.E, &minus.M, &minus.F};
        *cp[j] += h;
        *cm[j] -= h;
        const auto rp = reaction(p, plus, 0.0, 0.0);
        const auto rm = reaction(p, minus, 0.0, 0.0);
        const double col[3] = {(rp.fE - rm.fE) / (2 * h), (rp.fM - rm.fM) / (2 * h),
                               (rp.fF - rm.fF) / (2 * h)};
        for (int i = 0; i < 3; ++i)
          CHECK(J(i, j) == doctest::Approx(col[i]).epsilon(1e-6).scale(1e-6));
      }
      CHECK(J(0, 2) >= 0.0);
      CHECK(J(1, 0) >= 0.0);
      CHECK(J(2, 0) >= 0.0);
      CHECK(J(2, 1) >= 0.0);
    }
  }
}

TEST_CASE("extinction stability depends on the kinetics") {
  auto mono = ModelParams::reference();
  mono.gamma_kind = Monostable{};
  CHECK(classify_equilibrium(mono, {}).stability == Stability::Unstable);
  CHECK(classify_equilibrium(ModelParams::reference(0.5), {}).stability == Stability::Stable);
}

TEST_CASE("heterogeneous capacity stays within its band") {
  auto p = ModelParams::reference(0.5);
  p.K.amplitude = 50.0;
  for (double x = -30.0; x <= 30.0; x += 0.37) {
    CHECK(p.K.at(x) >= 150.0 - 1e-12);
    CHECK(p.K.at(x) <= 250.0 + 1e-12);
  }
}

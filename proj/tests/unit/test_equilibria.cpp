#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "sit/equilibria.hpp"

using namespace sit;

namespace {

// Independent oracle: positive roots of rho nu_E E(F) Gamma(M(F)) = mu_F F
// with E, M slaved to F, by a sign scan and plain bisection.
std::vector<double> female_roots(const ModelParams& p) {
  auto h = [&](double F) {
    const double E = p.b * F / (p.b * F / p.K.base + p.mu_E + p.nu_E);
    const double M = (1.0 - p.rho) * p.nu_E * E / p.mu_M;
    return p.rho * p.nu_E * E * gamma_fn(p.gamma_kind, M) - p.mu_F * F;
  };
  std::vector<double> roots;
  const double top = p.rho * p.nu_E * p.K.base / p.mu_F * 1.01;
  const int n = 200000;
  double a = 1e-9, fa = h(a);
  for (int i = 1; i <= n; ++i) {
    const double b = top * i / n, fb = h(b);
    if ((fa < 0) != (fb < 0)) {
      double lo = a, hi = b;
      for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        ((h(mid) < 0) == (h(lo) < 0) ? lo : hi) = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

double zeta_c_oracle(double N) {
  auto g = [N](double z) {
    const double s = std::sqrt(4 * z * N + 1);
    return (1 + s) / (2 * N) - (1 - z * std::log((2 * z * N + 1 + s) / (2 * z * N)));
  };
  double lo = 1e-6, hi = 1e3;
  for (int k = 0; k < 300; ++k) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("offspring number and zeta from their closed forms") {
  const auto p = ModelParams::reference(0.5);
  CHECK(offspring_number(p) == doctest::Approx(10 * 0.5 * 0.08 / (0.1 * 0.13)).epsilon(1e-14));
  CHECK(offspring_number(p) == doctest::Approx(30.77).epsilon(1e-3));
  CHECK(zeta_of(p, 0.5) == doctest::Approx(0.035).epsilon(1e-14));
}

TEST_CASE("critical zeta and gamma") {
  const auto p = ModelParams::reference(0.5);
  const auto t = thresholds(p);
  REQUIRE(t.zeta_c);
  REQUIRE(t.gamma_c);
  const double zc = zeta_c_oracle(offspring_number(p));
  CHECK(*t.zeta_c == doctest::Approx(zc).epsilon(1e-10));
  CHECK(*t.zeta_c == doctest::Approx(7.44163).epsilon(1e-5));
  CHECK(std::abs(zeta_c_residual(*t.zeta_c, t.n_offspring)) < 1e-10);
  CHECK(*t.gamma_c == doctest::Approx(p.mu_M / ((1 - p.rho) * p.nu_E * zc * p.K.base)).epsilon(1e-10));
  CHECK(*t.gamma_c == doctest::Approx(2.351e-3).epsilon(0.02));
}

TEST_CASE("gamma_0 brackets the zero of the potential") {
  const auto p = ModelParams::reference(0.5);
  const auto t = thresholds(p);
  REQUIRE(t.gamma_0);
  CHECK(*t.gamma_0 == doctest::Approx(4.3e-2).epsilon(0.05));
  CHECK(*t.gamma_0 > *t.gamma_c);
  const double Fs = solve_equilibria(p).upper->state.F;
  CHECK(potential_G(p, Bistable{*t.gamma_0 * 1.01}, Fs, Fs) > 0.0);
  CHECK(potential_G(p, Bistable{*t.gamma_0 * 0.99}, Fs, Fs) < 0.0);

  REQUIRE(t.gamma_0_self_consistent);
  CHECK(*t.gamma_0_self_consistent == doctest::Approx(0.033678).epsilon(1e-4));
  CHECK(*t.gamma_0_self_consistent > *t.gamma_c);
}

TEST_CASE("regime classification") {
  CHECK(thresholds(ModelParams::reference(0.5)).regime == Regime::BistableAboveGamma0);
  CHECK(thresholds(ModelParams::reference(0.01)).regime == Regime::BistableBetweenGammaCAndGamma0);
  CHECK(thresholds(ModelParams::reference(1e-4)).regime == Regime::BistableBelowGammaC);
  auto mono = ModelParams::reference();
  mono.gamma_kind = Monostable{};
  CHECK(thresholds(mono).regime == Regime::Monostable);
  auto dying = mono;
  dying.b *= 0.5 / offspring_number(dying);
  REQUIRE(offspring_number(dying) < 1.0);
  CHECK(thresholds(dying).natural_extinction);
}

TEST_CASE("upper equilibrium densities") {
  const auto up = solve_equilibria(ModelParams::reference(0.5)).upper;
  REQUIRE(up);
  CHECK(up->state.F == doctest::Approx(77.4).epsilon(0.005));
  const auto up2 = solve_equilibria(ModelParams::reference(0.01)).upper;
  REQUIRE(up2);
  CHECK(up2->state.F == doctest::Approx(30.12).epsilon(0.005));
  CHECK_FALSE(solve_equilibria(ModelParams::reference(1e-4)).upper);
  CHECK_FALSE(solve_equilibria(ModelParams::reference(1e-4)).middle);
}

TEST_CASE("equilibria agree with the scan oracle and satisfy the stationary relations") {
  for (double g : {0.005, 0.01, 0.05, 0.5, 2.0}) {
    const auto p = ModelParams::reference(g);
    const auto eq = solve_equilibria(p);
    const auto roots = female_roots(p);
    REQUIRE(roots.size() == 2);
    REQUIRE(eq.middle);
    REQUIRE(eq.upper);
    CHECK(eq.middle->state.F == doctest::Approx(roots[0]).epsilon(1e-8));
    CHECK(eq.upper->state.F == doctest::Approx(roots[1]).epsilon(1e-8));
    for (const auto* e : {&*eq.middle, &*eq.upper}) {
      const auto& s = e->state;
      const double Er = p.b * s.F / (p.b * s.F / p.K.base + p.mu_E + p.nu_E);
      CHECK(std::abs(s.M - (1 - p.rho) * p.nu_E * s.E / p.mu_M) < 1e-8 * s.M);
      CHECK(std::abs(s.E - Er) < 1e-8 * s.E);
      const double lhs = gamma_fn(p.gamma_kind, phi0(p, s.F));
      const double rhs = p.mu_F * s.F / (p.rho * p.nu_E * p.K.base) + 1.0 / offspring_number(p);
      CHECK(std::abs(lhs - rhs) < 1e-8 * rhs);
    }
    CHECK(eq.middle->state.E < eq.upper->state.E);
    CHECK(eq.middle->state.M < eq.upper->state.M);
    CHECK(eq.middle->state.F < eq.upper->state.F);
  }
}

TEST_CASE("monostable equilibrium closed form") {
  auto p = ModelParams::reference();
  p.gamma_kind = Monostable{};
  const auto eq = solve_equilibria(p);
  REQUIRE(eq.upper);
  CHECK_FALSE(eq.middle);
  const double N = offspring_number(p);
  const double F = p.K.base * (p.mu_E + p.nu_E) * (N - 1) / p.b;
  CHECK(eq.upper->state.F == doctest::Approx(F).epsilon(1e-10));
  CHECK(eq.upper->state.E == doctest::Approx(p.mu_F * F / (p.rho * p.nu_E)).epsilon(1e-10));
  CHECK(eq.upper->state.M == doctest::Approx((1 - p.rho) * p.mu_F * F / (p.rho * p.mu_M)).epsilon(1e-10));
  CHECK(eq.upper->stability == Stability::Stable);
  CHECK(eq.extinction.stability == Stability::Unstable);
}

TEST_CASE("stability pattern of the bistable equilibria") {
  for (double g : {0.005, 0.01, 0.5}) {
    const auto eq = solve_equilibria(ModelParams::reference(g));
    CHECK(eq.extinction.stability == Stability::Stable);
    CHECK(eq.middle->stability == Stability::Unstable);
    CHECK(eq.upper->stability == Stability::Stable);
  }
}

TEST_CASE("sign pattern between the two positive equilibria") {
  const auto p = ModelParams::reference(0.5);
  const auto eq = solve_equilibria(p);
  const double F1 = eq.middle->state.F, Fs = eq.upper->state.F;
  const double N = offspring_number(p);
  auto h = [&](double F) {
    return gamma_fn(p.gamma_kind, phi0(p, F)) - (p.mu_F * F / (p.rho * p.nu_E * p.K.base) + 1.0 / N);
  };
  for (int i = 1; i < 200; ++i) {
    CHECK(h(F1 * i / 200.0) < 0.0);
    CHECK(h(F1 + (Fs - F1) * i / 200.0) > 0.0);
  }
}

TEST_CASE("equilibria move apart as gamma grows") {
  double prev_up = 0.0, prev_mid = 1e300;
  for (double g = 0.003; g < 3.0; g *= 1.5) {
    const auto eq = solve_equilibria(ModelParams::reference(g));
    REQUIRE(eq.upper);
    CHECK(eq.upper->state.F >= prev_up);
    CHECK(eq.middle->state.F <= prev_mid);
    prev_up = eq.upper->state.F;
    prev_mid = eq.middle->state.F;
  }
}

TEST_CASE("phi0, phi and the sterile tail factor") {
  const auto p = ModelParams::reference(0.5);
  const auto up = solve_equilibria(p).upper->state;
  CHECK(phi0(p, 0.0) == 0.0);
  CHECK(phi0(p, 1e12) == doctest::Approx((1 - p.rho) * p.nu_E * p.K.base / p.mu_M).epsilon(1e-9));
  CHECK(phi0(p, up.F) == doctest::Approx(up.M).epsilon(1e-10));

  CHECK(phi(p, 0.0, up.F) == 0.0);
  CHECK(phi(p, up.F * (1 - 1e-15), up.F) == doctest::Approx(up.M / 2).epsilon(1e-6));
  CHECK(phi(p, up.F, up.F) == doctest::Approx(up.M / 2).epsilon(1e-10));
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double F = up.F * u(rng);
    CHECK(phi(p, F, up.F) >= 0.0);
    CHECK(phi(p, F, up.F) <= phi0(p, F));
  }

  CHECK(phi_s_eps(p, 3.0, 0.0, up.F) == 3.0);
  CHECK(phi_s_eps(p, 3.0, up.F * (1 - 1e-12), up.F) < 1e-4);
  auto q = p;
  q.mu_s = q.mu_F;
  CHECK(phi_s_eps(q, 3.0, up.F / 2, up.F) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(phi_s_eps(p, 3.0, 10.0, up.F) > phi_s_eps(p, 3.0, 20.0, up.F));
}

TEST_CASE("potential G") {
  const auto p = ModelParams::reference(0.5);
  const double Fs = solve_equilibria(p).upper->state.F;
  CHECK(potential_G(p, p.gamma_kind, Fs, 0.0) == 0.0);
  CHECK(potential_G(p, p.gamma_kind, Fs, Fs) > 0.0);
  const double g1 = potential_G(p, p.gamma_kind, Fs, Fs, std::nullopt, 4096);
  const double g2 = potential_G(p, p.gamma_kind, Fs, Fs, std::nullopt, 8192);
  CHECK(std::abs(g1 - g2) < 1e-8 * std::abs(g2));

  auto mono = ModelParams::reference();
  mono.gamma_kind = Monostable{};
  const double Fm = solve_equilibria(mono).upper->state.F;
  const double direct = 0.0 + [&] {
    double acc = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double u = Fm * (i + 0.5) / n;
      acc += (mono.rho * mono.nu_E * mono.b * u / (mono.b * u / mono.K.base + mono.mu_E + mono.nu_E) -
              mono.mu_F * u) *
             Fm / n;
    }
    return acc;
  }();
  CHECK(direct > 0.0);
  CHECK(potential_G(mono, mono.gamma_kind, Fm, Fm) == doctest::Approx(direct).epsilon(1e-6));

  // Sterile tail lowers the potential.
  CHECK(potential_G(p, p.gamma_kind, Fs, Fs, 1.0) < potential_G(p, p.gamma_kind, Fs, Fs));
}

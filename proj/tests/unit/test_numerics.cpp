#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "sit/errors.hpp"
#include "sit/numerics.hpp"

using namespace sit;

TEST_CASE("bisection finds a bracketed root") {
  const double r = bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14);
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK_THROWS_AS(bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0), SolverError);
}

TEST_CASE("simpson integrates cubics exactly") {
  const double v = simpson([](double x) { return x * x * x - 2.0 * x + 1.0; }, 0.0, 3.0, 2);
  CHECK(v == doctest::Approx(81.0 / 4.0 - 9.0 + 3.0).epsilon(1e-14));
}

TEST_CASE("tridiagonal solvers agree with a dense product") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t n = 50;
  std::vector<double> sub(n), diag(n), sup(n), x(n), rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    sub[i] = u(rng);
    sup[i] = u(rng);
    diag[i] = 4.0 + u(rng);
    x[i] = u(rng);
  }
  for (std::size_t i = 0; i < n; ++i) {
    rhs[i] = diag[i] * x[i];
    if (i > 0) rhs[i] += sub[i] * x[i - 1];
    if (i + 1 < n) rhs[i] += sup[i] * x[i + 1];
  }
  auto a = rhs;
  solve_tridiagonal(sub, diag, sup, a);
  TridiagonalLU lu(sub, diag, sup);
  auto b = rhs;
  lu.solve(b);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(a[i] == doctest::Approx(x[i]).epsilon(1e-12));
    CHECK(b[i] == doctest::Approx(x[i]).epsilon(1e-12));
  }
}

TEST_CASE("line fit recovers an exact line") {
  std::vector<double> x{0, 1, 2, 3, 4}, y;
  for (double v : x) y.push_back(2.5 * v - 1.0);
  const auto f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(f.rms < 1e-13);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 5) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

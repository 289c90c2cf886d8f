#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sit {

// Bisection on [lo, hi]. f(lo) and f(hi) must have opposite signs (or one
// of them be zero). Iterates until the bracket width is below abs_tol or
// no floating-point midpoint remains (abs_tol = 0 runs to full precision).
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double abs_tol = 1e-12, int max_iter = 400);

// Composite Simpson rule with an even number of panels.
double simpson(const std::function<double(double)>& f, double a, double b,
               int panels);

// Solves a tridiagonal system in place. sub[0] and sup[n-1] are ignored.
// rhs is overwritten with the solution.
void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                       std::span<const double> sup, std::span<double> rhs);

// Pre-factored tridiagonal matrix for repeated solves with the same matrix.
class TridiagonalLU {
 public:
  TridiagonalLU() = default;
  TridiagonalLU(std::vector<double> sub, std::vector<double> diag,
                std::vector<double> sup);

  void solve(std::span<double> rhs) const;
  std::size_t size() const { return diag_.size(); }

 private:
  std::vector<double> sub_;
  std::vector<double> diag_;  // modified pivots
  std::vector<double> sup_;
};

// Least-squares line fit y = a + b x; returns {slope, intercept, rms}.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Runs fn(0..n-1) on up to `workers` threads (0: hardware concurrency).
// The first exception thrown by any task is rethrown after all finish.
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace sit

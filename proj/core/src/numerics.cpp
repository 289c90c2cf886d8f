#include "sit/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "sit/errors.hpp"

namespace sit {

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double abs_tol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi) || std::isnan(flo) || std::isnan(fhi)) {
    throw SolverError("bisect: no sign change on bracket");
  }
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo <= abs_tol) break;
  }
  return 0.5 * (lo + hi);
}

double simpson(const std::function<double(double)>& f, double a, double b,
               int panels) {
  if (panels < 2 || panels % 2 != 0) {
    throw DomainError("simpson: panel count must be a positive even number");
  }
  if (a == b) return 0.0;
  const double h = (b - a) / panels;
  double odd = 0.0;
  double even = 0.0;
  for (int i = 1; i < panels; ++i) {
    const double v = f(a + i * h);
    if (i % 2) odd += v; else even += v;
  }
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                       std::span<const double> sup, std::span<double> rhs) {
  const std::size_t n = diag.size();
  if (sub.size() != n || sup.size() != n || rhs.size() != n || n == 0) {
    throw DomainError("solve_tridiagonal: size mismatch");
  }
  std::vector<double> c(n);
  double denom = diag[0];
  if (denom == 0.0) throw SolverError("solve_tridiagonal: zero pivot");
  c[0] = sup[0] / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - sub[i] * c[i - 1];
    if (denom == 0.0) throw SolverError("solve_tridiagonal: zero pivot");
    c[i] = (i + 1 < n) ? sup[i] / denom : 0.0;
    rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

TridiagonalLU::TridiagonalLU(std::vector<double> sub, std::vector<double> diag,
                             std::vector<double> sup)
    : sub_(std::move(sub)), diag_(std::move(diag)), sup_(std::move(sup)) {
  const std::size_t n = diag_.size();
  if (sub_.size() != n || sup_.size() != n || n == 0) {
    throw DomainError("TridiagonalLU: size mismatch");
  }
  // Store c_i = sup_i / pivot_i in sup_, pivots in diag_.
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) diag_[i] -= sub_[i] * sup_[i - 1];
    if (diag_[i] == 0.0) throw SolverError("TridiagonalLU: zero pivot");
    sup_[i] = (i + 1 < n) ? sup_[i] / diag_[i] : 0.0;
  }
}

void TridiagonalLU::solve(std::span<double> rhs) const {
  const std::size_t n = diag_.size();
  if (rhs.size() != n) throw DomainError("TridiagonalLU: rhs size mismatch");
  rhs[0] /= diag_[0];
  for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - sub_[i] * rhs[i - 1]) / diag_[i];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= sup_[i] * rhs[i + 1];
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw DomainError("fit_line: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace sit

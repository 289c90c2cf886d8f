#include "sit/profiles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include "sit/equilibria.hpp"
#include "sit/errors.hpp"
#include "sit/numerics.hpp"

namespace sit {

double MonotoneProfile::operator()(double x) const {
  if (grid.empty()) return limit_at_infinity;
  if (x <= grid.front()) return values.front();
  if (x >= grid.back()) return x == grid.back() ? values.back() : limit_at_infinity;
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
  const double w = (x - grid[i]) / (grid[i + 1] - grid[i]);
  return values[i] + w * (values[i + 1] - values[i]);
}

bool MonotoneProfile::nondecreasing(double tol) const {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[i - 1] - tol) return false;
  }
  return values.empty() || values.back() <= limit_at_infinity + tol;
}

double MonotoneProfile::spacing() const {
  return grid.size() > 1 ? grid[1] - grid[0] : 0.0;
}

void MonotoneProfile::write_csv(std::ostream& os, const std::string& value_name) const {
  os << "x," << value_name << "\n";
  os.precision(17);
  for (std::size_t i = 0; i < grid.size(); ++i) os << grid[i] << "," << values[i] << "\n";
}

namespace {

// int_0^h tau e^{-s tau} dtau, with a series for small s h.
double kernel_moment1(double s, double h) {
  const double x = s * h;
  if (x < 1e-2) {
    // h^2 (1/2 - x/3 + x^2/8 - x^3/30 + x^4/144)
    return h * h * (0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0 + x * x * x * x / 144.0);
  }
  return (-std::expm1(-x) - x * std::exp(-x)) / (s * s);
}

}  // namespace

std::vector<double> monotone_solve_samples(double mu, const std::vector<double>& psi,
                                         double h, double psi_tail) {
  if (!(mu > 0.0) || !(h > 0.0)) throw DomainError("lemma1_solve: mu and h must be positive");
  const std::size_t n = psi.size();
  if (n < 2) throw DomainError("lemma1_solve: need at least two samples");
  double scale = std::abs(psi_tail);
  for (double v : psi) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 1; i < n; ++i) {
    if (psi[i] < psi[i - 1] - 1e-12 * scale) {
      throw DomainError("lemma1_solve: psi is not nondecreasing");
    }
  }
  if (psi_tail < psi.back() - 1e-12 * scale) {
    throw DomainError("lemma1_solve: psi tail below last sample");
  }
  const double s = std::sqrt(mu);
  const double q = std::exp(-s * h);
  const double e0 = -std::expm1(-s * h) / s;
  const double e1 = kernel_moment1(s, h);

  std::vector<double> left(n, 0.0), right(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double slope = (psi[i + 1] - psi[i]) / h;
    left[i + 1] = q * left[i] + psi[i + 1] * e0 - slope * e1;
  }
  right[n - 1] = psi_tail / s;
  for (std::size_t i = n - 1; i-- > 0;) {
    const double slope = (psi[i + 1] - psi[i]) / h;
    right[i] = q * right[i + 1] + psi[i] * e0 + slope * e1;
  }
  const double p0 = right[0];
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) * h;
    u[i] = (left[i] + right[i] - std::exp(-s * x) * p0) / (2.0 * s);
  }
  u[0] = 0.0;
  return u;
}

MonotoneProfile lemma1_solve(double mu, const std::function<double(double)>& psi,
                             double h, double x_max) {
  if (!(mu > 0.0)) throw DomainError("lemma1_solve: mu must be positive");
  if (!(h > 0.0) || !(x_max > 0.0)) throw DomainError("lemma1_solve: bad grid");
  const std::size_t n = static_cast<std::size_t>(std::ceil(x_max / h - 1e-9)) + 1;
  const double tail_len = 37.0 / std::sqrt(mu);  // e^{-37} < 1e-16
  const std::size_t n_ext = n + static_cast<std::size_t>(std::ceil(tail_len / h));
  std::vector<double> samples(n_ext);
  for (std::size_t i = 0; i < n_ext; ++i) samples[i] = psi(static_cast<double>(i) * h);
  const double tail = samples.back();
  const auto u = monotone_solve_samples(mu, samples, h, tail);
  MonotoneProfile prof;
  prof.grid.resize(n);
  prof.values.assign(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(n));
  for (std::size_t i = 0; i < n; ++i) prof.grid[i] = static_cast<double>(i) * h;
  prof.limit_at_infinity = tail / mu;
  return prof;
}

double monotone_lower_bound(double mu, double psi_x, double x) {
  return psi_x * (-std::expm1(-2.0 * std::sqrt(mu) * x)) / (2.0 * mu);
}

PotentialTable::PotentialTable(const ModelParams& p, double F_star,
                               std::optional<double> eps, int cells)
    : p_(p), F_star_(F_star), eps_(eps) {
  if (!(F_star > 0.0) || cells < 2) throw DomainError("PotentialTable: bad arguments");
  dF_ = F_star / cells;
  G_.resize(static_cast<std::size_t>(cells) + 1);
  G_[0] = 0.0;
  for (int j = 0; j < cells; ++j) {
    G_[j + 1] = G_[j] + gauss(j * dF_, (j + 1 == cells) ? F_star : (j + 1) * dF_);
  }
}

double PotentialTable::integrand(double u) const {
  return potential_integrand(p_, p_.gamma_kind, F_star_, std::clamp(u, 0.0, F_star_), eps_);
}

double PotentialTable::gauss(double a, double b) const {
  static constexpr std::array<double, 5> xi = {0.0, -0.5384693101056831, 0.5384693101056831,
                                               -0.9061798459386640, 0.9061798459386640};
  static constexpr std::array<double, 5> wi = {0.5688888888888889, 0.4786286704993665,
                                               0.4786286704993665, 0.2369268850561891,
                                               0.2369268850561891};
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  double s = 0.0;
  for (int k = 0; k < 5; ++k) s += wi[k] * integrand(c + r * xi[k]);
  return s * r;
}

double PotentialTable::operator()(double F) const {
  const double f = std::clamp(F, 0.0, F_star_);
  const std::size_t cells = G_.size() - 1;
  std::size_t j = static_cast<std::size_t>(f / dF_);
  if (j >= cells) j = cells - 1;
  return G_[j] + gauss(j * dF_, f);
}

double PotentialTable::difference(double a, double b) const {
  if (std::abs(b - a) <= 4.0 * dF_) return gauss(a, b);
  return (*this)(b) - (*this)(a);
}

StationaryFResult build_stationary_F(const ModelParams& p, std::optional<double> eps,
                                     const StationaryOptions& opt) {
  StationaryFResult res;
  res.eps = eps;
  const auto eq = solve_equilibria(p);
  if (!eq.upper) {
    res.diagnostic = "no positive equilibrium";
    return res;
  }
  const double fs = eq.upper->state.F;
  res.F_star = fs;
  const PotentialTable G(p, fs, eps, opt.table_cells);
  const auto& nodes = G.nodes();
  std::size_t jmax = 0;
  for (std::size_t j = 1; j < nodes.size(); ++j) {
    if (nodes[j] > nodes[jmax]) jmax = j;
  }
  if (nodes[jmax] <= 0.0) {
    res.diagnostic = "potential G is nonpositive on (0, F*]";
    return res;
  }
  const double dF = G.node_spacing();
  double fm = (jmax + 1 == nodes.size()) ? fs : jmax * dF;
  if (jmax + 1 < nodes.size()) {
    const double a = (jmax - 1) * dF;
    const double b = (jmax + 1) * dF;
    const double ia = G.integrand(a);
    const double ib = G.integrand(b);
    if (ia > 0.0 && ib < 0.0) {
      fm = bisect([&](double u) { return G.integrand(u); }, a, b, 0.0);
    }
  }
  res.F_m = fm;
  res.G_max = G(fm);
  if (res.G_max <= 0.0) {
    res.diagnostic = "potential G is nonpositive on (0, F*]";
    return res;
  }

  const auto gap = [&](double F) {
    if (F >= fm) return 0.0;
    if (fm - F < 8.0 * dF) return std::max(0.0, G.difference(F, fm));
    return std::max(0.0, res.G_max - G(F));
  };
  const auto rhs = [&](double F) { return std::sqrt(2.0 * gap(F)); };

  const double h = opt.h;
  const double stop = fm * (1.0 - 1e-10);
  MonotoneProfile prof;
  prof.grid.push_back(0.0);
  prof.values.push_back(0.0);
  double F = 0.0;
  const std::size_t max_steps = 20'000'000;
  bool converged = false;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const double k1 = rhs(F);
    const double k2 = rhs(F + 0.5 * h * k1);
    const double k3 = rhs(F + 0.5 * h * k2);
    const double k4 = rhs(F + h * k3);
    double next = F + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (next >= stop) {
      next = std::min(next, fm);
      converged = true;
    }
    if (next <= F) {
      // Stalled at round-off level below the stopping threshold.
      converged = true;
      next = F;
    }
    F = next;
    prof.grid.push_back(static_cast<double>(prof.grid.size()) * h);
    prof.values.push_back(F);
    if (converged) break;
  }
  if (!converged) res.diagnostic = "stationary profile did not reach F_m";
  while (prof.grid.back() < opt.extend_to) {
    prof.grid.push_back(static_cast<double>(prof.grid.size()) * h);
    prof.values.push_back(fm);
  }
  prof.limit_at_infinity = fm;
  res.profile = std::move(prof);
  return res;
}

MonotoneProfile build_stationary_M(const ModelParams& p, const MonotoneProfile& F) {
  const double k = p.K.base;
  const auto source = [&](double f) {
    return (1.0 - p.rho) * p.nu_E * p.b * f / (p.b * f / k + p.mu_E + p.nu_E);
  };
  const double h = F.spacing();
  std::vector<double> psi(F.values.size());
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = source(F.values[i]);
  const double tail = source(F.limit_at_infinity);
  MonotoneProfile M;
  M.grid = F.grid;
  M.values = monotone_solve_samples(p.mu_M, psi, h, tail);
  M.limit_at_infinity = tail / p.mu_M;
  return M;
}

std::optional<double> find_eps_gamma(const ModelParams& p, double safety) {
  const auto eq = solve_equilibria(p);
  if (!eq.upper) return std::nullopt;
  const double fs = eq.upper->state.F;
  const auto g = [&](double e) { return potential_G(p, p.gamma_kind, fs, fs, e); };
  if (potential_G(p, p.gamma_kind, fs, fs) <= 0.0) return std::nullopt;
  double hi = 1e-6;
  int guard = 0;
  while (g(hi) > 0.0) {
    hi *= 2.0;
    if (++guard > 200) return std::nullopt;
  }
  double lo = hi;
  while (g(lo) <= 0.0) {
    lo *= 0.5;
    if (++guard > 400) return std::nullopt;
  }
  const double eps0 = bisect(g, lo, hi, 1e-6 * lo);
  return safety * eps0;
}

double sterile_tail(const ModelParams& p, double eps, double x) {
  return eps * std::exp(-std::sqrt(p.mu_s) * x);
}

double g_F_eps(const ModelParams& p, double eps, double x, double M, double F) {
  const double k = p.K.base;
  const double egg = p.rho * p.nu_E * p.b * F / (p.b * F / k + p.mu_E + p.nu_E);
  const double ms = sterile_tail(p, eps, x);
  const double w = (M + ms > 0.0) ? M / (M + ms) : 0.0;
  return egg * w * gamma_fn(p.gamma_kind, std::max(M, 0.0)) - p.mu_F * F;
}

}  // namespace sit

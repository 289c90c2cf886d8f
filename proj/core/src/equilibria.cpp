#include "sit/equilibria.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "sit/errors.hpp"
#include "sit/numerics.hpp"

namespace sit {

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
  }
  return "?";
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Monostable: return "Monostable";
    case Regime::BistableBelowGammaC: return "BistableBelowGammaC";
    case Regime::BistableBetweenGammaCAndGamma0: return "BistableBetweenGammaCAndGamma0";
    case Regime::BistableAboveGamma0: return "BistableAboveGamma0";
  }
  return "?";
}

double offspring_number(const ModelParams& p) {
  return p.b * p.rho * p.nu_E / (p.mu_F * (p.nu_E + p.mu_E));
}

double zeta_of(const ModelParams& p, double gamma) {
  return p.mu_M / ((1.0 - p.rho) * p.nu_E * gamma * p.K.base);
}

double zeta_c_residual(double zeta, double n) {
  const double s = std::sqrt(4.0 * zeta * n + 1.0);
  const double lhs = (1.0 + s) / (2.0 * n);
  const double rhs = 1.0 - zeta * std::log1p((1.0 + s) / (2.0 * zeta * n));
  return lhs - rhs;
}

std::optional<double> solve_zeta_c(const ModelParams& p) {
  const double n = offspring_number(p);
  if (n <= 1.0) return std::nullopt;
  double hi = 1.0;
  int guard = 0;
  while (zeta_c_residual(hi, n) <= 0.0) {
    hi *= 2.0;
    if (++guard > 200) return std::nullopt;
  }
  double lo = hi;
  while (zeta_c_residual(lo, n) >= 0.0) {
    lo *= 0.5;
    if (++guard > 400) return std::nullopt;
  }
  return bisect([n](double z) { return zeta_c_residual(z, n); }, lo, hi, 0.0);
}

double phi0(const ModelParams& p, double F) {
  const double k = p.K.base;
  return (1.0 - p.rho) * p.nu_E * p.b * F /
         (p.mu_M * p.b * F / k + p.mu_M * (p.mu_E + p.nu_E));
}

double phi(const ModelParams& p, double F, double F_star) {
  const double k = p.K.base;
  const double prefactor = (1.0 - p.rho) * p.nu_E * p.b * F /
                           (2.0 * p.mu_M * (p.b * F / k + p.mu_E + p.nu_E));
  if (F <= 0.0) return 0.0;
  const double gap = 1.0 - F / F_star;
  if (gap < 1e-14) {
    // Limit M*/2 evaluated at F_star.
    return (1.0 - p.rho) * p.nu_E * p.b * F_star /
           (2.0 * p.mu_M * (p.b * F_star / k + p.mu_E + p.nu_E));
  }
  const double expo = 2.0 * std::sqrt(p.mu_M / p.mu_F) * std::log1p(-F / F_star);
  return prefactor * (-std::expm1(expo));
}

double phi_s_eps(const ModelParams& p, double eps, double F, double F_star) {
  const double gap = 1.0 - F / F_star;
  if (gap <= 0.0) return 0.0;
  return eps * std::exp(std::sqrt(p.mu_s / p.mu_F) * std::log1p(-F / F_star));
}

StatePoint slaved_state(const ModelParams& p, double F, double k) {
  StatePoint s;
  s.F = F;
  s.E = p.b * F / (p.b * F / k + p.mu_E + p.nu_E);
  s.M = (1.0 - p.rho) * p.nu_E * s.E / p.mu_M;
  s.Ms = 0.0;
  return s;
}

Equilibrium classify_equilibrium(const ModelParams& p, const StatePoint& s) {
  Equilibrium eq;
  eq.state = s;
  const Eigen::Matrix3d J = jacobian_ode(p, s);
  Eigen::EigenSolver<Eigen::Matrix3d> solver(J, false);
  const auto ev = solver.eigenvalues();
  double scale = J.cwiseAbs().maxCoeff();
  double max_re = -INFINITY;
  for (int i = 0; i < 3; ++i) {
    eq.eigenvalues[i] = ev[i];
    max_re = std::max(max_re, ev[i].real());
  }
  const double tol = 1e-12 * scale;
  if (max_re < -tol) eq.stability = Stability::Stable;
  else if (max_re > tol) eq.stability = Stability::Unstable;
  else eq.stability = Stability::Marginal;
  return eq;
}

namespace {

double f_of_m(const ModelParams& p, double m) {
  return p.K.base * (p.mu_E + p.nu_E) * m / (p.b * (1.0 - m));
}

}  // namespace

EquilibriumSet solve_equilibria(const ModelParams& p) {
  p.validate();
  EquilibriumSet set;
  set.extinction = classify_equilibrium(p, StatePoint{});
  const double n = offspring_number(p);
  const double k = p.K.base;

  if (!p.bistable()) {
    if (n <= 1.0) return set;
    const double F = k * (p.mu_E + p.nu_E) * (n - 1.0) / p.b;
    StatePoint s;
    s.F = F;
    s.E = p.mu_F * F / (p.rho * p.nu_E);
    s.M = (1.0 - p.rho) * p.mu_F * F / (p.rho * p.mu_M);
    set.upper = classify_equilibrium(p, s);
    return set;
  }

  const double zeta = zeta_of(p, *p.gamma());
  const auto h = [zeta](double m) { return (1.0 - m) - zeta * std::expm1(m / zeta); };
  const double m0 = bisect(h, 0.0, 1.0, 0.0);
  const auto phi_m = [n, zeta](double m) { return n * (-std::expm1(-m / zeta)) * (1.0 - m) - 1.0; };
  const double top = phi_m(m0);
  if (std::abs(top) <= 1e-10) {
    set.degenerate = true;
    set.upper = classify_equilibrium(p, slaved_state(p, f_of_m(p, m0), k));
    return set;
  }
  if (top < 0.0) return set;
  const double m_lo = bisect(phi_m, 0.0, m0, 0.0);
  const double m_hi = bisect(phi_m, m0, 1.0, 0.0);
  set.middle = classify_equilibrium(p, slaved_state(p, f_of_m(p, m_lo), k));
  set.upper = classify_equilibrium(p, slaved_state(p, f_of_m(p, m_hi), k));
  return set;
}

double potential_integrand(const ModelParams& p, const GammaKind& kind, double F_star,
                           double u, std::optional<double> eps) {
  const double k = p.K.base;
  const double egg = p.rho * p.nu_E * p.b * u / (p.b * u / k + p.mu_E + p.nu_E);
  const double ph = phi(p, u, F_star);
  double w = 1.0;
  if (eps) {
    const double ps = phi_s_eps(p, *eps, u, F_star);
    w = (ph + ps > 0.0) ? ph / (ph + ps) : 0.0;
  }
  return egg * w * gamma_fn(kind, ph) - p.mu_F * u;
}

double potential_G(const ModelParams& p, const GammaKind& kind, double F_star,
                   double F, std::optional<double> eps, int panels) {
  if (F < 0.0 || F > F_star * (1.0 + 1e-14)) {
    throw DomainError("potential_G: F outside [0, F_star]");
  }
  return simpson([&](double u) { return potential_integrand(p, kind, F_star, u, eps); },
                 0.0, std::min(F, F_star), panels);
}

namespace {

std::optional<double> upper_f(const ModelParams& p) {
  const auto set = solve_equilibria(p);
  if (!set.upper || set.degenerate) return std::nullopt;
  return set.upper->state.F;
}

std::optional<double> gamma0_search(const std::function<std::optional<double>(double)>& value,
                                    double lo, double start_hi) {
  const auto vlo = value(lo);
  if (!vlo || *vlo >= 0.0) return std::nullopt;
  double hi = start_hi;
  std::optional<double> vhi = value(hi);
  int guard = 0;
  while (!vhi || *vhi <= 0.0) {
    hi *= 2.0;
    if (++guard > 60) return std::nullopt;
    vhi = value(hi);
  }
  const auto f = [&](double g) {
    const auto v = value(g);
    return v ? *v : -1.0;
  };
  return bisect(f, lo, hi, 0.0, 200);
}

}  // namespace

std::optional<double> solve_gamma_0(const ModelParams& p, Gamma0Mode mode) {
  const auto zc = solve_zeta_c(p);
  if (!zc) return std::nullopt;
  const double gamma_c = p.mu_M / ((1.0 - p.rho) * p.nu_E * *zc * p.K.base);

  if (mode == Gamma0Mode::ReferenceFStar) {
    const auto f_ref = upper_f(p);
    if (f_ref) {
      const double fs = *f_ref;
      const auto value = [&](double g) -> std::optional<double> {
        return potential_G(p, Bistable{g}, fs, fs);
      };
      return gamma0_search(value, gamma_c * 1e-6, 10.0 * gamma_c);
    }
    // No upper equilibrium at the given gamma: fall back to the self-consistent definition.
  }

  const auto value = [&](double g) -> std::optional<double> {
    const ModelParams q = p.with_gamma(g);
    const auto fs = upper_f(q);
    if (!fs) return std::nullopt;
    return potential_G(q, q.gamma_kind, *fs, *fs);
  };
  return gamma0_search(value, gamma_c * (1.0 + 1e-6), 10.0 * gamma_c);
}

ThresholdReport thresholds(const ModelParams& p) {
  p.validate();
  ThresholdReport r;
  r.n_offspring = offspring_number(p);
  r.natural_extinction = r.n_offspring <= 1.0;
  r.zeta_c = solve_zeta_c(p);
  if (r.zeta_c) {
    r.gamma_c = p.mu_M / ((1.0 - p.rho) * p.nu_E * *r.zeta_c * p.K.base);
  }
  if (!p.bistable()) {
    r.regime = Regime::Monostable;
    return r;
  }
  const double g = *p.gamma();
  r.zeta = zeta_of(p, g);
  if (r.n_offspring > 1.0) {
    r.gamma_0 = solve_gamma_0(p, Gamma0Mode::ReferenceFStar);
    r.gamma_0_self_consistent = solve_gamma_0(p, Gamma0Mode::SelfConsistent);
  }
  if (!r.gamma_c || g <= *r.gamma_c) {
    r.regime = Regime::BistableBelowGammaC;
    r.natural_extinction = true;
  } else if (r.gamma_0 && g > *r.gamma_0) {
    r.regime = Regime::BistableAboveGamma0;
  } else {
    r.regime = Regime::BistableBetweenGammaCAndGamma0;
  }
  return r;
}

}  // namespace sit

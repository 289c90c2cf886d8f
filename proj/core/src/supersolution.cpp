#include "sit/supersolution.hpp"

#include <cmath>
#include <limits>

#include "sit/equilibria.hpp"
#include "sit/errors.hpp"
#include "sit/numerics.hpp"

namespace sit {

double PsiProfile::operator()(double r) const {
  const double s = std::sqrt(k * k + 4.0 * eps);
  return u0 / s * (lambda_plus * std::exp(lambda_minus * r) - lambda_minus * std::exp(lambda_plus * r));
}

double PsiProfile::derivative(double r) const {
  const double s = std::sqrt(k * k + 4.0 * eps);
  return u0 / s * lambda_plus * lambda_minus * (std::exp(lambda_minus * r) - std::exp(lambda_plus * r));
}

PsiProfile psi_profile(double eps, double u0, double c, double r1) {
  if (!(eps > 0.0) || !(u0 > 0.0 && u0 < 1.0) || !(c > 0.0) || !(r1 > 0.0)) {
    throw DomainError("psi_profile: need eps > 0, u0 in (0,1), c > 0, r1 > 0");
  }
  PsiProfile p;
  p.u0 = u0;
  p.eps = eps;
  p.k = c + 1.0 / r1;
  const double s = std::sqrt(p.k * p.k + 4.0 * eps);
  p.lambda_plus = 2.0 * eps / (p.k + s);
  p.lambda_minus = -0.5 * (p.k + s);
  double hi = 1.0;
  while (p(hi) < 1.0) hi *= 2.0;
  p.L = bisect([&p](double r) { return p(r) - 1.0; }, 0.0, hi, 0.0);
  return p;
}

double SupersolutionBundle::alpha(double t) const {
  const double s = (c - c_prime) * t;
  return u0 / (lambda_plus * std::exp(lambda_minus * s) - lambda_minus * std::exp(lambda_plus * s));
}

double SupersolutionBundle::alpha_prime(double t) const {
  const double s = (c - c_prime) * t;
  const double den = lambda_plus * std::exp(lambda_minus * s) - lambda_minus * std::exp(lambda_plus * s);
  return -u0 * (c - c_prime) * lambda_plus * lambda_minus *
         (std::exp(lambda_minus * s) - std::exp(lambda_plus * s)) / (den * den);
}

double SupersolutionBundle::beta(double r) const {
  return lambda_plus * std::exp(lambda_minus * r) - lambda_minus * std::exp(lambda_plus * r);
}

double SupersolutionBundle::beta_prime(double r) const {
  return lambda_plus * lambda_minus * (std::exp(lambda_minus * r) - std::exp(lambda_plus * r));
}

double SupersolutionBundle::psi(double r) const {
  const double s = lambda_tilde_plus - lambda_tilde_minus;
  return u0 / s *
         (lambda_tilde_plus * std::exp(lambda_tilde_minus * r) - lambda_tilde_minus * std::exp(lambda_tilde_plus * r));
}

double SupersolutionBundle::psi_prime(double r) const {
  const double s = lambda_tilde_plus - lambda_tilde_minus;
  return u0 / s * lambda_tilde_plus * lambda_tilde_minus *
         (std::exp(lambda_tilde_minus * r) - std::exp(lambda_tilde_plus * r));
}

double SupersolutionBundle::phi1(double r, double t) const {
  return alpha(t) * beta(r - (r1 + c_prime * t));
}

double SupersolutionBundle::phi2(double r, double t) const {
  return psi(r - (r1 + c * t));
}

int SupersolutionBundle::region(double r, double t) const {
  if (r < r1 + c_prime * t) return 0;
  if (r < r1 + c * t) return 1;
  if (r < r2 + c * t) return 2;
  return 3;
}

double SupersolutionBundle::Fbar(double r, double t) const {
  switch (region(r, t)) {
    case 0: return F_star * alpha(t) * beta(0.0);
    case 1: return F_star * phi1(r, t);
    case 2: return F_star * phi2(r, t);
    default: return F_star;
  }
}

double SupersolutionBundle::g(double r, double t) const {
  switch (region(r, t)) {
    case 0: return mu / 4.0;
    case 1: return mu;
    case 2: return eps;
    default: return 0.0;
  }
}

std::vector<double> SupersolutionBundle::interfaces(double t) const {
  return {r1 + c_prime * t, r1 + c * t, r2 + c * t};
}

std::vector<std::pair<double, double>> SupersolutionBundle::interface_derivatives(double t) const {
  const double a = alpha(t);
  return {
      {0.0, F_star * a * beta_prime(0.0)},
      {F_star * a * beta_prime((c - c_prime) * t), F_star * psi_prime(0.0)},
      {F_star * psi_prime(L), 0.0},
  };
}

std::pair<double, double> alpha_beta(const SupersolutionBundle& b, double t, double r) {
  return {b.alpha(t), b.beta(r)};
}

double assemble_Fbar(const SupersolutionBundle& b, double x_physical, double t) {
  return b.Fbar(std::abs(x_physical) / b.sqrtD, t);
}

std::vector<double> ebar_ode(const SupersolutionBundle& b,
                             const std::function<double(double, double)>& Fbar,
                             double r, double t_end, double dt, double E0) {
  const ModelParams& p = b.params;
  const double k = p.K.base;
  const double loss = p.mu_E + p.nu_E;
  const auto rhs = [&](double t, double E) {
    return p.b * Fbar(r, t) * (1.0 - E / k) - loss * E;
  };
  const std::size_t steps = static_cast<std::size_t>(std::llround(t_end / dt));
  std::vector<double> out;
  out.reserve(steps + 1);
  double E = E0;
  out.push_back(E);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = n * dt;
    const double k1 = rhs(t, E);
    const double k2 = rhs(t + 0.5 * dt, E + 0.5 * dt * k1);
    const double k3 = rhs(t + 0.5 * dt, E + 0.5 * dt * k2);
    const double k4 = rhs(t + dt, E + dt * k3);
    E += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back(E);
  }
  return out;
}

namespace {

// max over terms b / denom with positive denominators; records the others.
double c1_from_conditions(const ModelParams& p, double mu, double eps, double c,
                          double c_prime, std::vector<std::string>& notes) {
  const double a0 = p.mu_E + p.nu_E;
  double best = 0.0;
  const auto term = [&](double denom, const char* what) {
    if (denom > 0.0) best = std::max(best, p.b / denom);
    else notes.emplace_back(what);
  };
  term(a0 - mu / 4.0, "C1 bound (disc): mu/4 >= mu_E + nu_E");
  term(a0 - mu / 4.0 - c_prime * std::sqrt(mu / 2.0),
       "C1 bound (inner ring): mu/4 + c' sqrt(mu/2) >= mu_E + nu_E");
  term(a0 - c * std::sqrt(eps), "C1 bound (release ring): c sqrt(eps) >= mu_E + nu_E");
  return best;
}

}  // namespace

SupersolutionBundle make_bundle(const ModelParams& p, const BundleRequest& req) {
  p.validate();
  if (!(req.c > 0.0) || !(req.r1 > 0.0)) throw DomainError("bundle: c and r1 must be positive");
  if (!(req.c_prime_ratio > 2.0 / 3.0 && req.c_prime_ratio < 1.0)) {
    throw DomainError("bundle: c'/c must lie in (2/3, 1)");
  }
  const ModelParams hom = p.with_capacity(p.K.base);
  const auto eq = solve_equilibria(hom);
  if (!eq.upper) throw DomainError("bundle: no positive equilibrium");

  SupersolutionBundle B;
  B.params = hom;
  B.sqrtD = std::sqrt(p.D);
  B.E_star = eq.upper->state.E;
  B.M_star = eq.upper->state.M;
  B.F_star = eq.upper->state.F;
  B.C0 = req.C0;
  B.c = req.c / B.sqrtD;
  B.c_prime = req.c_prime_ratio * B.c;
  B.r1 = req.r1 / B.sqrtD;
  const double a0 = p.mu_E + p.nu_E;

  B.eps = req.eps.value_or(0.95 * std::min({p.mu_F, p.mu_M, std::pow(a0 / (2.0 * B.c), 2)}));
  if (req.mu) {
    B.mu = *req.mu;
  } else {
    B.mu = 0.5 * std::min(p.mu_F, p.mu_M);
    while (B.mu / 4.0 + B.c_prime * std::sqrt(B.mu / 2.0) > a0 / 2.0) B.mu *= 0.5;
  }
  if (!(B.mu > 0.0) || !(B.eps > 0.0)) throw DomainError("bundle: mu and eps must be positive");

  const double k1 = B.c_prime + 1.0 / B.r1;
  const double s1 = std::sqrt(k1 * k1 + 2.0 * B.mu);
  B.lambda_plus = B.mu / (k1 + s1);
  B.lambda_minus = -0.5 * (k1 + s1);

  const double c1_min = c1_from_conditions(p, B.mu, B.eps, B.c, B.c_prime, B.infeasible);
  B.C1 = req.C1.value_or(req.safety * std::max({c1_min, B.E_star / B.F_star, B.C0}));

  const double g_max = std::max(B.mu, B.eps);
  if (p.mu_M - g_max <= 0.0) {
    B.infeasible.emplace_back("C2 bound: max(mu, eps) >= mu_M");
  }
  B.C2 = req.C2.value_or(p.mu_M - g_max > 0.0
                             ? std::max(B.C0, req.safety * (1.0 - p.rho) * p.nu_E * B.C1 / (p.mu_M - g_max))
                             : 1e6 * B.C1);

  const double rnc1 = p.rho * p.nu_E * B.C1;
  if (req.u0) {
    B.u0 = *req.u0;
  } else if (p.bistable()) {
    const double arg = 1.0 - (p.mu_F - B.mu) / rnc1;
    if (B.mu >= p.mu_F || !(arg > 0.0)) {
      B.infeasible.emplace_back("u0 bound: mu >= mu_F leaves no admissible u0");
      B.u0 = 1e-3;
    } else {
      B.u0 = std::min(0.5, -0.5 * std::log(arg) / (*p.gamma() * B.C2 * B.F_star));
    }
  } else {
    B.u0 = 0.1;
  }
  if (!(B.u0 > 0.0 && B.u0 < 1.0)) throw DomainError("bundle: u0 must lie in (0,1)");

  const PsiProfile psi = psi_profile(B.eps, B.u0, B.c, B.r1);
  B.lambda_tilde_plus = psi.lambda_plus;
  B.lambda_tilde_minus = psi.lambda_minus;
  B.L = psi.L;
  B.r2 = B.r1 + B.L;

  if (p.mu_F - B.eps <= 0.0) {
    B.infeasible.emplace_back("sterile bound: eps >= mu_F");
    B.Ms_required = std::numeric_limits<double>::infinity();
  } else {
    B.Ms_required = std::max(
        0.0, req.safety * B.C2 * B.F_star * (rnc1 / (p.mu_F - B.eps) - 1.0) / p.gamma_s);
  }
  if (!p.bistable()) {
    B.Ms_required_inner =
        (p.mu_F - B.mu > 0.0)
            ? std::max(0.0, req.safety * B.C2 * B.F_star * B.u0 * (rnc1 / (p.mu_F - B.mu) - 1.0) / p.gamma_s)
            : std::numeric_limits<double>::infinity();
  }
  return B;
}

}  // namespace sit

#include "sit/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sit/errors.hpp"

namespace sit {

double CarryingCapacity::at(double r) const {
  if (amplitude == 0.0) return base;
  return base + amplitude * std::sin(2.0 * std::numbers::pi * std::abs(r) / wavelength);
}

namespace {
void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string("model.") + name + " must be positive and finite");
  }
}
}  // namespace

void ModelParams::validate() const {
  require_positive(b, "b");
  require_positive(nu_E, "nu_E");
  require_positive(mu_E, "mu_E");
  require_positive(mu_M, "mu_M");
  require_positive(mu_F, "mu_F");
  require_positive(mu_s, "mu_s");
  require_positive(D, "D");
  require_positive(gamma_s, "gamma_s");
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("model.rho must lie in (0,1)");
  require_positive(K.base, "K");
  if (!(K.min() > 0.0)) throw DomainError("model.K_amplitude must keep K positive");
  if (K.heterogeneous()) require_positive(K.wavelength, "K_wavelength");
  if (const auto* bi = std::get_if<Bistable>(&gamma_kind)) require_positive(bi->gamma, "gamma");
}

std::optional<double> ModelParams::gamma() const {
  if (const auto* bi = std::get_if<Bistable>(&gamma_kind)) return bi->gamma;
  return std::nullopt;
}

ModelParams ModelParams::with_capacity(double k) const {
  ModelParams q = *this;
  q.K = CarryingCapacity{k, 0.0, K.wavelength};
  return q;
}

ModelParams ModelParams::with_gamma(double g) const {
  ModelParams q = *this;
  q.gamma_kind = Bistable{g};
  return q;
}

ModelParams ModelParams::reference(double gamma) {
  ModelParams p;
  if (gamma > 0.0) p.gamma_kind = Bistable{gamma};
  else p.gamma_kind = Monostable{};
  return p;
}

double gamma_fn(const GammaKind& kind, double m) {
  if (m < 0.0 || std::isnan(m)) throw DomainError("gamma_fn: negative density");
  if (const auto* bi = std::get_if<Bistable>(&kind)) return -std::expm1(-bi->gamma * m);
  return 1.0;
}

double gamma_prime(const GammaKind& kind, double m) {
  if (const auto* bi = std::get_if<Bistable>(&kind)) return bi->gamma * std::exp(-bi->gamma * m);
  (void)m;
  return 0.0;
}

double mating_factor(const ModelParams& p, double M, double Ms) {
  const double total = M + p.gamma_s * Ms;
  if (total <= 0.0) return 0.0;
  return M / total * gamma_fn(p.gamma_kind, total);
}

ReactionRates reaction_with_capacity(const ModelParams& p, const StatePoint& s,
                                     double lambda, double k) {
  ReactionRates r;
  r.fE = p.b * s.F * (1.0 - s.E / k) - (p.mu_E + p.nu_E) * s.E;
  r.fM = (1.0 - p.rho) * p.nu_E * s.E - p.mu_M * s.M;
  r.fF = p.rho * p.nu_E * s.E * mating_factor(p, s.M, s.Ms) - p.mu_F * s.F;
  r.fs = lambda - p.mu_s * s.Ms;
  return r;
}

ReactionRates reaction(const ModelParams& p, const StatePoint& s, double lambda,
                       double x) {
  return reaction_with_capacity(p, s, lambda, p.K.at(x));
}

bool cone_leq(const StatePoint& u, const StatePoint& v) {
  return u.E <= v.E && u.M <= v.M && u.F <= v.F && u.Ms >= v.Ms;
}

bool in_invariant_region(const StatePoint& s, double k, double slack) {
  return s.E >= -slack && s.E <= k + slack && s.M >= -slack && s.F >= -slack &&
         s.Ms >= -slack;
}

Eigen::Matrix3d jacobian_ode(const ModelParams& p, const StatePoint& s, double x) {
  const double k = p.K.at(x);
  const double total = s.M + p.gamma_s * s.Ms;
  double mf = 0.0;
  double dmf_dM = 0.0;
  if (total > 0.0) {
    const double g = gamma_fn(p.gamma_kind, total);
    mf = s.M / total * g;
    dmf_dM = p.gamma_s * s.Ms / (total * total) * g + s.M / total * gamma_prime(p.gamma_kind, total);
  } else {
    // Limit along Ms = 0, M -> 0+: mf = Gamma(M).
    mf = gamma_fn(p.gamma_kind, 0.0);
    dmf_dM = gamma_prime(p.gamma_kind, 0.0);
  }
  Eigen::Matrix3d J;
  J(0, 0) = -p.b * s.F / k - (p.mu_E + p.nu_E);
  J(0, 1) = 0.0;
  J(0, 2) = p.b * (1.0 - s.E / k);
  J(1, 0) = (1.0 - p.rho) * p.nu_E;
  J(1, 1) = -p.mu_M;
  J(1, 2) = 0.0;
  J(2, 0) = p.rho * p.nu_E * mf;
  J(2, 1) = p.rho * p.nu_E * s.E * dmf_dM;
  J(2, 2) = -p.mu_F;
  return J;
}

}  // namespace sit

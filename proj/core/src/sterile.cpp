#include "sit/sterile.hpp"

#include <algorithm>
#include <cmath>

#include "sit/errors.hpp"
#include "sit/supersolution.hpp"

namespace sit {

double shoulder_rate_inner(double d, double mu_s) {
  return (1.0 + std::sqrt(1.0 + 4.0 * d * d * mu_s)) / (4.0 * d * d);
}

double shoulder_rate_outer(double d, double k, double mu_s) {
  const double kd = k * d;
  return (kd + 1.0 + std::sqrt((1.0 + kd) * (1.0 + kd) + 4.0 * mu_s * d * d)) / (4.0 * d * d);
}

double SterileBoundProfile::m(double xi) const {
  switch (kind) {
    case SterileBoundKind::UpperBound:
      return xi <= Rs ? amplitude : amplitude * std::exp(-std::sqrt(mu_s) * (xi - Rs));
    case SterileBoundKind::LowerAnnulus:
      if (xi < r1) return amplitude * std::exp(-a * (xi - r1) * (xi - r1));
      if (xi <= r2) return amplitude;
      return amplitude * std::exp(-b * (xi - r2) * (xi - r2));
    case SterileBoundKind::LowerAnnulusWithTail: {
      const double top = amplitude * (1.0 + eps_tail);
      if (xi < R1) return amplitude * std::exp(eta * (xi - R1));
      if (xi < r1) return top * std::exp(-a_eps * (xi - r1) * (xi - r1));
      if (xi <= r2) return top;
      return top * std::exp(-b * (xi - r2) * (xi - r2));
    }
  }
  return 0.0;
}

double SterileBoundProfile::m_prime(double xi) const {
  switch (kind) {
    case SterileBoundKind::UpperBound:
      return xi <= Rs ? 0.0 : -std::sqrt(mu_s) * m(xi);
    case SterileBoundKind::LowerAnnulus:
      if (xi < r1) return -2.0 * a * (xi - r1) * m(xi);
      if (xi <= r2) return 0.0;
      return -2.0 * b * (xi - r2) * m(xi);
    case SterileBoundKind::LowerAnnulusWithTail:
      if (xi < R1) return eta * m(xi);
      if (xi < r1) return -2.0 * a_eps * (xi - r1) * m(xi);
      if (xi <= r2) return 0.0;
      return -2.0 * b * (xi - r2) * m(xi);
  }
  return 0.0;
}

double SterileBoundProfile::m_second(double xi) const {
  const auto gauss2 = [](double rate, double y) { return (4.0 * rate * rate * y * y - 2.0 * rate); };
  switch (kind) {
    case SterileBoundKind::UpperBound:
      return xi <= Rs ? 0.0 : mu_s * m(xi);
    case SterileBoundKind::LowerAnnulus:
      if (xi < r1) return gauss2(a, xi - r1) * m(xi);
      if (xi <= r2) return 0.0;
      return gauss2(b, xi - r2) * m(xi);
    case SterileBoundKind::LowerAnnulusWithTail:
      if (xi < R1) return eta * eta * m(xi);
      if (xi < r1) return gauss2(a_eps, xi - r1) * m(xi);
      if (xi <= r2) return 0.0;
      return gauss2(b, xi - r2) * m(xi);
  }
  return 0.0;
}

SterileBoundProfile sterile_upper_bound(const ModelParams& p, double Lambda_bar, double c,
                                        double Rs, double Ms0_sup) {
  if (Lambda_bar < 0.0 || Ms0_sup < 0.0) throw DomainError("sterile_upper_bound: negative amplitude");
  SterileBoundProfile s;
  s.kind = SterileBoundKind::UpperBound;
  s.mu_s = p.mu_s;
  s.c = c;
  s.Rs = Rs;
  s.Lambda_bar = Lambda_bar;
  s.amplitude = std::max(Ms0_sup, Lambda_bar / p.mu_s);
  return s;
}

double plateau_per_release(const ModelParams& p, double c, double R1, double r1,
                           double r2, double R2, std::optional<double> eta) {
  if (!(0.0 < R1 && R1 < r1 && r1 < r2 && r2 < R2)) {
    throw DomainError("sterile_lower_bound: need 0 < R1 < r1 < r2 < R2");
  }
  const double k = c + 1.0 / r2;
  const double b = shoulder_rate_outer(R2 - r2, k, p.mu_s);
  const double outer = 1.0 / (2.0 * b + p.mu_s + 0.25 * k * k);
  if (!eta) {
    const double a = shoulder_rate_inner(r1 - R1, p.mu_s);
    return std::min(outer, 1.0 / (2.0 * a + p.mu_s));
  }
  const double d = r1 - R1;
  const double eps = std::expm1(*eta * d / 2.0);
  const double a_eps = *eta / (2.0 * d);
  return std::min(outer, 1.0 / (2.0 * a_eps + p.mu_s)) / (1.0 + eps);
}

SterileBoundProfile make_sterile_lower_bound(const ModelParams& p, double Lambda_bar,
                                             double c, double R1, double r1, double r2,
                                             double R2, std::optional<double> eta) {
  if (!(Lambda_bar >= 0.0)) throw DomainError("sterile_lower_bound: negative release");
  if (eta && !(*eta > 0.0)) throw DomainError("sterile_lower_bound: eta must be positive");
  SterileBoundProfile s;
  s.kind = eta ? SterileBoundKind::LowerAnnulusWithTail : SterileBoundKind::LowerAnnulus;
  s.Lambda_bar = Lambda_bar;
  s.mu_s = p.mu_s;
  s.c = c;
  s.R1 = R1;
  s.r1 = r1;
  s.r2 = r2;
  s.R2 = R2;
  s.amplitude = Lambda_bar * plateau_per_release(p, c, R1, r1, r2, R2, eta);
  s.b = shoulder_rate_outer(R2 - r2, c + 1.0 / r2, p.mu_s);
  if (eta) {
    const double d = r1 - R1;
    s.eta = *eta;
    s.eps_tail = std::expm1(*eta * d / 2.0);
    s.a_eps = *eta / (2.0 * d);
  } else {
    s.a = shoulder_rate_inner(r1 - R1, p.mu_s);
  }
  return s;
}

double sterile_lower_bound(const SterileBoundProfile& profile, double r, double t) {
  if (profile.kind == SterileBoundKind::UpperBound) {
    throw DomainError("sterile_lower_bound: profile is an upper bound");
  }
  return profile(std::abs(r), t);
}

CarpetRelease carpet_release(const SupersolutionBundle& b, double inner_margin,
                             double outer_margin, double t_max) {
  const ModelParams& p = b.params;
  CarpetRelease out;
  out.r1 = b.r1;
  out.r2 = b.r2;
  out.R1 = b.r1 - inner_margin;
  out.R2 = b.r2 + outer_margin;
  if (!std::isfinite(b.Ms_required)) throw DomainError("carpet_release: bundle is infeasible");
  if (p.bistable()) {
    out.plateau_ratio = plateau_per_release(p, b.c, out.R1, out.r1, out.r2, out.R2);
    out.Lambda_bar = b.Ms_required / out.plateau_ratio;
    return out;
  }
  // The disc behind the annulus needs Ms >= k Fbar; the tail e^{eta xi}
  // must dominate Fbar / (F* u0), which decays like alpha(t).
  const double eta = 0.9 * b.lambda_plus * (b.c - b.c_prime) / b.c;
  out.eta = eta;
  double q = 0.0;
  const int nt = 400, nr = 400;
  for (int j = 0; j <= nt; ++j) {
    const double t = t_max * j / nt;
    const double edge = b.r1 + b.c * t;
    for (int i = 0; i <= nr; ++i) {
      const double r = edge * i / nr;
      q = std::max(q, b.Fbar(r, t) / (b.F_star * b.u0) * std::exp(-eta * (r - edge)));
    }
  }
  out.amplification = q;
  out.plateau_ratio = plateau_per_release(p, b.c, out.R1, out.r1, out.r2, out.R2, eta);
  out.Lambda_bar = std::max(b.Ms_required, q * b.Ms_required_inner) / out.plateau_ratio;
  return out;
}

}  // namespace sit

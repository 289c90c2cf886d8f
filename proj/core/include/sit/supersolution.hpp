#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sit/model.hpp"

// Radially symmetric super-solution of the wild-population equations behind
// a release annulus moving outward at speed c. Everything is expressed in
// diffusion-scaled lengths (r~ = r / sqrt(D), c~ = c / sqrt(D)); time is
// unscaled.

namespace sit {

struct PsiProfile {
  double u0 = 0.0;
  double eps = 0.0;
  double k = 0.0;  // c + 1/r1
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double L = 0.0;

  double operator()(double r) const;
  double derivative(double r) const;
};

// psi solving -(c + 1/r1) psi' - psi'' = -eps psi, psi(0) = u0, psi'(0) = 0,
// with L the root of psi(L) = 1.
PsiProfile psi_profile(double eps, double u0, double c, double r1);

struct SupersolutionBundle {
  ModelParams params;
  double sqrtD = 1.0;
  double u0 = 0.0;
  double mu = 0.0;
  double eps = 0.0;
  double c = 0.0;        // scaled
  double c_prime = 0.0;  // scaled
  double r1 = 0.0;       // scaled
  double r2 = 0.0;       // scaled
  double L = 0.0;        // scaled
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double lambda_tilde_plus = 0.0;
  double lambda_tilde_minus = 0.0;
  double C0 = 3.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double E_star = 0.0;
  double M_star = 0.0;
  double F_star = 0.0;
  // Sterile-male density the construction needs on the annulus, and inside
  // the disc (monostable only, scaled by F/(F* u0) there).
  double Ms_required = 0.0;
  double Ms_required_inner = 0.0;
  // Smallness conditions of the construction that the constants violate.
  std::vector<std::string> infeasible;

  double alpha(double t) const;
  double alpha_prime(double t) const;
  double beta(double r) const;
  double beta_prime(double r) const;
  double psi(double r) const;
  double psi_prime(double r) const;
  double phi1(double r, double t) const;
  double phi2(double r, double t) const;

  // Region index 0..3 of radius r at time t.
  int region(double r, double t) const;
  double Fbar(double r, double t) const;
  double g(double r, double t) const;
  // Left/right radial derivatives of Fbar at the interfaces r1 + c't,
  // r1 + ct, r2 + ct.
  std::vector<std::pair<double, double>> interface_derivatives(double t) const;
  std::vector<double> interfaces(double t) const;

  double to_physical(double scaled) const { return scaled * sqrtD; }
};

std::pair<double, double> alpha_beta(const SupersolutionBundle& b, double t, double r);

// Fbar at physical position |x| and time t.
double assemble_Fbar(const SupersolutionBundle& b, double x_physical, double t);

// Pointwise RK4 integration of dE/dt = b Fbar (1 - E/K) - (mu_E + nu_E) E at
// scaled radius r; returns E at t = 0, dt, ..., t_end.
std::vector<double> ebar_ode(const SupersolutionBundle& b,
                             const std::function<double(double, double)>& Fbar,
                             double r, double t_end, double dt, double E0);

struct BundleRequest {
  double c = 0.05;   // physical speed
  double r1 = 3.0;   // physical inner radius of the annulus
  double c_prime_ratio = 5.0 / 6.0;
  double C0 = 3.0;
  double safety = 1.05;
  std::optional<double> mu;
  std::optional<double> eps;
  std::optional<double> u0;
  std::optional<double> C1;
  std::optional<double> C2;
  double t_check = 200.0;  // verification horizon
};

// Constants from the sufficient conditions of the construction. Throws
// DomainError when no positive equilibrium exists.
SupersolutionBundle make_bundle(const ModelParams& p, const BundleRequest& req);

}  // namespace sit

#pragma once

#include <optional>

#include "sit/model.hpp"

// Bounds on the sterile-male density driven by a release annulus moving at
// speed c. Lengths and speeds are diffusion-scaled, as in supersolution.hpp.

namespace sit {

struct SupersolutionBundle;

enum class SterileBoundKind { UpperBound, LowerAnnulus, LowerAnnulusWithTail };

struct SterileBoundProfile {
  SterileBoundKind kind = SterileBoundKind::LowerAnnulus;
  double amplitude = 0.0;  // plateau value M^ (lower) or max(|Ms0|, Lambda/mu_s) (upper)
  double Lambda_bar = 0.0;
  double mu_s = 0.0;
  double c = 0.0;
  double r1 = 0.0, r2 = 0.0, R1 = 0.0, R2 = 0.0, Rs = 0.0;
  double a = 0.0, b = 0.0;
  double eta = 0.0, a_eps = 0.0, eps_tail = 0.0;

  // Profile in the moving frame xi = r - c t, with derivatives.
  double m(double xi) const;
  double m_prime(double xi) const;
  double m_second(double xi) const;
  double operator()(double r, double t) const { return m(r - c * t); }
};

// Lower edge of a Gaussian shoulder of width d: (1 + sqrt(1 + 4 d^2 mu_s)) / (4 d^2).
double shoulder_rate_inner(double d, double mu_s);
// Outer shoulder rate b satisfying the polynomial condition for width d and
// drift k = c + 1/r2.
double shoulder_rate_outer(double d, double k, double mu_s);

SterileBoundProfile sterile_upper_bound(const ModelParams& p, double Lambda_bar, double c,
                                        double Rs, double Ms0_sup);

// Plateau/Gaussian lower bound (eta absent) or the C^1 exponential-tail
// variant (eta present). Requires 0 < R1 < r1 < r2 < R2.
SterileBoundProfile make_sterile_lower_bound(const ModelParams& p, double Lambda_bar,
                                             double c, double R1, double r1, double r2,
                                             double R2, std::optional<double> eta = std::nullopt);

double sterile_lower_bound(const SterileBoundProfile& profile, double r, double t);

// Ratio M^ / Lambda_bar for the given geometry.
double plateau_per_release(const ModelParams& p, double c, double R1, double r1,
                           double r2, double R2, std::optional<double> eta = std::nullopt);

// Release amplitude making the lower bound cover the bundle's sterile-male
// requirement on the annulus (and inside the disc for monostable kinetics).
struct CarpetRelease {
  double Lambda_bar = 0.0;
  double plateau_ratio = 0.0;  // M^ / Lambda_bar
  double amplification = 1.0;  // inner factor, monostable only
  double R1 = 0.0, r1 = 0.0, r2 = 0.0, R2 = 0.0;  // scaled
  std::optional<double> eta;   // tail rate, monostable only
};

// inner_margin = r1 - R1 and outer_margin = R2 - r2 in scaled units.
CarpetRelease carpet_release(const SupersolutionBundle& b, double inner_margin,
                             double outer_margin, double t_max);

}  // namespace sit

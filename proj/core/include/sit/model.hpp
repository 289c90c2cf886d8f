#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <variant>

namespace sit {

struct Monostable {};
struct Bistable {
  double gamma = 0.5;  // 1/density
};
using GammaKind = std::variant<Monostable, Bistable>;

// K(r) = base + amplitude * sin(2 pi r / wavelength); amplitude 0 gives the
// homogeneous case.
struct CarryingCapacity {
  double base = 200.0;
  double amplitude = 0.0;
  double wavelength = 10.0;

  double at(double r) const;
  double min() const { return base - std::abs(amplitude); }
  double max() const { return base + std::abs(amplitude); }
  bool heterogeneous() const { return amplitude != 0.0; }
};

struct ModelParams {
  double b = 10.0;
  double nu_E = 0.08;
  double mu_E = 0.05;
  double mu_M = 0.14;
  double mu_F = 0.1;
  double mu_s = 0.12;
  double rho = 0.5;
  CarryingCapacity K;
  double D = 0.1;
  double gamma_s = 1.0;
  GammaKind gamma_kind = Bistable{0.5};

  // Throws DomainError naming the first offending field.
  void validate() const;

  std::optional<double> gamma() const;
  bool bistable() const { return std::holds_alternative<Bistable>(gamma_kind); }

  // Same parameters with a homogeneous capacity K.
  ModelParams with_capacity(double k) const;
  ModelParams with_gamma(double g) const;

  // Reference parameter set; gamma <= 0 selects the monostable kinetics.
  static ModelParams reference(double gamma = 0.5);
};

struct StatePoint {
  double E = 0.0;
  double M = 0.0;
  double F = 0.0;
  double Ms = 0.0;
};

struct ReactionRates {
  double fE = 0.0;
  double fM = 0.0;
  double fF = 0.0;
  double fs = 0.0;
};

double gamma_fn(const GammaKind& kind, double m);
double gamma_prime(const GammaKind& kind, double m);

// M/(M + gamma_s Ms) * Gamma(M + gamma_s Ms), defined as 0 at M = Ms = 0.
double mating_factor(const ModelParams& p, double M, double Ms);

ReactionRates reaction(const ModelParams& p, const StatePoint& s, double lambda,
                       double x);
ReactionRates reaction_with_capacity(const ModelParams& p, const StatePoint& s,
                                     double lambda, double k);

bool cone_leq(const StatePoint& u, const StatePoint& v);

// Invariant region [0,K] x R^3_+ with an absolute slack.
bool in_invariant_region(const StatePoint& s, double k, double slack = 0.0);

// d(fE,fM,fF)/d(E,M,F) with Ms frozen. At M + gamma_s Ms = 0 the one-sided
// limit along M > 0, Ms = 0 is used.
Eigen::Matrix3d jacobian_ode(const ModelParams& p, const StatePoint& s,
                             double x = 0.0);

}  // namespace sit

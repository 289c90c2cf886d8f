#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string_view>

#include "sit/model.hpp"

namespace sit {

enum class Stability { Stable, Unstable, Marginal };

enum class Regime {
  Monostable,
  BistableBelowGammaC,
  BistableBetweenGammaCAndGamma0,
  BistableAboveGamma0,
};

std::string_view to_string(Stability s);
std::string_view to_string(Regime r);

struct Equilibrium {
  StatePoint state;
  Stability stability = Stability::Marginal;
  std::array<std::complex<double>, 3> eigenvalues{};
};

struct EquilibriumSet {
  Equilibrium extinction;
  std::optional<Equilibrium> middle;
  std::optional<Equilibrium> upper;
  bool degenerate = false;  // tangency: middle and upper merged into `upper`
};

struct ThresholdReport {
  double n_offspring = 0.0;
  std::optional<double> zeta;  // bistable only
  std::optional<double> zeta_c;
  std::optional<double> gamma_c;
  std::optional<double> gamma_0;                   // reference-F* value
  std::optional<double> gamma_0_self_consistent;   // F* re-solved per gamma
  Regime regime = Regime::Monostable;
  bool natural_extinction = false;
};

// How the mean-zero potential condition picks F* while gamma varies.
//   ReferenceFStar: F* fixed at the equilibrium of the given parameters,
//                   only the Allee nonlinearity's gamma varies.
//   SelfConsistent: F*(gamma) re-solved at each trial gamma.
enum class Gamma0Mode { ReferenceFStar, SelfConsistent };

double offspring_number(const ModelParams& p);
double zeta_of(const ModelParams& p, double gamma);
std::optional<double> solve_zeta_c(const ModelParams& p);
// Residual g(zeta) whose root is zeta_c (increasing in zeta).
double zeta_c_residual(double zeta, double n_offspring);

ThresholdReport thresholds(const ModelParams& p);

double phi0(const ModelParams& p, double F);
double phi(const ModelParams& p, double F, double F_star);
double phi_s_eps(const ModelParams& p, double eps, double F, double F_star);

EquilibriumSet solve_equilibria(const ModelParams& p);

// Slaved (E, M) for a given F: E = bF/(bF/K + mu_E + nu_E), M = (1-rho) nu_E E / mu_M.
StatePoint slaved_state(const ModelParams& p, double F, double k);

Equilibrium classify_equilibrium(const ModelParams& p, const StatePoint& s);

// Integrand of the potential G at density u.
double potential_integrand(const ModelParams& p, const GammaKind& kind, double F_star,
                           double u, std::optional<double> eps);

double potential_G(const ModelParams& p, const GammaKind& kind, double F_star,
                   double F, std::optional<double> eps = std::nullopt,
                   int panels = 4096);

std::optional<double> solve_gamma_0(const ModelParams& p,
                                    Gamma0Mode mode = Gamma0Mode::ReferenceFStar);

}  // namespace sit

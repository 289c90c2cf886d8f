#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sit/model.hpp"

// Stationary half-line profiles. All lengths here are in diffusion-scaled
// units x~ = x / sqrt(D), in which the stationary equations read -u'' = f(u).

namespace sit {

struct MonotoneProfile {
  std::vector<double> grid;    // increasing, grid[0] = 0
  std::vector<double> values;  // same size as grid
  double limit_at_infinity = 0.0;

  // Linear interpolation; the limit beyond the last node.
  double operator()(double x) const;
  bool nondecreasing(double tol = 0.0) const;
  double spacing() const;  // uniform grid spacing
  void write_csv(std::ostream& os, const std::string& value_name = "value") const;
};

// Solution of -u'' + mu u = psi on (0, inf), u(0) = 0, bounded, sampled on a
// uniform grid of step h covering [0, x_max]. psi is integrated exactly as a
// piecewise-linear interpolant; the tail beyond x_max is sampled until the
// kernel drops below 1e-16. Throws DomainError if psi is not nondecreasing
// on the samples.
MonotoneProfile lemma1_solve(double mu, const std::function<double(double)>& psi,
                             double h, double x_max);

// Same solution with psi given by nodal samples on a uniform grid of step h
// starting at 0, extended by psi_tail beyond the last node.
std::vector<double> monotone_solve_samples(double mu, const std::vector<double>& psi,
                                         double h, double psi_tail);

// Lower bound psi(x)(1 - exp(-2 sqrt(mu) x)) / (2 mu) guaranteed for the solution.
double monotone_lower_bound(double mu, double psi_x, double x);

// Tabulated potential G(F) = int_0^F integrand(u) du on [0, F_star].
class PotentialTable {
 public:
  PotentialTable(const ModelParams& p, double F_star, std::optional<double> eps,
                 int cells = 1 << 14);
  double integrand(double u) const;
  double operator()(double F) const;
  // G(b) - G(a) integrated directly (accurate for b - a small).
  double difference(double a, double b) const;
  double F_star() const { return F_star_; }
  const std::vector<double>& nodes() const { return G_; }
  double node_spacing() const { return dF_; }

 private:
  double gauss(double a, double b) const;
  ModelParams p_;
  double F_star_;
  std::optional<double> eps_;
  double dF_;
  std::vector<double> G_;
};

struct StationaryOptions {
  double h = 0.002;        // scaled length step of the explicit integration
  double extend_to = 0.0;  // pad the profile with its limit up to this length
  int table_cells = 1 << 14;
};

struct StationaryFResult {
  std::optional<MonotoneProfile> profile;
  double F_star = 0.0;
  double F_m = 0.0;
  double G_max = 0.0;
  std::optional<double> eps;
  std::string diagnostic;
};

// Nondecreasing solution of -F'' = integrand(F), F(0) = 0, via
// F' = sqrt(2 (G(F_m) - G(F))) with F_m the smallest maximiser of G.
StationaryFResult build_stationary_F(const ModelParams& p, std::optional<double> eps,
                                     const StationaryOptions& opt = {});

// M profile solving -M'' = (1-rho) nu_E E(F) - mu_M M with the F profile's grid.
MonotoneProfile build_stationary_M(const ModelParams& p, const MonotoneProfile& F);

// Largest eps with G_eps(F*) > 0 found by bisection, times `safety`.
std::optional<double> find_eps_gamma(const ModelParams& p, double safety = 0.5);

// eps e^{-sqrt(mu_s) x}
double sterile_tail(const ModelParams& p, double eps, double x);

// Right-hand side of the stationary F equation with sterile males.
double g_F_eps(const ModelParams& p, double eps, double x, double M, double F);

}  // namespace sit

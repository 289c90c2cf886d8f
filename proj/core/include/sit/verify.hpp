#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sit/model.hpp"
#include "sit/profiles.hpp"
#include "sit/sterile.hpp"
#include "sit/supersolution.hpp"

// Numerical certificates for differential inequalities of radial fields
// u(r, t). Derivatives come from finite differences that never straddle a
// region boundary; kinks are judged by one-sided derivative jumps instead.

namespace sit {

enum class Sign { NonPositive, NonNegative };

struct SpaceTimeGrid {
  std::vector<double> r;
  std::vector<double> t;

  static SpaceTimeGrid uniform(double r_min, double r_max, int nr, double t_min,
                               double t_max, int nt);
};

struct LocalDerivatives {
  double u = 0.0;
  double ut = 0.0;
  double ur = 0.0;
  double urr = 0.0;
  double lap = 0.0;  // urr + ur/r (radial), 2 urr at r = 0, urr (Cartesian)
};

struct InterfaceCheck {
  double r = 0.0;
  double t = 0.0;
  double left = 0.0;
  double right = 0.0;
  bool passed = true;
};

struct InequalityReport {
  std::string name;
  bool passed = true;
  double worst = 0.0;  // residual value at the worst point
  double worst_r = 0.0;
  double worst_t = 0.0;
  std::size_t points_checked = 0;
  std::size_t points_skipped = 0;
  std::size_t violations = 0;
  std::vector<InterfaceCheck> interfaces;
  std::string note;
};

using Field = std::function<double(double r, double t)>;
using RegionFn = std::function<int(double r, double t)>;  // negative: outside
using Residual = std::function<double(double r, double t, const LocalDerivatives&)>;

struct FdOptions {
  double hr = 1e-2;
  double ht = 1e-2;
  double edge_ratio = 0.1;  // one-sided stencils use h * edge_ratio
  bool radial = true;
};

// Fourth-order central differences when the five-point stencil stays inside
// the region of (r, t), otherwise second-order one-sided. Radial fields are
// extended evenly through r = 0.
std::optional<LocalDerivatives> fd_derivatives(const Field& u, const RegionFn& region,
                                               double r, double t,
                                               const FdOptions& opt = {});

InequalityReport verify_inequality(const std::string& name, const Field& u,
                                   const RegionFn& region, const Residual& residual,
                                   Sign sign, const SpaceTimeGrid& grid, double tol,
                                   const FdOptions& opt = {});

// Derivative-free check of value(r, t) against the sign.
InequalityReport verify_pointwise(const std::string& name, const Field& value, Sign sign,
                                  const SpaceTimeGrid& grid, double tol);

// Kink admissibility: left >= right for super-solutions (NonNegative),
// left <= right for sub-solutions (NonPositive).
void check_jumps(InequalityReport& report, std::vector<InterfaceCheck> jumps, Sign sign,
                 double tol);

struct VerificationSummary {
  std::vector<InequalityReport> reports;
  std::vector<std::string> log;

  bool passed() const;
  std::vector<std::string> failures() const;
};

// --- super-solution -------------------------------------------------------

struct SupersolutionCheckOptions {
  int nr = 300;
  int nt = 41;
  double t_max = 0.0;     // 0: the bundle request horizon
  double r_margin = 10.0;  // scaled, beyond r2 + c t_max
  double tol = 1e-6;
  double ode_dt = 0.05;
  int ode_radii = 60;
};

VerificationSummary verify_supersolution(const SupersolutionBundle& b,
                                         const SupersolutionCheckOptions& opt = {});

struct BundleSearchResult {
  SupersolutionBundle bundle;
  VerificationSummary summary;
  std::vector<std::string> log;
  bool passed = false;
};

// Doubles C1 when the egg bound fails, halves mu and eps when a rate
// inequality fails, until the verifier passes or attempts run out.
BundleSearchResult search_bundle(const ModelParams& p, BundleRequest req,
                                 int max_attempts = 12,
                                 const SupersolutionCheckOptions& opt = {});

// --- sub-solution ---------------------------------------------------------

struct StationaryPair {
  MonotoneProfile F;
  MonotoneProfile M;
  double eps = 0.0;
  double F_star = 0.0;
  double M_star = 0.0;
  double F_m = 0.0;
};

// Builds the stationary pair with sterile tail eps (default: half the largest
// admissible eps). Throws DomainError when no profile exists.
StationaryPair build_stationary_pair(const ModelParams& p,
                                     std::optional<double> eps = std::nullopt,
                                     const StationaryOptions& opt = {});

struct SubsolutionCheckOptions {
  double tol = 1e-6;
  int node_stride = 5;
  double x_max = 0.0;  // 0: whole profile
};

VerificationSummary verify_stationary_subsolution(const ModelParams& p,
                                                  const StationaryPair& pair,
                                                  const SubsolutionCheckOptions& opt = {});

struct ShiftedCheck {
  double c = 0.0;  // scaled
  double shift = 0.0;
  std::vector<double> times;
};

// Smallest shift keeping gamma_s times the sterile upper bound below the
// tail eps e^{-sqrt(mu_s) xi} of the stationary pair.
double minimal_shift(const ModelParams& p, const SterileBoundProfile& upper, double eps);

VerificationSummary verify_shifted_subsolution(const ModelParams& p,
                                               const StationaryPair& pair,
                                               const SterileBoundProfile& upper,
                                               const ShiftedCheck& check,
                                               const SubsolutionCheckOptions& opt = {});

// --- sterile bounds ---------------------------------------------------------

struct SterileCheckOptions {
  int nr = 400;
  int nt = 21;
  double t_max = 100.0;
  double tol = 1e-8;
  double c1_tol = 1e-10;
};

// release(r, t) in the same scaled units as the profiles.
VerificationSummary verify_sterile_bounds(const SterileBoundProfile& lower,
                                          const SterileBoundProfile& upper,
                                          const Field& release,
                                          const SterileCheckOptions& opt = {});

}  // namespace sit

#pragma once

#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

#include "sit/model.hpp"
#include "sit/numerics.hpp"

// Semi-implicit finite-difference integration of the four-compartment
// system on a 1D Cartesian or a radially symmetric 2D grid. Physical units.

namespace sit {

enum class Geometry { Cartesian1D, Radial2D };

struct Grid {
  Geometry geometry = Geometry::Cartesian1D;
  std::vector<double> x;  // node positions (radii for Radial2D)
  double dx = 0.0;

  static Grid cartesian(double x_min, double x_max, std::size_t n);
  static Grid radial(double r_max, std::size_t n);
  std::size_t size() const { return x.size(); }
  bool radial() const { return geometry == Geometry::Radial2D; }
};

struct SimState {
  double t = 0.0;
  std::vector<double> E, M, F, Ms;

  explicit SimState(std::size_t n = 0) : E(n, 0.0), M(n, 0.0), F(n, 0.0), Ms(n, 0.0) {}
  StatePoint at(std::size_t i) const { return {E[i], M[i], F[i], Ms[i]}; }
  void set(std::size_t i, const StatePoint& s);
  std::size_t size() const { return F.size(); }
};

struct NoRelease {};
struct AnnulusRelease {
  double Lambda_bar = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  double c = 0.0;
};
struct AnnulusWithTailRelease {
  double Lambda_bar = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  double c = 0.0;
  double eta = 0.0;
};
// Constant release on r_in <= |x| <= r_out (r_in = 0: a disc).
struct FixedRegionRelease {
  double Lambda_bar = 0.0;
  double r_in = 0.0;
  double r_out = 0.0;
};
using ReleaseSchedule =
    std::variant<NoRelease, AnnulusRelease, AnnulusWithTailRelease, FixedRegionRelease>;

// Throws DomainError on negative amplitudes or inverted radii.
void validate_schedule(const ReleaseSchedule& s);
double release_value(const ReleaseSchedule& s, double x, double t);

enum class OuterBoundary { Neumann, Dirichlet };

struct StepperOptions {
  OuterBoundary outer = OuterBoundary::Neumann;  // Dirichlet holds boundary nodes fixed
  bool reactions = true;                         // false: pure diffusion
  double clamp_count = 1e-12;                    // relative undershoot that is counted
  double clamp_fail = 1e-9;                      // relative undershoot that aborts
};

// Largest loss rate of the explicit part for F bounded by f_max; the step
// must satisfy dt <= 0.5 / rate.
double reaction_rate_bound(const ModelParams& p, double f_max);
double admissible_dt(const ModelParams& p, double f_max);
// Asymptotic bound on F inside the invariant region, max(F0, rho nu_E K_max / mu_F).
double f_bound(const ModelParams& p, double f0_max);

class Stepper {
 public:
  Stepper(const ModelParams& p, const Grid& g, ReleaseSchedule schedule, double dt,
          StepperOptions opt = {});

  // Advances by dt. Throws SolverError if dt exceeds the admissible bound
  // for the current state or an undershoot exceeds the failure threshold.
  void step(SimState& s);

  double dt() const { return dt_; }
  std::size_t clamps() const { return clamps_; }
  const std::vector<double>& capacity() const { return K_; }

 private:
  void finish_field(std::vector<double>& u, double upper_ref);

  ModelParams p_;
  Grid g_;
  ReleaseSchedule schedule_;
  double dt_;
  StepperOptions opt_;
  std::vector<double> K_;
  TridiagonalLU lu_;
  std::vector<double> rhsM_, rhsF_, rhsS_;
  std::size_t clamps_ = 0;
};

struct Trajectory {
  std::vector<SimState> snapshots;
  std::size_t steps = 0;
  std::size_t clamps = 0;
  double dt = 0.0;
};

struct Scenario {
  ModelParams params;
  Grid grid;
  ReleaseSchedule schedule = NoRelease{};
  SimState initial;
  double t_end = 0.0;
  double dt = 0.0;  // 0: 0.9 of the admissible bound
  double snapshot_every = 1.0;
  StepperOptions options;
};

// Deterministic; snapshots at t = 0, snapshot_every, ..., t_end.
Trajectory run(const Scenario& sc,
               const std::function<void(const SimState&)>& on_snapshot = nullptr);

// Step count and step size actually used for a scenario.
std::pair<std::size_t, double> resolve_steps(const Scenario& sc);

// --- initial data -------------------------------------------------------

struct StepInitial {
  double position = 0.0;  // left state for x < position, right state otherwise
  StatePoint left;
  StatePoint right;
};
struct WellPreparedInitial {
  double R0_0 = 0.0;
  double R0_1 = 0.0;
  double u0 = 0.0;
  double C0 = 3.0;
  double Lambda_bar = 0.0;  // Ms0 = Lambda_bar / mu_s inside R0_0
};
struct UniformInitial {
  StatePoint value;
};
using InitialData = std::variant<StepInitial, WellPreparedInitial, UniformInitial>;

// Builds the initial state; the well-prepared variant targets the upper
// equilibrium for the local capacity and re-checks its bounds nodewise,
// throwing DomainError on any violation.
SimState make_initial(const InitialData& data, const Grid& g, const ModelParams& p);

}  // namespace sit

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sit/model.hpp"
#include "sit/solver.hpp"

// Post-processing of trajectories: fronts, speeds, outcome classification
// and release-cost accounting.

namespace sit {

struct FrontCrossing {
  double position = 0.0;
  int crossings = 0;  // > 1 flags a non-monotone field
  bool rising = false;  // field below the level inside, above it outside
};

// Outermost crossing of `level`, linearly interpolated; none when the field
// stays on one side.
std::optional<FrontCrossing> front_position(const std::vector<double>& field,
                                            const std::vector<double>& x, double level);

struct FrontTrace {
  std::vector<double> t;
  std::vector<double> position;
  std::vector<int> crossings;
  std::vector<char> rising;

  void push(double time, const FrontCrossing& c);
  std::size_t size() const { return t.size(); }
};

FrontTrace trace_front(const Trajectory& tr, const Grid& g, double level);

struct SpeedEstimate {
  bool determinate = false;
  double speed = 0.0;
  double rms = 0.0;
  std::size_t samples = 0;
  std::string note;
};

// Least-squares slope after dropping the first 20% of samples, restricted
// to the trailing `window` of time when window > 0. Needs 10 samples.
SpeedEstimate estimate_speed(const FrontTrace& trace, double window = 0.0);

enum class OutcomeKind { Invasion, Extinction, Carpet, Indeterminate };
std::string_view to_string(OutcomeKind k);

struct ClassifyOptions {
  std::optional<double> c;  // release speed; enables the carpet probes
  double c_under = 0.0;
  double c_over = 0.0;
  double tol_in = 1e-3;
  double tol_out = 1e-2;
  double level_fraction = 0.5;  // front level as a fraction of F*
  bool positivity_exterior = false;  // heterogeneous K: inf (E,M,F) > 0 outside
};

struct Outcome {
  OutcomeKind kind = OutcomeKind::Indeterminate;
  std::optional<double> speed;
  double s_in = 0.0;          // sup over |x| < c_under t of the relative norm
  double s_out = 0.0;         // inf over |x| > c_over t of the relative distance to equilibrium
  double s_out_sup = 0.0;     // sup of the same distance (diagnostic)
  double exterior_min = 0.0;  // inf over |x| > c_over t of min(E/E*, M/M*, F/F*)
  double global_sup = 0.0;
  double occupancy_initial = 0.0;
  double occupancy_final = 0.0;
  double probe_time = 0.0;
  FrontTrace trace;
  SpeedEstimate speed_estimate;
  std::vector<std::string> diagnostics;
};

// Upper equilibrium for the local capacity at every node.
std::vector<StatePoint> reference_states(const ModelParams& p, const Grid& g);

Outcome classify(const Trajectory& tr, const Grid& g, const ModelParams& p,
                 const ClassifyOptions& opt = {});

// --- release cost ---------------------------------------------------------

struct NaiveDiscRelease {
  double Lambda_bar = 0.0;
  double r = 0.0;
  double c = 0.0;
};
using CostSchedule = std::variant<NaiveDiscRelease, AnnulusRelease, AnnulusWithTailRelease,
                                  FixedRegionRelease>;

std::string cost_strategy_name(const CostSchedule& s);

// Closed-form total of the 2D release rate over [0, T].
double sterile_cost_total(const CostSchedule& s, double T);

// Space-time quadrature of the same total (oracle for the closed forms).
double sterile_cost_quadrature(const CostSchedule& s, double T, int nr = 4000, int nt = 400);

struct CostReport {
  std::string strategy;
  std::vector<double> T;
  std::vector<double> total;
  double exponent_fit = 0.0;
};

CostReport sterile_cost(const CostSchedule& s, const std::vector<double>& T_grid);

// --- speed monotonicity -----------------------------------------------------

struct SpeedRow {
  double gamma = 0.0;
  OutcomeKind kind = OutcomeKind::Indeterminate;
  double speed = 0.0;
  double rms = 0.0;
  bool excluded = false;
};

struct MonotonicityReport {
  std::vector<SpeedRow> rows;  // sorted by gamma
  bool nondecreasing = false;
  double tolerance = 0.0;
};

// make_scenario(gamma) builds one run; runs execute on `workers` threads.
MonotonicityReport speed_monotonicity(const std::function<Scenario(double)>& make_scenario,
                                      std::vector<double> gammas, unsigned workers = 4,
                                      const ClassifyOptions& opt = {});

}  // namespace sit

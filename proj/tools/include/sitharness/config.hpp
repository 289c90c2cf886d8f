#pragma once

#include <cstdint>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "sit/solver.hpp"
#include "sit/supersolution.hpp"
#include "sit/waves.hpp"

// Flat key = value scenario configuration with dotted sections.

namespace sitharness {

struct ModelSection {
  double b = 10.0;
  double nu_E = 0.08;
  double mu_E = 0.05;
  double mu_M = 0.14;
  double mu_F = 0.1;
  double mu_s = 0.12;
  double rho = 0.5;
  double K = 200.0;
  double K_amplitude = 0.0;
  double K_wavelength = 10.0;
  double D = 0.1;
  double gamma = 0.5;
  double gamma_s = 1.0;
  std::string gamma_kind = "bistable";  // bistable | monostable

  bool operator==(const ModelSection&) const = default;
};

struct GridSection {
  std::string geometry = "cartesian";  // cartesian | radial
  double x_min = -40.0;                // ignored for radial grids
  double x_max = 40.0;
  std::size_t n = 801;

  bool operator==(const GridSection&) const = default;
};

struct ScheduleSection {
  std::string kind = "none";  // none | annulus | annulus-tail | fixed-region
  double Lambda_bar = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  double c = 0.0;
  double eta = 0.0;
  double r_in = 0.0;
  double r_out = 0.0;

  bool operator==(const ScheduleSection&) const = default;
};

struct InitialSection {
  std::string kind = "step";  // step | well-prepared | uniform
  double position = -10.0;    // step: upper state left of it, extinct right of it
  double fraction = 1.0;      // uniform: multiple of the upper state
  double R0_0 = 0.0;
  double R0_1 = 0.0;
  double u0 = 0.0;
  double C0 = 3.0;

  bool operator==(const InitialSection&) const = default;
};

struct RunSection {
  double t_end = 150.0;
  double dt = 0.0;  // 0: automatic
  double snapshot_every = 1.0;
  std::size_t csv_every = 1;  // write every k-th snapshot to snapshots.csv
  std::string boundary = "neumann";  // neumann | dirichlet

  bool operator==(const RunSection&) const = default;
};

struct AnalysisSection {
  double level = 0.0;  // front level density, 0: half the upper F
  bool carpet_probes = false;
  double c_under = 0.0;
  double c_over = 0.0;
  double tol_in = 1e-3;
  double tol_out = 1e-2;
  bool positivity_exterior = false;

  bool operator==(const AnalysisSection&) const = default;
};

// Constants of the super-solution search; 0 means "derive".
struct VerifySection {
  double c = 0.05;
  double r1 = 3.0;
  double mu = 0.0;
  double eps = 0.0;
  double u0 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double t_check = 200.0;
  double inner_margin = 1.0;  // R1 = r1 - margin, physical
  double outer_margin = 1.0;  // R2 = r2 + margin, physical
  std::size_t max_attempts = 12;  // ignored when any constant is fixed
  double tail_eta = 0.05;         // scaled decay rate of the tail-release check

  bool operator==(const VerifySection&) const = default;
};

struct CostSection {
  double Lambda_bar = 1.0;
  double c = 1.0;
  double r = 1.0;  // naive disc radius
  double r1 = 1.0;
  double r2 = 2.0;
  double eta = 1.0;
  std::string T = "10,100,1000,10000";

  bool operator==(const CostSection&) const = default;
};

struct ScenarioConfig {
  ModelSection model;
  GridSection grid;
  ScheduleSection schedule;
  InitialSection initial;
  RunSection run;
  AnalysisSection analysis;
  VerifySection verify;
  CostSection cost;
  std::string output_dir;  // empty: derived from the output root

  bool operator==(const ScenarioConfig&) const = default;
};

// Parses text; keys absent from the text keep their defaults. Throws
// sit::ConfigError naming the line and key.
ScenarioConfig parse_config(std::string_view text, ScenarioConfig base = {});
ScenarioConfig load_config(const std::string& path, ScenarioConfig base = {});

// Applies one "key=value" override.
void set_value(ScenarioConfig& cfg, std::string_view key, std::string_view value);
std::string get_value(const ScenarioConfig& cfg, std::string_view key);
std::vector<std::string> config_keys();

// Canonical text, every key, doubles at full precision; parse_config of it
// reproduces the config exactly.
std::string echo_config(const ScenarioConfig& cfg);

// FNV-1a of the echo without the output directory.
std::uint64_t config_hash(const ScenarioConfig& cfg);
std::string hash_hex(std::uint64_t h);

// Throws sit::ConfigError with the offending field.
void validate(const ScenarioConfig& cfg);

sit::ModelParams to_params(const ScenarioConfig& cfg);
sit::Grid to_grid(const ScenarioConfig& cfg);
sit::ReleaseSchedule to_schedule(const ScenarioConfig& cfg);
sit::Scenario to_scenario(const ScenarioConfig& cfg);
sit::ClassifyOptions to_classify_options(const ScenarioConfig& cfg);
sit::BundleRequest to_bundle_request(const ScenarioConfig& cfg);
// 1 when any bundle constant is fixed by the config, else verify.max_attempts.
int search_attempts(const ScenarioConfig& cfg);
std::vector<double> cost_times(const ScenarioConfig& cfg);
std::vector<sit::CostSchedule> cost_schedules(const ScenarioConfig& cfg);

// Upper equilibrium of the homogeneous model at the base capacity.
sit::StatePoint upper_state(const sit::ModelParams& p);

}  // namespace sitharness

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "sit/equilibria.hpp"
#include "sit/verify.hpp"
#include "sit/waves.hpp"
#include "sitharness/config.hpp"

namespace sitharness {

enum ExitCode : int { kOk = 0, kConfigError = 2, kSolverError = 3, kVerifyFailure = 4 };

struct CommandOptions {
  std::filesystem::path out;  // explicit run directory
  unsigned workers = 4;
  std::optional<double> level;  // front level density
  std::string which = "all";    // verify: subsolution | supersolution | sterile-bounds | all
  std::string axis;             // sweep
  std::vector<std::string> values;
  bool write = true;            // false: compute only
};

// Explicit --out, then output.dir, then $SITCARPET_OUT (default ./runs)
// joined with "<command>-<hash>".
std::filesystem::path run_directory(const ScenarioConfig& cfg, const std::string& command,
                                    const CommandOptions& opt);

// --- analyze ---
struct AnalyzeResult {
  sit::ThresholdReport thresholds;
  sit::EquilibriumSet equilibria;
};
AnalyzeResult analyze(const ScenarioConfig& cfg);
nlohmann::json to_json(const AnalyzeResult& r);

// --- simulate ---
struct RunRecord {
  std::string config_hash;
  std::filesystem::path dir;
  std::filesystem::path snapshots;
  std::filesystem::path trace;
  sit::Outcome outcome;
  std::size_t steps = 0;
  std::size_t clamps = 0;
  double dt = 0.0;
  double wall_time = 0.0;
};
// Writes config.txt, snapshots.csv, trace.csv, outcome.json and record.json
// into dir unless dir is empty.
RunRecord simulate(const ScenarioConfig& cfg, const std::filesystem::path& dir);
nlohmann::json outcome_json(const RunRecord& r);

// --- verify ---
using VerifyGroup = std::pair<std::string, sit::VerificationSummary>;
std::vector<VerifyGroup> verify(const ScenarioConfig& cfg, const std::string& which);
nlohmann::json to_json(const std::vector<VerifyGroup>& groups);

// --- sweep ---
struct SweepRow {
  std::string value;
  double numeric = 0.0;
  std::optional<sit::OutcomeKind> kind;
  std::optional<double> speed;
  double s_in = 0.0;
  double s_out = 0.0;
  double global_sup = 0.0;
  std::string error;
};
// Rows sorted by value; every row is validated before any runs.
std::vector<SweepRow> sweep(const ScenarioConfig& cfg, const std::string& axis,
                            const std::vector<std::string>& values, unsigned workers);
std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& axis);

// --- cost ---
struct CostRow {
  std::string strategy;
  double T = 0.0;
  double total = 0.0;
  double quadrature = 0.0;
  double exponent = 0.0;
};
std::vector<sit::CostReport> cost(const ScenarioConfig& cfg);
std::vector<CostRow> cost_table(const ScenarioConfig& cfg);
std::string cost_csv(const std::vector<CostRow>& rows);

// Runs one subcommand, printing to out; exceptions become exit codes.
int dispatch(const std::string& command, const ScenarioConfig& cfg, const CommandOptions& opt,
             std::ostream& out, std::ostream& err);

}  // namespace sitharness

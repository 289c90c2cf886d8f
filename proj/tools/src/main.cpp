#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sit/errors.hpp"
#include "sitharness/commands.hpp"
#include "sitharness/presets.hpp"

using namespace sitharness;

int main(int argc, char** argv) {
  CLI::App app{"Sterile-release scenarios: equilibria, simulations, certificates, sweeps, cost"};
  app.require_subcommand(1);

  std::string config_path, preset_name, out_dir, level_text;
  std::vector<std::string> overrides;
  CommandOptions opt;
  bool no_write = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Scenario file (key = value)");
    sub->add_option("--preset", preset_name, "Named scenario, applied before --config")
        ->check(CLI::IsMember(preset_names()));
    sub->add_option("--set", overrides, "Override one key, e.g. --set model.gamma=0.1");
    sub->add_option("--out", out_dir, "Run directory (default: $SITCARPET_OUT or ./runs)");
    sub->add_option("--workers", opt.workers, "Concurrent sweep rows")->check(CLI::PositiveNumber);
    sub->add_option("--level", level_text, "Front level density (default: half the upper F)");
    sub->add_flag("--no-write", no_write, "Print results without writing files");
  };

  auto* analyze = app.add_subcommand("analyze", "Thresholds, equilibria and their stability");
  auto* simulate = app.add_subcommand("simulate", "Run a scenario and classify the outcome");
  auto* verify = app.add_subcommand("verify", "Residual checks of the comparison functions");
  auto* sweep = app.add_subcommand("sweep", "Run a scenario over values of one key");
  auto* cost = app.add_subcommand("cost", "Sterile-male totals per release strategy");
  for (auto* sub : {analyze, simulate, verify, sweep, cost}) common(sub);
  verify->add_option("which", opt.which, "subsolution, supersolution, sterile-bounds or all")
      ->check(CLI::IsMember({"subsolution", "supersolution", "sterile-bounds", "all"}));
  sweep->add_option("--axis", opt.axis, "Config key to vary")->required();
  sweep->add_option("--values", opt.values, "Comma-separated values")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  ScenarioConfig cfg;
  try {
    if (!preset_name.empty()) cfg = preset(preset_name);
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw sit::ConfigError("--set expects key=value, got '" + o + "'");
      set_value(cfg, o.substr(0, eq), o.substr(eq + 1));
    }
    if (!level_text.empty()) {
      std::size_t used = 0;
      opt.level = std::stod(level_text, &used);
      if (used != level_text.size() || *opt.level <= 0.0) throw std::invalid_argument("level");
    }
  } catch (const sit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const sit::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const std::invalid_argument&) {
    std::cerr << "config error: --level expects a positive density\n";
    return kConfigError;
  }
  opt.out = out_dir;
  opt.write = !no_write;
  return dispatch(command, cfg, opt, std::cout, std::cerr);
}

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sit/errors.hpp"
#include "sitharness/commands.hpp"
#include "sitharness/presets.hpp"

using namespace sitharness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("sitharness-test-" + name);
  fs::remove_all(d);
  return d;
}

int quiet_dispatch(const std::string& cmd, const ScenarioConfig& cfg, CommandOptions opt = {}) {
  opt.write = false;
  std::ostringstream out, err;
  return dispatch(cmd, cfg, opt, out, err);
}

}  // namespace

TEST_CASE("config echo round-trips field by field") {
  ScenarioConfig c;
  c.model.gamma = 0.1 + 0.2;  // not exactly representable in short decimal
  c.schedule.Lambda_bar = 1.0 / 3.0;
  c.analysis.positivity_exterior = true;
  c.output_dir = "somewhere";
  CHECK(parse_config(echo_config(c)) == c);
  for (const auto& name : {"fig1", "fig2-right", "no-release-2d", "carpet"}) {
    const auto p = preset(name);
    CHECK(parse_config(echo_config(p)) == p);
  }
  CHECK(config_keys().size() > 50);
}

TEST_CASE("config parsing and validation errors name the field") {
  CHECK_THROWS_WITH_AS(parse_config("model.nope = 1\n"), doctest::Contains("model.nope"), sit::ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("\n\nmodel.gamma = x\n"), doctest::Contains("line 3"), sit::ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("model.gamma 0.5\n"), doctest::Contains("key = value"), sit::ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("grid.n = -4\n"), doctest::Contains("grid.n"), sit::ConfigError);
  const auto c = parse_config("# comment\nmodel.gamma = 0.25  # trailing\n\nrun.t_end=12\n");
  CHECK(c.model.gamma == 0.25);
  CHECK(c.run.t_end == 12.0);

  auto bad = ScenarioConfig{};
  bad.model.rho = 1.5;
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("rho"), sit::ConfigError);
  bad = ScenarioConfig{};
  bad.grid.geometry = "square";
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("grid.geometry"), sit::ConfigError);
  bad = ScenarioConfig{};
  bad.schedule.kind = "annulus";
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("schedule"), sit::ConfigError);
  bad = ScenarioConfig{};
  bad.cost.T = "10,abc";
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("cost.T"), sit::ConfigError);
}

TEST_CASE("config hash ignores the output location only") {
  ScenarioConfig a, b;
  b.output_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.model.gamma = 0.6;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(hash_hex(config_hash(a)).size() == 16);
}

TEST_CASE("presets describe the documented scenarios") {
  const auto f1 = preset("fig1");
  CHECK(f1.grid.geometry == "cartesian");
  CHECK(f1.grid.x_min == -40.0);
  CHECK(f1.grid.x_max == 40.0);
  CHECK(f1.initial.kind == "step");
  CHECK(f1.initial.position == -10.0);
  CHECK(f1.run.t_end == 150.0);
  CHECK(f1.model.gamma == 0.5);
  CHECK(preset("fig2-left").model.gamma == 0.01);
  CHECK(preset("fig2-right").model.gamma == 2.355e-3);

  const auto nr = preset("no-release-2d");
  CHECK(nr.grid.geometry == "radial");
  CHECK(nr.grid.x_max == 45.0);
  CHECK(nr.schedule.kind == "none");
  CHECK(nr.initial.kind == "well-prepared");

  const auto cp = preset("carpet");
  CHECK(cp.schedule.kind == "annulus");
  CHECK(cp.schedule.R1 < cp.schedule.R2);
  CHECK(cp.schedule.Lambda_bar > 0.0);
  CHECK(cp.initial.R0_0 == doctest::Approx(cp.schedule.R2 + 1.0));
  CHECK(cp.analysis.carpet_probes);
  CHECK(cp.analysis.c_under < cp.schedule.c);
  CHECK(cp.analysis.c_over > cp.schedule.c);
  CHECK(preset("carpet-hetero").model.K_amplitude == 50.0);
  CHECK_THROWS_AS(preset("fig9"), sit::ConfigError);
}

TEST_CASE("output root comes from the environment") {
  ScenarioConfig c;
  CommandOptions o;
  ::setenv("SITCARPET_OUT", "/tmp/sit-root", 1);
  CHECK(run_directory(c, "simulate", o) == fs::path("/tmp/sit-root") / ("simulate-" + hash_hex(config_hash(c))));
  ::unsetenv("SITCARPET_OUT");
  CHECK(run_directory(c, "simulate", o).parent_path() == fs::path("runs"));
  o.out = "/tmp/explicit";
  CHECK(run_directory(c, "simulate", o) == fs::path("/tmp/explicit"));
}

TEST_CASE("identical configs give byte-identical CSV outputs") {
  auto c = preset("fig1");
  c.run.t_end = 40.0;
  const auto a = scratch("det-a"), b = scratch("det-b");
  const auto ra = simulate(c, a);
  const auto rb = simulate(c, b);
  CHECK(ra.config_hash == rb.config_hash);
  CHECK(slurp(a / "snapshots.csv") == slurp(b / "snapshots.csv"));
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
  CHECK(slurp(a / "outcome.json") == slurp(b / "outcome.json"));
  CHECK(parse_config(slurp(a / "config.txt")) == c);
  CHECK(slurp(a / "snapshots.csv").rfind("t,x,E,M,F,Ms\n", 0) == 0);
  CHECK(fs::exists(a / "record.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("sweep rows are sorted and match single simulations") {
  auto c = preset("fig1");
  c.run.t_end = 60.0;
  const auto rows = sweep(c, "model.gamma", {"1.0", "0.05", "0.5"}, 3);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].numeric == 0.05);
  CHECK(rows[2].numeric == 1.0);
  const auto again = sweep(c, "model.gamma", {"0.5", "1.0", "0.05"}, 1);
  CHECK(sweep_csv(rows, "model.gamma") == sweep_csv(again, "model.gamma"));

  const auto single = sweep(c, "model.gamma", {"0.5"}, 1);
  const auto rec = simulate(c, {});
  CHECK(single[0].kind == rec.outcome.kind);
  CHECK(single[0].speed == rec.outcome.speed);
  CHECK(single[0].s_in == rec.outcome.s_in);

  CHECK_THROWS_AS(sweep(c, "grid.geometry", {"radial"}, 1), sit::ConfigError);
  CHECK_THROWS_AS(sweep(c, "model.rho", {"2"}, 1), sit::ConfigError);
}

TEST_CASE("analyze reports the regime") {
  ScenarioConfig c;
  auto r = analyze(c);
  CHECK(r.thresholds.regime == sit::Regime::BistableAboveGamma0);
  CHECK(r.equilibria.upper->state.F == doctest::Approx(77.4).epsilon(0.005));
  c.model.gamma = 0.01;
  CHECK(analyze(c).thresholds.regime == sit::Regime::BistableBetweenGammaCAndGamma0);
  c.model.gamma = 1e-4;
  CHECK(analyze(c).thresholds.regime == sit::Regime::BistableBelowGammaC);
  CHECK(to_json(analyze(c))["regime"] == "BistableBelowGammaC");
}

TEST_CASE("verify groups") {
  ScenarioConfig c;
  const auto all = verify(c, "all");
  REQUIRE(all.size() == 3);
  for (const auto& [name, s] : all) CHECK_MESSAGE(s.passed(), name);
  c.verify.mu = 0.6;
  const auto bad = verify(c, "supersolution");
  REQUIRE(bad.size() == 1);
  CHECK_FALSE(bad[0].second.passed());
  bool named = false;
  for (const auto& f : bad[0].second.failures()) named = named || f.find("C1 bound") != std::string::npos;
  CHECK(named);
}

TEST_CASE("cost table") {
  ScenarioConfig c;
  const auto rows = cost_table(c);
  REQUIRE(rows.size() == 12);
  for (const auto& r : rows) CHECK(r.quadrature == doctest::Approx(r.total).epsilon(1e-3));
  CHECK(rows.front().strategy == "naive");
  CHECK(cost_csv(rows).rfind("strategy,T,total,quadrature,exponent\n", 0) == 0);
}

TEST_CASE("exit codes") {
  ScenarioConfig c;
  CHECK(quiet_dispatch("analyze", c) == kOk);
  auto bad = c;
  bad.grid.n = 2;
  CHECK(quiet_dispatch("simulate", bad) == kConfigError);
  CHECK(quiet_dispatch("launch", c) == kConfigError);
  auto fast = c;
  fast.run.dt = 5.0;
  fast.run.t_end = 10.0;
  CHECK(quiet_dispatch("simulate", fast) == kSolverError);
  auto strict = c;
  strict.verify.mu = 0.6;
  CommandOptions o;
  o.which = "supersolution";
  CHECK(quiet_dispatch("verify", strict, o) == kVerifyFailure);
  CommandOptions s;
  s.axis = "run.dt";
  s.values = {"0", "5"};
  auto shortrun = c;
  shortrun.run.t_end = 10.0;
  CHECK(quiet_dispatch("sweep", shortrun, s) == kSolverError);
}

#include "sitharness/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "sit/errors.hpp"
#include "sit/numerics.hpp"
#include "sit/sterile.hpp"
#include "sitharness/presets.hpp"

namespace sitharness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

std::string fmt(double x, const char* spec = "%.12g") {
  char buf[40];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json state_json(const sit::StatePoint& s) {
  return {{"E", s.E}, {"M", s.M}, {"F", s.F}, {"Ms", s.Ms}};
}

json equilibrium_json(const sit::Equilibrium& e) {
  json eig = json::array();
  for (const auto& l : e.eigenvalues) eig.push_back({l.real(), l.imag()});
  return {{"state", state_json(e.state)},
          {"stability", std::string(sit::to_string(e.stability))},
          {"eigenvalues", eig}};
}

std::string snapshots_csv(const sit::Trajectory& tr, const sit::Grid& g, std::size_t every) {
  std::string out = g.radial() ? "t,r,E,M,F,Ms\n" : "t,x,E,M,F,Ms\n";
  for (std::size_t k = 0; k < tr.snapshots.size(); k += every) {
    const auto& s = tr.snapshots[k];
    const auto t = fmt(s.t);
    for (std::size_t i = 0; i < s.size(); ++i) {
      out += t;
      for (double v : {g.x[i], s.E[i], s.M[i], s.F[i], s.Ms[i]}) {
        out += ',';
        out += fmt(v);
      }
      out += '\n';
    }
  }
  return out;
}

std::string trace_csv(const sit::FrontTrace& tr) {
  std::string out = "t,position,crossings,rising\n";
  for (std::size_t k = 0; k < tr.size(); ++k)
    out += fmt(tr.t[k]) + ',' + fmt(tr.position[k]) + ',' + std::to_string(tr.crossings[k]) + ',' +
           (tr.rising[k] ? "1" : "0") + '\n';
  return out;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_summary(std::ostream& out, const std::string& group, const sit::VerificationSummary& s) {
  out << group << ": " << (s.passed() ? "pass" : "FAIL") << '\n';
  for (const auto& line : s.log) out << "  " << line << '\n';
  for (const auto& r : s.reports) {
    out << "  " << (r.passed ? "ok   " : "FAIL ") << r.name << "  worst=" << fmt(r.worst, "%.3e")
        << " at (r=" << fmt(r.worst_r, "%.4g") << ", t=" << fmt(r.worst_t, "%.4g") << ")"
        << "  points=" << r.points_checked;
    if (r.violations) out << "  violations=" << r.violations;
    if (!r.note.empty()) out << "  " << r.note;
    out << '\n';
  }
}

}  // namespace

fs::path run_directory(const ScenarioConfig& cfg, const std::string& command,
                       const CommandOptions& opt) {
  if (!opt.out.empty()) return opt.out;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  const char* env = std::getenv("SITCARPET_OUT");
  fs::path root = (env && *env) ? fs::path(env) : fs::path("runs");
  return root / (command + "-" + hash_hex(config_hash(cfg)));
}

// --- analyze ---------------------------------------------------------------

AnalyzeResult analyze(const ScenarioConfig& cfg) {
  validate(cfg);
  auto p = to_params(cfg);
  p = p.with_capacity(p.K.base);
  return {sit::thresholds(p), sit::solve_equilibria(p)};
}

json to_json(const AnalyzeResult& r) {
  const auto& t = r.thresholds;
  json eq = {{"extinction", equilibrium_json(r.equilibria.extinction)},
             {"degenerate", r.equilibria.degenerate}};
  eq["middle"] = r.equilibria.middle ? equilibrium_json(*r.equilibria.middle) : json(nullptr);
  eq["upper"] = r.equilibria.upper ? equilibrium_json(*r.equilibria.upper) : json(nullptr);
  return {{"offspring_number", t.n_offspring},
          {"zeta", opt_json(t.zeta)},
          {"zeta_c", opt_json(t.zeta_c)},
          {"gamma_c", opt_json(t.gamma_c)},
          {"gamma_0", opt_json(t.gamma_0)},
          {"gamma_0_self_consistent", opt_json(t.gamma_0_self_consistent)},
          {"regime", std::string(sit::to_string(t.regime))},
          {"natural_extinction", t.natural_extinction},
          {"equilibria", eq}};
}

// --- simulate --------------------------------------------------------------

RunRecord simulate(const ScenarioConfig& cfg, const fs::path& dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sc = to_scenario(cfg);
  const auto opt = to_classify_options(cfg);

  RunRecord rec;
  rec.config_hash = hash_hex(config_hash(cfg));
  sit::Trajectory tr;
  try {
    tr = sit::run(sc);
  } catch (const sit::SolverError& e) {
    throw sit::SolverError(std::string("simulation failed: ") + e.what());
  }
  rec.outcome = sit::classify(tr, sc.grid, sc.params, opt);
  rec.steps = tr.steps;
  rec.clamps = tr.clamps;
  rec.dt = tr.dt;

  if (!dir.empty()) {
    fs::create_directories(dir);
    rec.dir = dir;
    rec.snapshots = dir / "snapshots.csv";
    rec.trace = dir / "trace.csv";
    write_file(dir / "config.txt", echo_config(cfg));
    write_file(rec.snapshots, snapshots_csv(tr, sc.grid, cfg.run.csv_every));
    write_file(rec.trace, trace_csv(rec.outcome.trace));
    write_file(dir / "outcome.json", outcome_json(rec).dump(2) + '\n');
  }
  rec.wall_time = elapsed(t0);
  if (!dir.empty()) {
    json record = {{"config_hash", rec.config_hash},
                   {"snapshots", rec.snapshots.filename().string()},
                   {"trace", rec.trace.filename().string()},
                   {"outcome", "outcome.json"},
                   {"kind", std::string(sit::to_string(rec.outcome.kind))},
                   {"wall_time", rec.wall_time}};
    write_file(dir / "record.json", record.dump(2) + '\n');
  }
  return rec;
}

json outcome_json(const RunRecord& r) {
  const auto& o = r.outcome;
  const auto& se = o.speed_estimate;
  return {{"config_hash", r.config_hash},
          {"kind", std::string(sit::to_string(o.kind))},
          {"speed", opt_json(o.speed)},
          {"s_in", o.s_in},
          {"s_out", o.s_out},
          {"s_out_sup", o.s_out_sup},
          {"exterior_min", o.exterior_min},
          {"global_sup", o.global_sup},
          {"occupancy_initial", o.occupancy_initial},
          {"occupancy_final", o.occupancy_final},
          {"probe_time", o.probe_time},
          {"speed_estimate",
           {{"determinate", se.determinate},
            {"speed", se.speed},
            {"rms", se.rms},
            {"samples", se.samples},
            {"note", se.note}}},
          {"diagnostics", o.diagnostics},
          {"steps", r.steps},
          {"clamps", r.clamps},
          {"dt", r.dt}};
}

// --- verify ----------------------------------------------------------------

std::vector<VerifyGroup> verify(const ScenarioConfig& cfg, const std::string& which) {
  validate(cfg);
  const bool all = which == "all";
  if (!all && which != "subsolution" && which != "supersolution" && which != "sterile-bounds")
    throw sit::ConfigError("verify: expected subsolution, supersolution, sterile-bounds or all");

  auto p = to_params(cfg);
  p = p.with_capacity(p.K.base);
  std::vector<VerifyGroup> groups;

  auto search = sit::search_bundle(p, to_bundle_request(cfg), search_attempts(cfg));
  if (all || which == "supersolution") {
    auto summary = search.summary;
    summary.log.insert(summary.log.begin(), search.log.begin(), search.log.end());
    groups.emplace_back("supersolution", std::move(summary));
  }
  if (!all && which == "supersolution") return groups;
  if (!search.passed) {
    sit::VerificationSummary blocked;
    sit::InequalityReport r;
    r.name = "bundle search";
    r.passed = false;
    for (const auto& f : search.summary.failures()) r.note += (r.note.empty() ? "" : "; ") + f;
    blocked.reports.push_back(r);
    blocked.log = search.log;
    if (all || which == "subsolution") groups.emplace_back("subsolution", blocked);
    if (all || which == "sterile-bounds") groups.emplace_back("sterile-bounds", blocked);
    return groups;
  }

  const auto& B = search.bundle;
  const double s = B.sqrtD;
  const auto cr =
      sit::carpet_release(B, cfg.verify.inner_margin / s, cfg.verify.outer_margin / s, cfg.verify.t_check);
  // Initial sterile males cover the clean disc of the well-prepared data.
  const double Rs = cr.R2 + 1.0 / s;
  const auto upper = sit::sterile_upper_bound(p, cr.Lambda_bar, B.c, Rs, cr.Lambda_bar / p.mu_s);

  if (all || which == "subsolution") {
    const auto pair = sit::build_stationary_pair(p);
    auto summary = sit::verify_stationary_subsolution(p, pair);
    summary.log.push_back("eps=" + fmt(pair.eps, "%.6g") + " F_m=" + fmt(pair.F_m, "%.6g") +
                          " F*=" + fmt(pair.F_star, "%.6g"));
    sit::ShiftedCheck sc;
    sc.c = B.c;
    sc.shift = sit::minimal_shift(p, upper, pair.eps);
    for (int k = 0; k <= 4; ++k) sc.times.push_back(cfg.verify.t_check * k / 4.0);
    auto shifted = sit::verify_shifted_subsolution(p, pair, upper, sc);
    summary.log.push_back("shift=" + fmt(sc.shift, "%.6g"));
    for (auto& r : shifted.reports) summary.reports.push_back(std::move(r));
    groups.emplace_back("subsolution", std::move(summary));
  }

  if (all || which == "sterile-bounds") {
    const auto lower = sit::make_sterile_lower_bound(p, cr.Lambda_bar, B.c, cr.R1, cr.r1, cr.r2, cr.R2);
    const sit::ReleaseSchedule rel = sit::AnnulusRelease{cr.Lambda_bar, cr.R1, cr.R2, B.c};
    auto summary = sit::verify_sterile_bounds(
        lower, upper, [&](double r, double t) { return sit::release_value(rel, r, t); });
    summary.log.push_back("Lambda_bar=" + fmt(cr.Lambda_bar, "%.6g") + " R1=" + fmt(cr.R1, "%.6g") +
                          " r1=" + fmt(cr.r1, "%.6g") + " r2=" + fmt(cr.r2, "%.6g") +
                          " R2=" + fmt(cr.R2, "%.6g") + " (scaled)");

    const double eta = cfg.verify.tail_eta;
    const auto tail = sit::make_sterile_lower_bound(p, cr.Lambda_bar, B.c, cr.R1, cr.r1, cr.r2, cr.R2, eta);
    const sit::ReleaseSchedule rel_tail = sit::AnnulusWithTailRelease{cr.Lambda_bar, cr.R1, cr.R2, B.c, eta};
    auto tail_summary = sit::verify_sterile_bounds(
        tail, upper, [&](double r, double t) { return sit::release_value(rel_tail, r, t); });
    for (auto& r : tail_summary.reports) {
      r.name = "tail release: " + r.name;
      summary.reports.push_back(std::move(r));
    }
    groups.emplace_back("sterile-bounds", std::move(summary));
  }
  return groups;
}

json to_json(const std::vector<VerifyGroup>& groups) {
  json out = json::object();
  for (const auto& [name, s] : groups) {
    json reports = json::array();
    for (const auto& r : s.reports) {
      json jumps = json::array();
      for (const auto& j : r.interfaces)
        jumps.push_back({{"r", j.r}, {"t", j.t}, {"left", j.left}, {"right", j.right}, {"passed", j.passed}});
      reports.push_back({{"name", r.name},
                         {"passed", r.passed},
                         {"worst", r.worst},
                         {"worst_r", r.worst_r},
                         {"worst_t", r.worst_t},
                         {"points_checked", r.points_checked},
                         {"points_skipped", r.points_skipped},
                         {"violations", r.violations},
                         {"interfaces", jumps},
                         {"note", r.note}});
    }
    out[name] = {{"passed", s.passed()}, {"log", s.log}, {"reports", reports}};
  }
  return out;
}

// --- sweep -----------------------------------------------------------------

std::vector<SweepRow> sweep(const ScenarioConfig& cfg, const std::string& axis,
                            const std::vector<std::string>& values, unsigned workers) {
  if (values.empty()) throw sit::ConfigError("sweep: no values given");
  std::vector<ScenarioConfig> configs;
  std::vector<SweepRow> rows(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    auto c = cfg;
    set_value(c, axis, values[k]);
    validate(c);
    rows[k].value = get_value(c, axis);
    char* end = nullptr;
    rows[k].numeric = std::strtod(rows[k].value.c_str(), &end);
    if (end == rows[k].value.c_str()) throw sit::ConfigError("sweep: axis '" + axis + "' is not numeric");
    configs.push_back(std::move(c));
  }
  sit::parallel_for(configs.size(), workers, [&](std::size_t k) {
    try {
      const auto rec = simulate(configs[k], {});
      rows[k].kind = rec.outcome.kind;
      rows[k].speed = rec.outcome.speed;
      rows[k].s_in = rec.outcome.s_in;
      rows[k].s_out = rec.outcome.s_out;
      rows[k].global_sup = rec.outcome.global_sup;
    } catch (const std::exception& e) {
      rows[k].error = e.what();
    }
  });
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.numeric < b.numeric; });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& axis) {
  std::string out = axis + ",outcome,speed,s_in,s_out,global_sup,error\n";
  for (const auto& r : rows) {
    out += r.value + ',' + (r.kind ? std::string(sit::to_string(*r.kind)) : std::string("error")) + ',' +
           (r.speed ? fmt(*r.speed) : std::string()) + ',' + fmt(r.s_in) + ',' + fmt(r.s_out) + ',' +
           fmt(r.global_sup) + ',';
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out += err + '\n';
  }
  return out;
}

// --- cost ------------------------------------------------------------------

std::vector<sit::CostReport> cost(const ScenarioConfig& cfg) {
  validate(cfg);
  const auto T = cost_times(cfg);
  std::vector<sit::CostReport> out;
  for (const auto& s : cost_schedules(cfg)) out.push_back(sit::sterile_cost(s, T));
  return out;
}

std::vector<CostRow> cost_table(const ScenarioConfig& cfg) {
  validate(cfg);
  const auto T = cost_times(cfg);
  std::vector<CostRow> rows;
  for (const auto& s : cost_schedules(cfg)) {
    const auto rep = sit::sterile_cost(s, T);
    for (std::size_t k = 0; k < T.size(); ++k)
      rows.push_back({rep.strategy, T[k], rep.total[k], sit::sterile_cost_quadrature(s, T[k]),
                      rep.exponent_fit});
  }
  return rows;
}

std::string cost_csv(const std::vector<CostRow>& rows) {
  std::string out = "strategy,T,total,quadrature,exponent\n";
  for (const auto& r : rows)
    out += r.strategy + ',' + fmt(r.T) + ',' + fmt(r.total) + ',' + fmt(r.quadrature) + ',' +
           fmt(r.exponent) + '\n';
  return out;
}

// --- dispatch --------------------------------------------------------------

namespace {

int run_command(const std::string& command, ScenarioConfig cfg, const CommandOptions& opt,
                std::ostream& out) {
  if (opt.level) cfg.analysis.level = *opt.level;
  validate(cfg);
  const auto dir = run_directory(cfg, command, opt);
  auto prepare = [&] {
    fs::create_directories(dir);
    write_file(dir / "config.txt", echo_config(cfg));
  };

  if (command == "analyze") {
    const auto r = analyze(cfg);
    const auto j = to_json(r);
    const auto& t = r.thresholds;
    auto show = [&](const char* name, const std::optional<double>& v) {
      out << "  " << name << " = " << (v ? fmt(*v, "%.6g") : std::string("n/a")) << '\n';
    };
    out << "thresholds\n  N = " << fmt(t.n_offspring, "%.6g") << '\n';
    show("zeta", t.zeta);
    show("zeta_c", t.zeta_c);
    show("gamma_c", t.gamma_c);
    show("gamma_0", t.gamma_0);
    show("gamma_0 (self-consistent)", t.gamma_0_self_consistent);
    out << "  regime = " << sit::to_string(t.regime) << '\n' << "equilibria\n";
    auto eq = [&](const char* name, const sit::Equilibrium& e) {
      out << "  " << name << ": E=" << fmt(e.state.E, "%.6g") << " M=" << fmt(e.state.M, "%.6g")
          << " F=" << fmt(e.state.F, "%.6g") << "  " << sit::to_string(e.stability) << '\n';
    };
    eq("extinction", r.equilibria.extinction);
    if (r.equilibria.middle) eq("middle", *r.equilibria.middle);
    if (r.equilibria.upper) eq("upper", *r.equilibria.upper);
    if (opt.write) {
      prepare();
      write_file(dir / "analysis.json", j.dump(2) + '\n');
      out << "wrote " << (dir / "analysis.json").string() << '\n';
    }
    return kOk;
  }

  if (command == "simulate") {
    const auto rec = simulate(cfg, opt.write ? dir : fs::path());
    const auto& o = rec.outcome;
    out << "outcome: " << sit::to_string(o.kind);
    if (o.speed) out << "  speed=" << fmt(*o.speed, "%.6g");
    out << "\n  s_in=" << fmt(o.s_in, "%.3e") << " s_out=" << fmt(o.s_out, "%.3e")
        << " global_sup=" << fmt(o.global_sup, "%.3e") << " steps=" << rec.steps
        << " dt=" << fmt(rec.dt, "%.4g") << " clamps=" << rec.clamps
        << " wall=" << fmt(rec.wall_time, "%.2f") << "s\n";
    for (const auto& d : o.diagnostics) out << "  " << d << '\n';
    if (opt.write) out << "wrote " << dir.string() << '\n';
    return kOk;
  }

  if (command == "verify") {
    const auto groups = verify(cfg, opt.which);
    bool ok = true;
    for (const auto& [name, s] : groups) {
      print_summary(out, name, s);
      ok = ok && s.passed();
    }
    if (opt.write) {
      prepare();
      write_file(dir / "verify.json", to_json(groups).dump(2) + '\n');
      out << "wrote " << (dir / "verify.json").string() << '\n';
    }
    return ok ? kOk : kVerifyFailure;
  }

  if (command == "sweep") {
    if (opt.axis.empty()) throw sit::ConfigError("sweep: --axis is required");
    const auto rows = sweep(cfg, opt.axis, opt.values, opt.workers);
    const auto csv = sweep_csv(rows, opt.axis);
    out << csv;
    if (opt.write) {
      prepare();
      write_file(dir / "sweep.csv", csv);
      out << "wrote " << (dir / "sweep.csv").string() << '\n';
    }
    const bool failed = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.error.empty(); });
    return failed ? kSolverError : kOk;
  }

  if (command == "cost") {
    const auto rows = cost_table(cfg);
    const auto csv = cost_csv(rows);
    out << csv;
    if (opt.write) {
      prepare();
      write_file(dir / "cost.csv", csv);
      out << "wrote " << (dir / "cost.csv").string() << '\n';
    }
    return kOk;
  }

  throw sit::ConfigError("unknown command '" + command + "'");
}

}  // namespace

int dispatch(const std::string& command, const ScenarioConfig& cfg, const CommandOptions& opt,
             std::ostream& out, std::ostream& err) {
  try {
    return run_command(command, cfg, opt, out);
  } catch (const sit::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const sit::DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolverError;
  }
}

}  // namespace sitharness

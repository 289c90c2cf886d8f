#include "sitharness/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sit/equilibria.hpp"
#include "sit/errors.hpp"

namespace sitharness {

namespace {

template <class C, class Fn>
void visit_fields(C& c, Fn&& f) {
  f("model.b", c.model.b);
  f("model.nu_E", c.model.nu_E);
  f("model.mu_E", c.model.mu_E);
  f("model.mu_M", c.model.mu_M);
  f("model.mu_F", c.model.mu_F);
  f("model.mu_s", c.model.mu_s);
  f("model.rho", c.model.rho);
  f("model.K", c.model.K);
  f("model.K_amplitude", c.model.K_amplitude);
  f("model.K_wavelength", c.model.K_wavelength);
  f("model.D", c.model.D);
  f("model.gamma", c.model.gamma);
  f("model.gamma_s", c.model.gamma_s);
  f("model.gamma_kind", c.model.gamma_kind);
  f("grid.geometry", c.grid.geometry);
  f("grid.x_min", c.grid.x_min);
  f("grid.x_max", c.grid.x_max);
  f("grid.n", c.grid.n);
  f("schedule.kind", c.schedule.kind);
  f("schedule.Lambda_bar", c.schedule.Lambda_bar);
  f("schedule.R1", c.schedule.R1);
  f("schedule.R2", c.schedule.R2);
  f("schedule.c", c.schedule.c);
  f("schedule.eta", c.schedule.eta);
  f("schedule.r_in", c.schedule.r_in);
  f("schedule.r_out", c.schedule.r_out);
  f("initial.kind", c.initial.kind);
  f("initial.position", c.initial.position);
  f("initial.fraction", c.initial.fraction);
  f("initial.R0_0", c.initial.R0_0);
  f("initial.R0_1", c.initial.R0_1);
  f("initial.u0", c.initial.u0);
  f("initial.C0", c.initial.C0);
  f("run.t_end", c.run.t_end);
  f("run.dt", c.run.dt);
  f("run.snapshot_every", c.run.snapshot_every);
  f("run.csv_every", c.run.csv_every);
  f("run.boundary", c.run.boundary);
  f("analysis.level", c.analysis.level);
  f("analysis.carpet_probes", c.analysis.carpet_probes);
  f("analysis.c_under", c.analysis.c_under);
  f("analysis.c_over", c.analysis.c_over);
  f("analysis.tol_in", c.analysis.tol_in);
  f("analysis.tol_out", c.analysis.tol_out);
  f("analysis.positivity_exterior", c.analysis.positivity_exterior);
  f("verify.c", c.verify.c);
  f("verify.r1", c.verify.r1);
  f("verify.mu", c.verify.mu);
  f("verify.eps", c.verify.eps);
  f("verify.u0", c.verify.u0);
  f("verify.C1", c.verify.C1);
  f("verify.C2", c.verify.C2);
  f("verify.t_check", c.verify.t_check);
  f("verify.inner_margin", c.verify.inner_margin);
  f("verify.outer_margin", c.verify.outer_margin);
  f("verify.max_attempts", c.verify.max_attempts);
  f("verify.tail_eta", c.verify.tail_eta);
  f("cost.Lambda_bar", c.cost.Lambda_bar);
  f("cost.c", c.cost.c);
  f("cost.r", c.cost.r);
  f("cost.r1", c.cost.r1);
  f("cost.r2", c.cost.r2);
  f("cost.eta", c.cost.eta);
  f("cost.T", c.cost.T);
  f("output.dir", c.output_dir);
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  auto a = s.find_first_not_of(ws);
  if (a == std::string_view::npos) return {};
  auto b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

void parse_into(double& out, std::string_view key, std::string_view v) {
  double x = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    throw sit::ConfigError(std::string(key) + ": expected a finite number, got '" +
                           std::string(v) + "'");
  out = x;
}

void parse_into(std::size_t& out, std::string_view key, std::string_view v) {
  std::size_t x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw sit::ConfigError(std::string(key) + ": expected a non-negative integer, got '" +
                           std::string(v) + "'");
  out = x;
}

void parse_into(bool& out, std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") {
    out = true;
  } else if (v == "false" || v == "0") {
    out = false;
  } else {
    throw sit::ConfigError(std::string(key) + ": expected true or false, got '" +
                           std::string(v) + "'");
  }
}

void parse_into(std::string& out, std::string_view, std::string_view v) { out = std::string(v); }

// Shortest text that parses back to the same double.
std::string format(double x) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}
std::string format(std::size_t x) { return std::to_string(x); }
std::string format(bool x) { return x ? "true" : "false"; }
std::string format(const std::string& x) { return x; }

template <class T>
bool one_of(const T& v, std::initializer_list<const char*> allowed) {
  for (auto a : allowed)
    if (v == a) return true;
  return false;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw sit::ConfigError(what);
}

}  // namespace

void set_value(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  bool found = false;
  value = trim(value);
  visit_fields(cfg, [&](std::string_view k, auto& field) {
    if (k != key) return;
    parse_into(field, key, value);
    found = true;
  });
  if (!found) throw sit::ConfigError("unknown key '" + std::string(key) + "'");
}

std::string get_value(const ScenarioConfig& cfg, std::string_view key) {
  std::string out;
  bool found = false;
  visit_fields(cfg, [&](std::string_view k, const auto& field) {
    if (k != key) return;
    out = format(field);
    found = true;
  });
  if (!found) throw sit::ConfigError("unknown key '" + std::string(key) + "'");
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  ScenarioConfig c;
  visit_fields(c, [&](std::string_view k, auto&) { keys.emplace_back(k); });
  return keys;
}

ScenarioConfig parse_config(std::string_view text, ScenarioConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw sit::ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    auto key = trim(line.substr(0, eq));
    try {
      set_value(base, key, line.substr(eq + 1));
    } catch (const sit::ConfigError& e) {
      throw sit::ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ScenarioConfig load_config(const std::string& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw sit::ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string echo_config(const ScenarioConfig& cfg) {
  std::string out;
  std::string section;
  visit_fields(cfg, [&](std::string_view k, const auto& field) {
    auto s = std::string(k.substr(0, k.find('.')));
    if (s != section) {
      if (!section.empty()) out += '\n';
      section = s;
    }
    out += std::string(k) + " = " + format(field) + '\n';
  });
  return out;
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
  auto c = cfg;
  c.output_dir.clear();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : echo_config(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

sit::ModelParams to_params(const ScenarioConfig& cfg) {
  const auto& m = cfg.model;
  sit::ModelParams p;
  p.b = m.b;
  p.nu_E = m.nu_E;
  p.mu_E = m.mu_E;
  p.mu_M = m.mu_M;
  p.mu_F = m.mu_F;
  p.mu_s = m.mu_s;
  p.rho = m.rho;
  p.K = {m.K, m.K_amplitude, m.K_wavelength};
  p.D = m.D;
  p.gamma_s = m.gamma_s;
  if (m.gamma_kind == "monostable")
    p.gamma_kind = sit::Monostable{};
  else
    p.gamma_kind = sit::Bistable{m.gamma};
  return p;
}

void validate(const ScenarioConfig& cfg) {
  require(one_of(cfg.model.gamma_kind, {"bistable", "monostable"}),
          "model.gamma_kind: expected bistable or monostable");
  try {
    to_params(cfg).validate();
  } catch (const sit::DomainError& e) {
    throw sit::ConfigError(std::string("model: ") + e.what());
  }

  const auto& g = cfg.grid;
  require(one_of(g.geometry, {"cartesian", "radial"}), "grid.geometry: expected cartesian or radial");
  require(g.n >= 3, "grid.n: need at least 3 nodes");
  require(g.x_max > 0.0, "grid.x_max: must be positive");
  if (g.geometry == "cartesian") require(g.x_min < g.x_max, "grid.x_min: must be below grid.x_max");

  const auto& s = cfg.schedule;
  require(one_of(s.kind, {"none", "annulus", "annulus-tail", "fixed-region"}),
          "schedule.kind: expected none, annulus, annulus-tail or fixed-region");
  if (s.kind != "none") {
    require(g.geometry == "radial" || s.kind == "fixed-region",
            "schedule.kind: moving releases need grid.geometry = radial");
    try {
      sit::validate_schedule(to_schedule(cfg));
    } catch (const sit::DomainError& e) {
      throw sit::ConfigError(std::string("schedule: ") + e.what());
    }
  }

  const auto& i = cfg.initial;
  require(one_of(i.kind, {"step", "well-prepared", "uniform"}),
          "initial.kind: expected step, well-prepared or uniform");
  if (i.kind == "uniform") require(i.fraction >= 0.0, "initial.fraction: must be non-negative");
  if (i.kind == "well-prepared") {
    require(g.geometry == "radial", "initial.kind: well-prepared data needs a radial grid");
    require(i.R0_0 >= 0.0 && i.R0_1 > i.R0_0, "initial.R0_1: need 0 <= R0_0 < R0_1");
    require(i.u0 >= 0.0 && i.u0 < 1.0, "initial.u0: must lie in [0, 1)");
    require(i.C0 >= 1.0, "initial.C0: must be at least 1");
  }

  const auto& r = cfg.run;
  require(r.t_end > 0.0, "run.t_end: must be positive");
  require(r.dt >= 0.0, "run.dt: must be non-negative");
  require(r.snapshot_every > 0.0, "run.snapshot_every: must be positive");
  require(r.csv_every >= 1, "run.csv_every: must be at least 1");
  require(one_of(r.boundary, {"neumann", "dirichlet"}), "run.boundary: expected neumann or dirichlet");

  const auto& a = cfg.analysis;
  require(a.level >= 0.0, "analysis.level: must be non-negative");
  require(a.tol_in > 0.0 && a.tol_out > 0.0, "analysis.tol_in: tolerances must be positive");
  if (a.carpet_probes) {
    require(s.kind != "none" && s.c > 0.0, "analysis.carpet_probes: needs a moving release");
    require(a.c_under > 0.0 && a.c_under < s.c && a.c_over > s.c,
            "analysis.c_under: need 0 < c_under < schedule.c < c_over");
  }

  const auto& v = cfg.verify;
  require(v.c > 0.0 && v.r1 > 0.0, "verify.c: speed and radius must be positive");
  require(v.mu >= 0.0 && v.eps >= 0.0 && v.C1 >= 0.0 && v.C2 >= 0.0,
          "verify.mu: constants must be non-negative");
  require(v.u0 >= 0.0 && v.u0 < 1.0, "verify.u0: must lie in [0, 1)");
  require(v.t_check > 0.0, "verify.t_check: must be positive");
  require(v.inner_margin > 0.0 && v.inner_margin < v.r1,
          "verify.inner_margin: need 0 < inner_margin < verify.r1");
  require(v.outer_margin > 0.0, "verify.outer_margin: must be positive");
  require(v.max_attempts >= 1, "verify.max_attempts: must be at least 1");
  require(v.tail_eta > 0.0, "verify.tail_eta: must be positive");

  const auto& c = cfg.cost;
  require(c.Lambda_bar >= 0.0 && c.c > 0.0 && c.r >= 0.0 && c.r1 >= 0.0 && c.r2 > c.r1 &&
              c.eta > 0.0,
          "cost: need Lambda_bar >= 0, c > 0, r >= 0, 0 <= r1 < r2, eta > 0");
  require(!cost_times(cfg).empty(), "cost.T: empty time grid");
}

sit::Grid to_grid(const ScenarioConfig& cfg) {
  if (cfg.grid.geometry == "radial") return sit::Grid::radial(cfg.grid.x_max, cfg.grid.n);
  return sit::Grid::cartesian(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.n);
}

sit::ReleaseSchedule to_schedule(const ScenarioConfig& cfg) {
  const auto& s = cfg.schedule;
  if (s.kind == "annulus") return sit::AnnulusRelease{s.Lambda_bar, s.R1, s.R2, s.c};
  if (s.kind == "annulus-tail")
    return sit::AnnulusWithTailRelease{s.Lambda_bar, s.R1, s.R2, s.c, s.eta};
  if (s.kind == "fixed-region") return sit::FixedRegionRelease{s.Lambda_bar, s.r_in, s.r_out};
  return sit::NoRelease{};
}

sit::StatePoint upper_state(const sit::ModelParams& p) {
  auto eq = sit::solve_equilibria(p.with_capacity(p.K.base));
  if (!eq.upper) throw sit::ConfigError("model: no positive equilibrium for these parameters");
  return eq.upper->state;
}

sit::Scenario to_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  sit::Scenario sc;
  sc.params = to_params(cfg);
  sc.grid = to_grid(cfg);
  sc.schedule = to_schedule(cfg);
  sc.t_end = cfg.run.t_end;
  sc.dt = cfg.run.dt;
  sc.snapshot_every = cfg.run.snapshot_every;
  sc.options.outer =
      cfg.run.boundary == "dirichlet" ? sit::OuterBoundary::Dirichlet : sit::OuterBoundary::Neumann;

  const auto& i = cfg.initial;
  sit::InitialData data;
  if (i.kind == "step") {
    data = sit::StepInitial{i.position, upper_state(sc.params), {}};
  } else if (i.kind == "uniform") {
    auto u = upper_state(sc.params);
    data = sit::UniformInitial{{u.E * i.fraction, u.M * i.fraction, u.F * i.fraction, 0.0}};
  } else {
    data = sit::WellPreparedInitial{i.R0_0, i.R0_1, i.u0, i.C0, cfg.schedule.Lambda_bar};
  }
  try {
    sc.initial = sit::make_initial(data, sc.grid, sc.params);
  } catch (const sit::DomainError& e) {
    throw sit::ConfigError(std::string("initial: ") + e.what());
  }
  return sc;
}

sit::ClassifyOptions to_classify_options(const ScenarioConfig& cfg) {
  sit::ClassifyOptions o;
  const auto& a = cfg.analysis;
  if (a.carpet_probes) o.c = cfg.schedule.c;
  o.c_under = a.c_under;
  o.c_over = a.c_over;
  o.tol_in = a.tol_in;
  o.tol_out = a.tol_out;
  o.positivity_exterior = a.positivity_exterior;
  if (a.level > 0.0) o.level_fraction = a.level / upper_state(to_params(cfg)).F;
  return o;
}

sit::BundleRequest to_bundle_request(const ScenarioConfig& cfg) {
  const auto& v = cfg.verify;
  sit::BundleRequest r;
  r.c = v.c;
  r.r1 = v.r1;
  r.C0 = cfg.initial.C0;
  r.t_check = v.t_check;
  if (v.mu > 0.0) r.mu = v.mu;
  if (v.eps > 0.0) r.eps = v.eps;
  if (v.u0 > 0.0) r.u0 = v.u0;
  if (v.C1 > 0.0) r.C1 = v.C1;
  if (v.C2 > 0.0) r.C2 = v.C2;
  return r;
}

int search_attempts(const ScenarioConfig& cfg) {
  const auto& v = cfg.verify;
  const bool fixed = v.mu > 0.0 || v.eps > 0.0 || v.u0 > 0.0 || v.C1 > 0.0 || v.C2 > 0.0;
  return fixed ? 1 : static_cast<int>(v.max_attempts);
}

std::vector<double> cost_times(const ScenarioConfig& cfg) {
  std::vector<double> T;
  std::string_view s = cfg.cost.T;
  while (!s.empty()) {
    auto comma = s.find(',');
    auto item = trim(s.substr(0, comma));
    s = comma == std::string_view::npos ? std::string_view{} : s.substr(comma + 1);
    if (item.empty()) continue;
    double t = 0.0;
    parse_into(t, "cost.T", item);
    if (t <= 0.0) throw sit::ConfigError("cost.T: times must be positive");
    T.push_back(t);
  }
  return T;
}

std::vector<sit::CostSchedule> cost_schedules(const ScenarioConfig& cfg) {
  const auto& c = cfg.cost;
  return {sit::NaiveDiscRelease{c.Lambda_bar, c.r, c.c},
          sit::AnnulusRelease{c.Lambda_bar, c.r1, c.r2, c.c},
          sit::AnnulusWithTailRelease{c.Lambda_bar, c.r1, c.r2, c.c, c.eta}};
}

}  // namespace sitharness

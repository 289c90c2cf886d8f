// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sit/equilibria.hpp"
#include "sit/profiles.hpp"
#include "sit/solver.hpp"
#include "sit/sterile.hpp"
#include "sit/verify.hpp"
#include "sit/waves.hpp"
#include "sitharness/commands.hpp"
#include "sitharness/presets.hpp"

using namespace sit;
using namespace sitharness;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

char buf[1024];

template <class... A>
std::string f(const char* fmt, A... a) {
  std::snprintf(buf, sizeof buf, fmt, a...);
  return buf;
}

bool within(double v, double target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }

Result thresholds_check() {
  const auto t = thresholds(ModelParams::reference(0.5));
  const bool ok = t.gamma_c && t.gamma_0 && within(*t.gamma_c, 2.351e-3, 0.02) &&
                  within(*t.gamma_0, 4.3e-2, 0.05);
  return {ok, f("gamma_c=%.5g gamma_0=%.5g", t.gamma_c.value_or(NAN), t.gamma_0.value_or(NAN))};
}

Result equilibria_check() {
  double worst = 0.0;
  double F[2] = {NAN, NAN};
  int k = 0;
  for (double g : {0.5, 0.01}) {
    const auto p = ModelParams::reference(g);
    const auto eq = solve_equilibria(p);
    if (!eq.upper || !eq.middle) return {false, f("missing equilibrium at gamma=%g", g)};
    F[k++] = eq.upper->state.F;
    const double N = offspring_number(p);
    for (const auto* e : {&*eq.middle, &*eq.upper}) {
      const auto& s = e->state;
      const double Er = p.b * s.F / (p.b * s.F / p.K.base + p.mu_E + p.nu_E);
      const double Mr = (1 - p.rho) * p.nu_E * s.E / p.mu_M;
      const double rhs = p.mu_F * s.F / (p.rho * p.nu_E * p.K.base) + 1.0 / N;
      worst = std::max({worst, std::abs(s.E - Er) / s.E, std::abs(s.M - Mr) / s.M,
                        std::abs(gamma_fn(p.gamma_kind, phi0(p, s.F)) - rhs) / rhs});
    }
  }
  const bool ok = within(F[0], 77.4, 0.005) && within(F[1], 30.12, 0.005) && worst < 1e-8;
  return {ok, f("F*(0.5)=%.4f F*(0.01)=%.4f worst residual=%.1e", F[0], F[1], worst)};
}

Result stability_check() {
  auto mono = ModelParams::reference();
  mono.gamma_kind = Monostable{};
  const auto m = solve_equilibria(mono);
  bool ok = m.extinction.stability == Stability::Unstable && m.upper &&
            m.upper->stability == Stability::Stable;
  std::string d = ok ? "monostable ok" : "monostable wrong";
  for (double g : {0.003, 0.01, 0.05, 0.5, 2.0}) {
    const auto b = solve_equilibria(ModelParams::reference(g));
    const bool good = b.extinction.stability == Stability::Stable && b.middle &&
                      b.middle->stability == Stability::Unstable && b.upper &&
                      b.upper->stability == Stability::Stable;
    ok = ok && good;
    if (!good) d += f("; gamma=%g wrong", g);
  }
  return {ok, d + ", bistable gammas {0.003,0.01,0.05,0.5,2}"};
}

Result figure1_check() {
  auto c = preset("fig1");
  const auto a = simulate(c, {});
  auto fine = c;
  fine.grid.n = 2 * (c.grid.n - 1) + 1;
  const auto sc = to_scenario(c);
  fine.run.dt = 0.5 * resolve_steps(sc).second;
  const auto b = simulate(fine, {});
  const double sa = a.outcome.speed.value_or(NAN), sb = b.outcome.speed.value_or(NAN);
  const bool ok = a.outcome.kind == OutcomeKind::Invasion && sa > 0.0 &&
                  b.outcome.kind == OutcomeKind::Invasion && within(sb, sa, 0.10);
  return {ok, f("%s speed=%.5f, refined speed=%.5f (%.2f%%)",
                std::string(to_string(a.outcome.kind)).c_str(), sa, sb, 100 * (sb - sa) / sa)};
}

Result figure2_check() {
  const auto l = simulate(preset("fig2-left"), {});
  const auto r = simulate(preset("fig2-right"), {});
  const bool ok = l.outcome.kind == OutcomeKind::Invasion && r.outcome.kind == OutcomeKind::Extinction &&
                  r.outcome.global_sup < 1e-3;
  return {ok, f("left: %s speed=%.4f; right: %s global sup=%.3g",
                std::string(to_string(l.outcome.kind)).c_str(), l.outcome.speed.value_or(NAN),
                std::string(to_string(r.outcome.kind)).c_str(), r.outcome.global_sup)};
}

Result monotonicity_check() {
  const auto base = preset("fig1");
  auto make = [&](double g) {
    auto c = base;
    c.model.gamma = g;
    return to_scenario(c);
  };
  const auto rep = speed_monotonicity(make, {0.05, 0.1, 0.5, 1.0}, 4);
  std::string d;
  bool all = true;
  for (const auto& r : rep.rows) {
    d += f("%s%g:%.4f", d.empty() ? "" : " ", r.gamma, r.speed);
    all = all && !r.excluded;
  }
  return {rep.nondecreasing && all, "speeds " + d};
}

Result carpet_check() {
  const auto c = preset("carpet");
  const auto full = simulate(c, {});
  auto weak = c;
  weak.schedule.Lambda_bar = c.schedule.Lambda_bar / 100.0;
  const auto w = simulate(weak, {});
  const auto& o = full.outcome;
  const bool carpet = o.kind == OutcomeKind::Carpet && o.s_in < 1e-3 && o.s_out < 1e-2;
  const bool flips = w.outcome.kind == OutcomeKind::Invasion;
  return {carpet && flips,
          f("Lambda=%.4g: %s s_in=%.2e s_out=%.2e speed=%.4f; Lambda/100: %s s_in=%.2e",
            c.schedule.Lambda_bar, std::string(to_string(o.kind)).c_str(), o.s_in, o.s_out,
            o.speed.value_or(NAN), std::string(to_string(w.outcome.kind)).c_str(), w.outcome.s_in)};
}

Result comparison_check() {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_order = 0.0, worst_region = 0.0;
  std::size_t clamps = 0;
  for (int pair = 0; pair < 20; ++pair) {
    auto p = ModelParams::reference(pair % 4 == 0 ? 0.01 : 0.05 + u(rng));
    if (pair % 5 == 0) p.gamma_kind = Monostable{};
    if (pair % 3 == 0) p.K.amplitude = 50.0 * u(rng);
    const auto g = pair % 2 ? Grid::radial(30, 301) : Grid::cartesian(-30, 30, 301);
    ReleaseSchedule rel = NoRelease{};
    if (pair % 2) rel = AnnulusRelease{200.0 * u(rng), 3.0, 6.0, 0.1};
    else if (pair % 4 == 2) rel = FixedRegionRelease{200.0 * u(rng), 0.0, 5.0};
    SimState lo(g.size()), hi(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double K = p.K.at(g.x[i]);
      hi.E[i] = K * u(rng);
      hi.M[i] = 80.0 * u(rng);
      hi.F[i] = 100.0 * u(rng);
      hi.Ms[i] = 300.0 * u(rng);
      lo.E[i] = hi.E[i] * u(rng);
      lo.M[i] = hi.M[i] * u(rng);
      lo.F[i] = hi.F[i] * u(rng);
      lo.Ms[i] = hi.Ms[i] + 300.0 * u(rng);
    }
    const double dt = 0.9 * admissible_dt(p, f_bound(p, 100.0));
    Stepper a(p, g, rel, dt), b(p, g, rel, dt);
    const int steps = int(40.0 / dt);
    for (int k = 0; k < steps; ++k) {
      a.step(lo);
      b.step(hi);
      for (std::size_t i = 0; i < g.size(); ++i) {
        worst_order = std::max({worst_order, lo.E[i] - hi.E[i], lo.M[i] - hi.M[i], lo.F[i] - hi.F[i],
                                hi.Ms[i] - lo.Ms[i]});
        const double K = p.K.at(g.x[i]);
        for (const auto* s : {&lo, &hi}) {
          worst_region = std::max({worst_region, -s->E[i], s->E[i] - K, -s->M[i], -s->F[i], -s->Ms[i]});
        }
      }
    }
    clamps += a.clamps() + b.clamps();
  }
  const bool ok = worst_order <= 1e-9 && worst_region <= 0.0;
  return {ok, f("20 pairs, worst order violation=%.2e, worst region excursion=%.2e, clamps=%zu",
                worst_order, worst_region, clamps)};
}

Result certificates_check() {
  std::string d;
  bool ok = true;

  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    std::vector<double> jumps(5), heights(5);
    double h = 0.0;
    for (int j = 0; j < 5; ++j) {
      jumps[j] = 10.0 * u(rng);
      h += u(rng);
      heights[j] = h;
    }
    std::sort(jumps.begin(), jumps.end());
    auto psi = [&](double x) {
      double v = 0.0;
      for (int j = 0; j < 5; ++j)
        if (x >= jumps[j]) v = heights[j];
      return v;
    };
    const double mu = 0.05 + u(rng);
    const auto sol = lemma1_solve(mu, psi, 0.005, 15.0);
    for (std::size_t i = 0; i < sol.grid.size(); ++i)
      worst = std::max(worst, monotone_lower_bound(mu, psi(sol.grid[i]), sol.grid[i]) - sol.values[i]);
  }
  const bool a = worst <= 1e-9;
  d += f("(a) %s", a ? "ok" : "FAIL");

  ScenarioConfig cfg;
  const auto groups = verify(cfg, "all");
  bool b = false, c = false, dd = false;
  for (const auto& [name, s] : groups) {
    if (name == "subsolution") b = s.passed();
    if (name == "supersolution") c = s.passed();
    if (name == "sterile-bounds") {
      bool c1 = false;
      for (const auto& r : s.reports)
        if (r.name.find("C1 matching") != std::string::npos) c1 = r.passed && std::abs(r.worst) <= 1e-10;
      dd = s.passed() && c1;
    }
  }
  d += f(" (b) %s (c) %s (d) %s", b ? "ok" : "FAIL", c ? "ok" : "FAIL", dd ? "ok" : "FAIL");
  ok = a && b && c && dd;
  if (!ok)
    for (const auto& [name, s] : groups)
      for (const auto& fl : s.failures()) d += "; " + name + ": " + fl;
  return {ok, d};
}

Result cost_check() {
  const std::vector<double> T{10, 100, 1000, 10000};
  const NaiveDiscRelease naive{1.0, 1.0, 1.0};
  const AnnulusRelease ring{1.0, 1.0, 2.0, 1.0};
  const auto n = sterile_cost(naive, T), a = sterile_cost(ring, T);
  double worst = 0.0;
  for (std::size_t k = 0; k < T.size(); ++k) {
    worst = std::max(worst, std::abs(sterile_cost_quadrature(naive, T[k]) / n.total[k] - 1.0));
    worst = std::max(worst, std::abs(sterile_cost_quadrature(ring, T[k]) / a.total[k] - 1.0));
  }
  const bool ok = std::abs(n.exponent_fit - 3.0) <= 0.1 && std::abs(a.exponent_fit - 2.0) <= 0.1 &&
                  worst <= 1e-3;
  return {ok, f("naive exponent=%.4f annulus exponent=%.4f quadrature mismatch=%.1e", n.exponent_fit,
                a.exponent_fit, worst)};
}

Result hetero_check() {
  const auto r = simulate(preset("carpet-hetero"), {});
  const auto& o = r.outcome;
  const bool ok = o.kind == OutcomeKind::Carpet && o.s_in < 1e-3 && o.exterior_min > 1e-3;
  return {ok, f("%s s_in=%.2e exterior min=%.3f", std::string(to_string(o.kind)).c_str(), o.s_in,
                o.exterior_min)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;  // seconds
    std::function<Result()> run;
  };
  const std::vector<Criterion> all = {
      {1, "thresholds", 5.0, thresholds_check},
      {2, "equilibria", 1.0, equilibria_check},
      {3, "stability classification", 1.0, stability_check},
      {4, "invasion front and refinement", 60.0, figure1_check},
      {5, "invasion vs natural extinction", 120.0, figure2_check},
      {6, "speed monotone in gamma", 300.0, monotonicity_check},
      {7, "moving release barrier", 300.0, carpet_check},
      {8, "comparison principle", 120.0, comparison_check},
      {9, "analytic certificates", 60.0, certificates_check},
      {10, "release cost scaling", 1.0, cost_check},
      {11, "heterogeneous capacity carpet", 300.0, hetero_check},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget;
    const bool pass = r.pass && in_time;
    if (!pass) ++failed;
    std::printf("criterion %2d %s  %s: %s [%.2fs%s]\n", c.id, pass ? "PASS" : "FAIL", c.name,
                r.detail.c_str(), secs, in_time ? "" : " over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}

#include "sit/waves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "sit/equilibria.hpp"
#include "sit/errors.hpp"
#include "sit/numerics.hpp"

namespace sit {

std::optional<FrontCrossing> front_position(const std::vector<double>& field,
                                            const std::vector<double>& x, double level) {
  if (field.size() != x.size() || field.size() < 2) throw DomainError("front_position: size mismatch");
  std::optional<FrontCrossing> out;
  int count = 0;
  for (std::size_t i = field.size() - 1; i-- > 0;) {
    const double a = field[i] - level;
    const double b = field[i + 1] - level;
    if ((a >= 0.0) == (b >= 0.0)) continue;
    ++count;
    if (!out) {
      const double w = a / (a - b);
      out = FrontCrossing{x[i] + w * (x[i + 1] - x[i]), 0, b > a};
    }
  }
  if (out) out->crossings = count;
  return out;
}

void FrontTrace::push(double time, const FrontCrossing& c) {
  if (!t.empty() && time <= t.back()) throw DomainError("front trace: times must increase");
  t.push_back(time);
  position.push_back(c.position);
  crossings.push_back(c.crossings);
  rising.push_back(c.rising);
}

FrontTrace trace_front(const Trajectory& tr, const Grid& g, double level) {
  FrontTrace trace;
  for (const auto& s : tr.snapshots) {
    if (const auto c = front_position(s.F, g.x, level)) trace.push(s.t, *c);
  }
  return trace;
}

SpeedEstimate estimate_speed(const FrontTrace& trace, double window) {
  SpeedEstimate est;
  const std::size_t n = trace.size();
  const std::size_t start = n / 5;
  std::vector<double> t, y;
  const double t_last = n ? trace.t.back() : 0.0;
  for (std::size_t i = start; i < n; ++i) {
    if (window > 0.0 && trace.t[i] < t_last - window) continue;
    t.push_back(trace.t[i]);
    y.push_back(trace.position[i]);
  }
  est.samples = t.size();
  if (t.size() < 10) {
    est.note = "fewer than 10 samples in the fitting window";
    return est;
  }
  const auto fit = fit_line(t, y);
  est.determinate = true;
  est.speed = fit.slope;
  est.rms = fit.rms;
  return est;
}

std::string_view to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Invasion: return "Invasion";
    case OutcomeKind::Extinction: return "Extinction";
    case OutcomeKind::Carpet: return "Carpet";
    case OutcomeKind::Indeterminate: return "Indeterminate";
  }
  return "?";
}

std::vector<StatePoint> reference_states(const ModelParams& p, const Grid& g) {
  std::map<double, StatePoint> cache;
  std::vector<StatePoint> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double k = p.K.at(g.x[i]);
    auto it = cache.find(k);
    if (it == cache.end()) {
      const auto eq = solve_equilibria(p.with_capacity(k));
      if (!eq.upper) throw DomainError("reference_states: no positive equilibrium");
      it = cache.emplace(k, eq.upper->state).first;
    }
    out[i] = it->second;
  }
  return out;
}

namespace {

double relative_norm(const SimState& s, std::size_t i, const StatePoint& ref) {
  return std::max({s.E[i] / ref.E, s.M[i] / ref.M, s.F[i] / ref.F});
}

double relative_distance(const SimState& s, std::size_t i, const StatePoint& ref) {
  return std::max({std::abs(s.E[i] - ref.E) / ref.E, std::abs(s.M[i] - ref.M) / ref.M,
                   std::abs(s.F[i] - ref.F) / ref.F});
}

double relative_min(const SimState& s, std::size_t i, const StatePoint& ref) {
  return std::min({s.E[i] / ref.E, s.M[i] / ref.M, s.F[i] / ref.F});
}

std::vector<double> node_weights(const Grid& g) {
  std::vector<double> w(g.size(), g.dx);
  if (g.radial()) {
    for (std::size_t i = 0; i < g.size(); ++i) w[i] = std::max(g.x[i], g.dx / 8.0) * g.dx;
  }
  w.front() *= 0.5;
  w.back() *= 0.5;
  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;
  return w;
}

double occupancy(const SimState& s, const std::vector<StatePoint>& ref,
                 const std::vector<double>& w, double fraction) {
  double occ = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.F[i] >= fraction * ref[i].F) occ += w[i];
  }
  return occ;
}

}  // namespace

Outcome classify(const Trajectory& tr, const Grid& g, const ModelParams& p,
                 const ClassifyOptions& opt) {
  if (tr.snapshots.empty()) throw DomainError("classify: empty trajectory");
  Outcome out;
  const auto ref = reference_states(p, g);
  const auto w = node_weights(g);
  const SimState& first = tr.snapshots.front();
  const SimState& last = tr.snapshots.back();
  const double T = last.t;
  out.probe_time = T;

  for (std::size_t i = 0; i < last.size(); ++i) {
    out.global_sup = std::max(out.global_sup, relative_norm(last, i, ref[i]));
  }
  out.occupancy_initial = occupancy(first, ref, w, opt.level_fraction);
  out.occupancy_final = occupancy(last, ref, w, opt.level_fraction);

  double level = 0.0;
  for (const auto& r : ref) level = std::max(level, r.F);
  level *= opt.level_fraction;
  out.trace = trace_front(tr, g, level);
  out.speed_estimate = estimate_speed(out.trace);

  if (out.global_sup < opt.tol_in) {
    out.kind = OutcomeKind::Extinction;
    return out;
  }

  if (opt.c) {
    if (!(opt.c_under < *opt.c && *opt.c < opt.c_over)) {
      throw DomainError("classify: need c_under < c < c_over");
    }
    const double x_max = std::max(std::abs(g.x.front()), std::abs(g.x.back()));
    if (opt.c_over * T >= x_max) {
      out.diagnostics.push_back("domain too small: exterior probe |x| > c_over t leaves the grid");
      out.kind = OutcomeKind::Indeterminate;
      return out;
    }
    out.s_out = 0.0;
    out.exterior_min = std::numeric_limits<double>::infinity();
    out.s_in = 0.0;
    for (const auto& s : tr.snapshots) {
      if (s.t < 0.75 * T) continue;
      double inf_dist = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = std::abs(g.x[i]);
        if (r < opt.c_under * s.t) out.s_in = std::max(out.s_in, relative_norm(s, i, ref[i]));
        if (r > opt.c_over * s.t) {
          const double d = relative_distance(s, i, ref[i]);
          inf_dist = std::min(inf_dist, d);
          out.s_out_sup = std::max(out.s_out_sup, d);
          out.exterior_min = std::min(out.exterior_min, relative_min(s, i, ref[i]));
        }
      }
      out.s_out = std::max(out.s_out, inf_dist);
    }
    const bool exterior_ok =
        opt.positivity_exterior ? out.exterior_min > opt.tol_in : out.s_out < opt.tol_out;
    if (out.s_in < opt.tol_in && exterior_ok) {
      out.kind = OutcomeKind::Carpet;
      if (out.speed_estimate.determinate) out.speed = out.speed_estimate.speed;
      return out;
    }
  }

  // The population invades when it occupies more ground, or refills the
  // probed interior. A rising front has the population outside, so its
  // invasion speed is the inward motion.
  const double gain = out.occupancy_final - out.occupancy_initial;
  if (gain > 0.005 || (opt.c && out.s_in >= 0.5)) {
    out.kind = OutcomeKind::Invasion;
    if (out.speed_estimate.determinate) {
      const bool outside = out.trace.rising.back() != 0;
      out.speed = outside ? -out.speed_estimate.speed : out.speed_estimate.speed;
    }
    return out;
  }
  out.diagnostics.push_back("no extinction, carpet or invasion signature");
  out.kind = OutcomeKind::Indeterminate;
  return out;
}

// --- release cost ---------------------------------------------------------

std::string cost_strategy_name(const CostSchedule& s) {
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, NaiveDiscRelease>) return "naive";
        else if constexpr (std::is_same_v<T, AnnulusRelease>) return "annulus";
        else if constexpr (std::is_same_v<T, AnnulusWithTailRelease>) return "annulus-tail";
        else return "fixed-region";
      },
      s);
}

double sterile_cost_total(const CostSchedule& s, double T) {
  if (T < 0.0) throw DomainError("sterile_cost: T must be >= 0");
  constexpr double pi = std::numbers::pi;
  return std::visit(
      [T](const auto& r) -> double {
        using S = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<S, NaiveDiscRelease>) {
          if (r.c == 0.0) return r.Lambda_bar * pi * r.r * r.r * T;
          const double end = r.r + r.c * T;
          return r.Lambda_bar * pi * (end * end * end - r.r * r.r * r.r) / (3.0 * r.c);
        } else if constexpr (std::is_same_v<S, AnnulusRelease>) {
          return r.Lambda_bar * pi * (r.R2 - r.R1) * ((r.R1 + r.R2) * T + r.c * T * T);
        } else if constexpr (std::is_same_v<S, AnnulusWithTailRelease>) {
          const double ring = r.Lambda_bar * pi * (r.R2 - r.R1) * ((r.R1 + r.R2) * T + r.c * T * T);
          const double e = r.eta;
          const double decay = r.c > 0.0
                                   ? std::exp(-e * r.R1) * -std::expm1(-e * r.c * T) / (e * e * e * r.c)
                                   : std::exp(-e * r.R1) * T / (e * e);
          const double tail = (r.R1 * T + 0.5 * r.c * T * T) / e - T / (e * e) + decay;
          return ring + 2.0 * pi * r.Lambda_bar * tail;
        } else {
          return r.Lambda_bar * pi * (r.r_out * r.r_out - r.r_in * r.r_in) * T;
        }
      },
      s);
}

double sterile_cost_quadrature(const CostSchedule& s, double T, int nr, int nt) {
  const auto rate = [&s](double r, double t) -> double {
    if (const auto* n = std::get_if<NaiveDiscRelease>(&s)) {
      return r <= n->r + n->c * t ? n->Lambda_bar : 0.0;
    }
    return std::visit(
        [r, t](const auto& rel) -> double {
          using S = std::decay_t<decltype(rel)>;
          if constexpr (std::is_same_v<S, NaiveDiscRelease>) return 0.0;
          else return release_value(ReleaseSchedule{rel}, r, t);
        },
        s);
  };
  // Pieces of [0, inf) on which the rate is smooth; zero elsewhere. The
  // exponential tail is cut after 40 e-folds.
  const auto pieces = [&s](double t) {
    return std::visit(
        [t](const auto& rel) -> std::vector<std::pair<double, double>> {
          using S = std::decay_t<decltype(rel)>;
          if constexpr (std::is_same_v<S, NaiveDiscRelease>) {
            return {{0.0, rel.r + rel.c * t}};
          } else if constexpr (std::is_same_v<S, FixedRegionRelease>) {
            return {{rel.r_in, rel.r_out}};
          } else if constexpr (std::is_same_v<S, AnnulusRelease>) {
            return {{rel.R1 + rel.c * t, rel.R2 + rel.c * t}};
          } else {
            const double inner = rel.R1 + rel.c * t;
            return {{std::max(0.0, inner - 40.0 / rel.eta), inner}, {inner, rel.R2 + rel.c * t}};
          }
        },
        s);
  };
  const auto slice = [&](double t) {
    double acc = 0.0;
    for (auto [a, b] : pieces(t)) {
      const double h = (b - a) / nr;
      for (int i = 0; i < nr; ++i) {
        const double r = a + (i + 0.5) * h;
        acc += rate(r, t) * 2.0 * std::numbers::pi * r * h;
      }
    }
    return acc;
  };
  return simpson(slice, 0.0, T, nt % 2 ? nt + 1 : nt);
}

CostReport sterile_cost(const CostSchedule& s, const std::vector<double>& T_grid) {
  if (T_grid.empty()) throw DomainError("sterile_cost: empty T grid");
  CostReport rep;
  rep.strategy = cost_strategy_name(s);
  std::vector<double> lx, ly;
  for (const double T : T_grid) {
    if (!(T > 0.0)) throw DomainError("sterile_cost: T must be positive");
    const double total = sterile_cost_total(s, T);
    rep.T.push_back(T);
    rep.total.push_back(total);
    if (total > 0.0) {
      lx.push_back(std::log(T));
      ly.push_back(std::log(total));
    }
  }
  if (lx.size() >= 2) rep.exponent_fit = fit_line(lx, ly).slope;
  return rep;
}

// --- speed monotonicity -----------------------------------------------------

MonotonicityReport speed_monotonicity(const std::function<Scenario(double)>& make_scenario,
                                      std::vector<double> gammas, unsigned workers,
                                      const ClassifyOptions& opt) {
  std::sort(gammas.begin(), gammas.end());
  MonotonicityReport rep;
  rep.rows.resize(gammas.size());
  std::vector<double> slack(gammas.size(), 0.0);
  parallel_for(gammas.size(), workers, [&](std::size_t i) {
    const Scenario sc = make_scenario(gammas[i]);
    const auto tr = run(sc);
    const auto o = classify(tr, sc.grid, sc.params, opt);
    SpeedRow row;
    row.gamma = gammas[i];
    row.kind = o.kind;
    if (o.kind == OutcomeKind::Invasion && o.speed) {
      row.speed = *o.speed;
      row.rms = o.speed_estimate.rms;
    } else {
      row.excluded = true;
    }
    slack[i] = sc.grid.dx / sc.t_end;
    rep.rows[i] = row;
  });
  rep.tolerance = 0.0;
  for (double s : slack) rep.tolerance = std::max(rep.tolerance, s);
  rep.nondecreasing = true;
  const SpeedRow* prev = nullptr;
  for (const auto& row : rep.rows) {
    if (row.excluded) continue;
    if (prev && row.speed < prev->speed - rep.tolerance) rep.nondecreasing = false;
    prev = &row;
  }
  return rep;
}

}  // namespace sit

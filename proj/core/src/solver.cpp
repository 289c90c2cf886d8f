#include "sit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sit/equilibria.hpp"
#include "sit/errors.hpp"

namespace sit {

Grid Grid::cartesian(double x_min, double x_max, std::size_t n) {
  if (n < 3 || !(x_max > x_min)) throw DomainError("grid: need n >= 3 and x_max > x_min");
  Grid g;
  g.geometry = Geometry::Cartesian1D;
  g.dx = (x_max - x_min) / static_cast<double>(n - 1);
  g.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.x[i] = x_min + g.dx * static_cast<double>(i);
  g.x.back() = x_max;
  return g;
}

Grid Grid::radial(double r_max, std::size_t n) {
  if (n < 3 || !(r_max > 0.0)) throw DomainError("grid: need n >= 3 and r_max > 0");
  Grid g;
  g.geometry = Geometry::Radial2D;
  g.dx = r_max / static_cast<double>(n - 1);
  g.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.x[i] = g.dx * static_cast<double>(i);
  g.x.back() = r_max;
  return g;
}

void SimState::set(std::size_t i, const StatePoint& s) {
  E[i] = s.E;
  M[i] = s.M;
  F[i] = s.F;
  Ms[i] = s.Ms;
}

void validate_schedule(const ReleaseSchedule& s) {
  std::visit(
      [](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, AnnulusRelease> || std::is_same_v<T, AnnulusWithTailRelease>) {
          if (r.Lambda_bar < 0.0) throw DomainError("schedule: Lambda_bar must be >= 0");
          if (!(r.R1 > 0.0 && r.R1 < r.R2)) throw DomainError("schedule: need 0 < R1 < R2");
          if (r.c < 0.0) throw DomainError("schedule: c must be >= 0");
          if constexpr (std::is_same_v<T, AnnulusWithTailRelease>) {
            if (!(r.eta > 0.0)) throw DomainError("schedule: eta must be > 0");
          }
        } else if constexpr (std::is_same_v<T, FixedRegionRelease>) {
          if (r.Lambda_bar < 0.0) throw DomainError("schedule: Lambda_bar must be >= 0");
          if (!(r.r_in >= 0.0 && r.r_in < r.r_out)) throw DomainError("schedule: need 0 <= r_in < r_out");
        }
      },
      s);
}

double release_value(const ReleaseSchedule& s, double x, double t) {
  const double r = std::abs(x);
  return std::visit(
      [r, t](const auto& rel) -> double {
        using T = std::decay_t<decltype(rel)>;
        if constexpr (std::is_same_v<T, NoRelease>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, AnnulusRelease>) {
          return (r >= rel.R1 + rel.c * t && r <= rel.R2 + rel.c * t) ? rel.Lambda_bar : 0.0;
        } else if constexpr (std::is_same_v<T, AnnulusWithTailRelease>) {
          const double inner = rel.R1 + rel.c * t;
          if (r < inner) return rel.Lambda_bar * std::exp(rel.eta * (r - inner));
          return r <= rel.R2 + rel.c * t ? rel.Lambda_bar : 0.0;
        } else {
          return (r >= rel.r_in && r <= rel.r_out) ? rel.Lambda_bar : 0.0;
        }
      },
      s);
}

double f_bound(const ModelParams& p, double f0_max) {
  return std::max(f0_max, p.rho * p.nu_E * p.K.max() / p.mu_F);
}

double reaction_rate_bound(const ModelParams& p, double f_max) {
  return std::max({p.b * f_max / p.K.min() + p.mu_E + p.nu_E, p.mu_M, p.mu_F, p.mu_s});
}

double admissible_dt(const ModelParams& p, double f_max) {
  return 0.5 / reaction_rate_bound(p, f_max);
}

Stepper::Stepper(const ModelParams& p, const Grid& g, ReleaseSchedule schedule, double dt,
                 StepperOptions opt)
    : p_(p), g_(g), schedule_(std::move(schedule)), dt_(dt), opt_(opt) {
  p_.validate();
  validate_schedule(schedule_);
  if (!(dt > 0.0)) throw DomainError("stepper: dt must be positive");
  const std::size_t n = g_.size();
  if (n < 3) throw DomainError("stepper: grid needs at least 3 nodes");
  K_.resize(n);
  for (std::size_t i = 0; i < n; ++i) K_[i] = p_.K.at(g_.x[i]);

  // (I - dt D L) with the symmetric ghost node at both ends.
  const double h = g_.dx;
  const double a = dt_ * p_.D / (h * h);
  std::vector<double> sub(n, 0.0), diag(n, 1.0), sup(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double lo = 1.0, hi = 1.0;
    if (g_.radial() && i > 0) {
      const double w = h / (2.0 * g_.x[i]);
      lo = 1.0 - w;
      hi = 1.0 + w;
    }
    if (i == 0) {
      const double k = g_.radial() ? 4.0 : 2.0;
      diag[i] = 1.0 + k * a;
      sup[i] = -k * a;
    } else if (i + 1 == n) {
      diag[i] = 1.0 + 2.0 * a;
      sub[i] = -2.0 * a;
    } else {
      sub[i] = -a * lo;
      diag[i] = 1.0 + 2.0 * a;
      sup[i] = -a * hi;
    }
  }
  if (opt_.outer == OuterBoundary::Dirichlet) {
    sub[n - 1] = 0.0;
    diag[n - 1] = 1.0;
    if (!g_.radial()) {
      diag[0] = 1.0;
      sup[0] = 0.0;
    }
  }
  lu_ = TridiagonalLU(sub, diag, sup);
  rhsM_.resize(n);
  rhsF_.resize(n);
  rhsS_.resize(n);
}

void Stepper::finish_field(std::vector<double>& u, double upper_ref) {
  const double scale = std::max(upper_ref, 1e-300);
  for (double& v : u) {
    if (v >= 0.0) continue;
    if (v < -opt_.clamp_fail * scale) {
      std::ostringstream os;
      os << "negative undershoot " << v << " beyond " << opt_.clamp_fail << " x scale " << scale;
      throw SolverError(os.str());
    }
    if (v < -opt_.clamp_count * scale) ++clamps_;
    v = 0.0;
  }
}

void Stepper::step(SimState& s) {
  const std::size_t n = s.size();
  if (n != g_.size()) throw DomainError("stepper: state/grid size mismatch");
  const double dt = dt_;

  if (opt_.reactions) {
    const double fmax = *std::max_element(s.F.begin(), s.F.end());
    const double bound = admissible_dt(p_, fmax);
    if (dt > bound * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "dt = " << dt << " exceeds the reaction-stability bound " << bound;
      throw SolverError(os.str());
    }
  }

  double scaleE = 0.0, scaleM = 0.0, scaleF = 0.0, scaleS = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    scaleE = std::max(scaleE, K_[i]);
    scaleM = std::max(scaleM, s.M[i]);
    scaleF = std::max(scaleF, s.F[i]);
    scaleS = std::max(scaleS, s.Ms[i]);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (opt_.reactions) {
      const double lam = release_value(schedule_, g_.x[i], s.t);
      const auto f = reaction_with_capacity(p_, s.at(i), lam, K_[i]);
      rhsM_[i] = s.M[i] + dt * f.fM;
      rhsF_[i] = s.F[i] + dt * f.fF;
      rhsS_[i] = s.Ms[i] + dt * f.fs;
      s.E[i] += dt * f.fE;
    } else {
      rhsM_[i] = s.M[i];
      rhsF_[i] = s.F[i];
      rhsS_[i] = s.Ms[i];
    }
  }
  if (opt_.outer == OuterBoundary::Dirichlet) {
    for (std::size_t i : {std::size_t{0}, n - 1}) {
      if (i == 0 && g_.radial()) continue;
      rhsM_[i] = s.M[i];
      rhsF_[i] = s.F[i];
      rhsS_[i] = s.Ms[i];
    }
  }
  lu_.solve(rhsM_);
  lu_.solve(rhsF_);
  lu_.solve(rhsS_);
  s.M.swap(rhsM_);
  s.F.swap(rhsF_);
  s.Ms.swap(rhsS_);
  s.t += dt;

  finish_field(s.E, scaleE);
  finish_field(s.M, scaleM);
  finish_field(s.F, scaleF);
  finish_field(s.Ms, scaleS);
  for (std::size_t i = 0; i < n; ++i) {
    if (s.E[i] > K_[i]) {
      if (s.E[i] > K_[i] * (1.0 + opt_.clamp_fail)) throw SolverError("E exceeds carrying capacity");
      if (s.E[i] > K_[i] * (1.0 + opt_.clamp_count)) ++clamps_;
      s.E[i] = K_[i];
    }
  }
}

std::pair<std::size_t, double> resolve_steps(const Scenario& sc) {
  if (!(sc.t_end > 0.0)) throw DomainError("run: t_end must be positive");
  double dt = sc.dt;
  if (dt <= 0.0) {
    const double f0 = sc.initial.F.empty() ? 0.0 : *std::max_element(sc.initial.F.begin(), sc.initial.F.end());
    dt = 0.9 * admissible_dt(sc.params, f_bound(sc.params, f0));
  }
  const auto steps = static_cast<std::size_t>(std::ceil(sc.t_end / dt - 1e-9));
  return {steps, sc.t_end / static_cast<double>(steps)};
}

Trajectory run(const Scenario& sc, const std::function<void(const SimState&)>& on_snapshot) {
  if (sc.initial.size() != sc.grid.size()) throw DomainError("run: initial state does not match grid");
  const auto [steps, dt] = resolve_steps(sc);
  Stepper stepper(sc.params, sc.grid, sc.schedule, dt, sc.options);
  const auto every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sc.snapshot_every / dt)));

  Trajectory tr;
  tr.dt = dt;
  SimState s = sc.initial;
  s.t = 0.0;
  const auto snap = [&](const SimState& st) {
    tr.snapshots.push_back(st);
    if (on_snapshot) on_snapshot(st);
  };
  snap(s);
  for (std::size_t n = 1; n <= steps; ++n) {
    stepper.step(s);
    if (n == steps) s.t = sc.t_end;
    if (n % every == 0 || n == steps) snap(s);
  }
  tr.steps = steps;
  tr.clamps = stepper.clamps();
  return tr;
}

namespace {

StatePoint local_target(const ModelParams& p, double x) {
  const auto eq = solve_equilibria(p.with_capacity(p.K.at(x)));
  if (!eq.upper) throw DomainError("initial data: no positive equilibrium for local capacity");
  return eq.upper->state;
}

}  // namespace

SimState make_initial(const InitialData& data, const Grid& g, const ModelParams& p) {
  const std::size_t n = g.size();
  SimState s(n);
  if (const auto* st = std::get_if<StepInitial>(&data)) {
    for (std::size_t i = 0; i < n; ++i) s.set(i, g.x[i] < st->position ? st->left : st->right);
    return s;
  }
  if (const auto* u = std::get_if<UniformInitial>(&data)) {
    for (std::size_t i = 0; i < n; ++i) s.set(i, u->value);
    return s;
  }
  const auto& w = std::get<WellPreparedInitial>(data);
  if (!(w.R0_0 >= 0.0 && w.R0_0 < w.R0_1)) throw DomainError("initial data: need 0 <= R0_0 < R0_1");
  if (!(w.u0 >= 0.0 && w.u0 <= 1.0)) throw DomainError("initial data: u0 must lie in [0, 1]");
  if (!(w.C0 > 0.0)) throw DomainError("initial data: C0 must be positive");

  const bool hetero = p.K.heterogeneous();
  const StatePoint hom = hetero ? StatePoint{} : local_target(p, 0.0);
  const double ms_in = w.Lambda_bar / p.mu_s;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::abs(g.x[i]);
    const StatePoint target = hetero ? local_target(p, r) : hom;
    const double k = p.K.at(r);
    if (r > w.R0_1) {
      s.set(i, target);
      continue;
    }
    double ramp = w.u0;
    if (r > w.R0_0) ramp = w.u0 + (1.0 - w.u0) * (r - w.R0_0) / (w.R0_1 - w.R0_0);
    const double F = target.F * ramp;
    const StatePoint sl = slaved_state(p, F, k);
    s.E[i] = std::min({sl.E, k, w.C0 * F});
    s.M[i] = std::min(sl.M, w.C0 * F);
    s.F[i] = F;
    s.Ms[i] = r <= w.R0_0 ? ms_in : 0.0;
  }

  // Bound check of the well-prepared hypotheses.
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::abs(g.x[i]);
    const StatePoint target = hetero ? local_target(p, r) : hom;
    const double k = p.K.at(r);
    const double tol = 1e-12 * std::max(1.0, target.F);
    const double cap = target.F * (r <= w.R0_0 ? w.u0 : 1.0);
    bool ok = s.F[i] <= cap + tol && s.E[i] <= std::min(k, w.C0 * s.F[i]) + tol &&
              s.M[i] <= w.C0 * s.F[i] + tol && s.E[i] >= 0.0 && s.M[i] >= 0.0;
    if (r <= w.R0_0) ok = ok && s.Ms[i] >= ms_in;
    if (r > w.R0_1) {
      ok = ok && s.E[i] == target.E && s.M[i] == target.M && s.F[i] == target.F && s.Ms[i] == 0.0;
    }
    if (!ok) {
      std::ostringstream os;
      os << "initial data: well-prepared bound violated at node " << i << " (r = " << r << ")";
      throw DomainError(os.str());
    }
  }
  return s;
}

}  // namespace sit

#include "sit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sit/equilibria.hpp"
#include "sit/errors.hpp"

namespace sit {

SpaceTimeGrid SpaceTimeGrid::uniform(double r_min, double r_max, int nr, double t_min,
                                     double t_max, int nt) {
  SpaceTimeGrid g;
  for (int i = 0; i < nr; ++i) {
    g.r.push_back(nr == 1 ? r_min : r_min + (r_max - r_min) * i / (nr - 1));
  }
  for (int j = 0; j < nt; ++j) {
    g.t.push_back(nt == 1 ? t_min : t_min + (t_max - t_min) * j / (nt - 1));
  }
  return g;
}

namespace {

struct Axis {
  double d1 = 0.0;
  double d2 = 0.0;
};

// Derivatives along one axis; at(s) evaluates at offset s, inside(s) says
// whether offset s belongs to the same region.
template <class At, class Inside>
std::optional<Axis> axis_derivatives(const At& at, const Inside& inside, double h,
                                     double edge_ratio, double u0) {
  if (inside(-2 * h) && inside(-h) && inside(h) && inside(2 * h)) {
    const double fm2 = at(-2 * h), fm1 = at(-h), f1 = at(h), f2 = at(2 * h);
    return Axis{(fm2 - 8.0 * fm1 + 8.0 * f1 - f2) / (12.0 * h),
                (-fm2 + 16.0 * fm1 - 30.0 * u0 + 16.0 * f1 - f2) / (12.0 * h * h)};
  }
  const double e = h * edge_ratio;
  for (const double s : {e, -e}) {
    if (inside(s) && inside(2 * s) && inside(3 * s)) {
      const double f1 = at(s), f2 = at(2 * s), f3 = at(3 * s);
      return Axis{(-3.0 * u0 + 4.0 * f1 - f2) / (2.0 * s),
                  (2.0 * u0 - 5.0 * f1 + 4.0 * f2 - f3) / (s * s)};
    }
  }
  return std::nullopt;
}

void record(InequalityReport& rep, double value, Sign sign, double tol, double r, double t) {
  ++rep.points_checked;
  const bool bad = sign == Sign::NonNegative ? value < -tol : value > tol;
  const bool worse = rep.points_checked == 1 ||
                     (sign == Sign::NonNegative ? value < rep.worst : value > rep.worst);
  if (bad) {
    ++rep.violations;
    rep.passed = false;
  }
  if (worse) {
    rep.worst = value;
    rep.worst_r = r;
    rep.worst_t = t;
  }
}

InequalityReport failed_report(const std::string& name, const std::string& note) {
  InequalityReport rep;
  rep.name = name;
  rep.passed = false;
  rep.note = note;
  return rep;
}

}  // namespace

std::optional<LocalDerivatives> fd_derivatives(const Field& u, const RegionFn& region,
                                               double r, double t, const FdOptions& opt) {
  const int reg = region(r, t);
  if (reg < 0) return std::nullopt;
  const auto rr = [&](double s) { return opt.radial ? std::abs(r + s) : r + s; };
  const auto in_r = [&](double s) { return region(rr(s), t) == reg; };
  const auto at_r = [&](double s) { return u(rr(s), t); };
  const auto in_t = [&](double s) { return t + s >= 0.0 && region(r, t + s) == reg; };
  const auto at_t = [&](double s) { return u(r, t + s); };

  LocalDerivatives d;
  d.u = u(r, t);
  const auto ax_r = axis_derivatives(at_r, in_r, opt.hr, opt.edge_ratio, d.u);
  const auto ax_t = axis_derivatives(at_t, in_t, opt.ht, opt.edge_ratio, d.u);
  if (!ax_r || !ax_t) return std::nullopt;
  d.ur = ax_r->d1;
  d.urr = ax_r->d2;
  d.ut = ax_t->d1;
  if (!opt.radial) {
    d.lap = d.urr;
  } else if (r < 1e-12) {
    d.lap = 2.0 * d.urr;
  } else {
    d.lap = d.urr + d.ur / r;
  }
  return d;
}

InequalityReport verify_inequality(const std::string& name, const Field& u,
                                   const RegionFn& region, const Residual& residual,
                                   Sign sign, const SpaceTimeGrid& grid, double tol,
                                   const FdOptions& opt) {
  InequalityReport rep;
  rep.name = name;
  for (const double t : grid.t) {
    for (const double r : grid.r) {
      if (region(r, t) < 0) continue;
      const auto d = fd_derivatives(u, region, r, t, opt);
      if (!d) {
        ++rep.points_skipped;
        continue;
      }
      record(rep, residual(r, t, *d), sign, tol, r, t);
    }
  }
  return rep;
}

InequalityReport verify_pointwise(const std::string& name, const Field& value, Sign sign,
                                  const SpaceTimeGrid& grid, double tol) {
  InequalityReport rep;
  rep.name = name;
  for (const double t : grid.t) {
    for (const double r : grid.r) record(rep, value(r, t), sign, tol, r, t);
  }
  return rep;
}

void check_jumps(InequalityReport& report, std::vector<InterfaceCheck> jumps, Sign sign,
                 double tol) {
  for (auto& j : jumps) {
    const double gap = j.left - j.right;
    j.passed = sign == Sign::NonNegative ? gap >= -tol : gap <= tol;
    if (!j.passed) {
      report.passed = false;
      ++report.violations;
    }
    report.interfaces.push_back(j);
  }
}

bool VerificationSummary::passed() const {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
}

std::vector<std::string> VerificationSummary::failures() const {
  std::vector<std::string> out;
  for (const auto& r : reports) {
    if (!r.passed) out.push_back(r.note.empty() ? r.name : r.name + ": " + r.note);
  }
  return out;
}

// --- super-solution -------------------------------------------------------

VerificationSummary verify_supersolution(const SupersolutionBundle& b,
                                         const SupersolutionCheckOptions& opt) {
  VerificationSummary out;
  const ModelParams& p = b.params;
  const double t_max = opt.t_max > 0.0 ? opt.t_max : 200.0;
  const double r_max = b.r2 + b.c * t_max + opt.r_margin;
  const auto grid = SpaceTimeGrid::uniform(0.0, r_max, opt.nr, 0.0, t_max, opt.nt);
  const Field F = [&b](double r, double t) { return b.Fbar(r, t); };
  const RegionFn region = [&b](double r, double t) { return b.region(r, t); };

  if (!b.infeasible.empty()) {
    std::string note;
    for (const auto& s : b.infeasible) note += (note.empty() ? "" : "; ") + s;
    out.reports.push_back(failed_report("smallness conditions", note));
  }

  auto lin = verify_inequality(
      "Fbar linear inequality", F, region,
      [&b](double r, double t, const LocalDerivatives& d) {
        return (d.ut - d.lap + b.g(r, t) * d.u) / b.F_star;
      },
      Sign::NonNegative, grid, opt.tol);
  out.reports.push_back(lin);

  InequalityReport jumps;
  jumps.name = "Fbar interface jumps";
  for (const double t : grid.t) {
    const auto ifs = b.interfaces(t);
    const auto ders = b.interface_derivatives(t);
    std::vector<InterfaceCheck> js;
    for (std::size_t k = 0; k < ifs.size(); ++k) {
      js.push_back({ifs[k], t, ders[k].first / b.F_star, ders[k].second / b.F_star, true});
    }
    check_jumps(jumps, js, Sign::NonNegative, 1e-12);
  }
  out.reports.push_back(jumps);

  const double rnc = (1.0 - p.rho) * p.nu_E;
  auto mbar = verify_inequality(
      "Mbar inequality", F, region,
      [&b, &p, rnc](double, double, const LocalDerivatives& d) {
        return (b.C2 * (d.ut - d.lap + p.mu_M * d.u) - rnc * b.C1 * d.u) / (b.C2 * b.F_star);
      },
      Sign::NonNegative, grid, opt.tol);
  out.reports.push_back(mbar);

  const double rho_nu = p.rho * p.nu_E;
  const auto reaction_gap = [&](double r, double t) {
    const double f = b.Fbar(r, t);
    const int reg = b.region(r, t);
    if (reg == 3) {
      const double m = std::min(b.C2 * b.F_star, b.M_star);
      return (p.mu_F * b.F_star - rho_nu * b.E_star * mating_factor(p, m, 0.0)) / b.F_star;
    }
    double ms = 0.0;
    if (reg == 2) ms = b.Ms_required;
    else if (!p.bistable()) ms = b.Ms_required_inner;
    const double rhs = rho_nu * b.C1 * f * mating_factor(p, b.C2 * f, ms);
    return ((p.mu_F - b.g(r, t)) * f - rhs) / b.F_star;
  };
  out.reports.push_back(
      verify_pointwise("F reaction bound", reaction_gap, Sign::NonNegative, grid, opt.tol));

  InequalityReport egg;
  egg.name = "Ebar <= C1 Fbar";
  const double k = p.K.base;
  for (int j = 0; j < opt.ode_radii; ++j) {
    const double r = r_max * (j + 0.5) / opt.ode_radii;
    const double E0 = std::min({k, b.C0 * b.Fbar(r, 0.0), b.E_star});
    const auto E = ebar_ode(b, [&b](double rr, double t) { return b.Fbar(rr, t); }, r, t_max,
                            opt.ode_dt, E0);
    for (std::size_t n = 0; n < E.size(); ++n) {
      const double t = n * opt.ode_dt;
      record(egg, (b.C1 * b.Fbar(r, t) - E[n]) / b.E_star, Sign::NonNegative, opt.tol, r, t);
    }
  }
  out.reports.push_back(egg);
  return out;
}

BundleSearchResult search_bundle(const ModelParams& p, BundleRequest req, int max_attempts,
                                 const SupersolutionCheckOptions& opt) {
  BundleSearchResult res;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    res.bundle = make_bundle(p, req);
    auto o = opt;
    if (o.t_max <= 0.0) o.t_max = req.t_check;
    res.summary = verify_supersolution(res.bundle, o);
    const auto fails = res.summary.failures();
    std::ostringstream line;
    line << "attempt " << attempt << ": mu=" << res.bundle.mu << " eps=" << res.bundle.eps
         << " u0=" << res.bundle.u0 << " C1=" << res.bundle.C1 << " C2=" << res.bundle.C2
         << " -> " << (fails.empty() ? "pass" : "fail");
    for (const auto& f : fails) line << " [" << f << "]";
    res.log.push_back(line.str());
    if (fails.empty()) {
      res.passed = true;
      return res;
    }
    const auto failed = [&](const char* name) {
      return std::any_of(res.summary.reports.begin(), res.summary.reports.end(),
                         [&](const auto& r) { return !r.passed && r.name == name; });
    };
    const bool rates = failed("smallness conditions") || failed("Fbar linear inequality") ||
                       failed("F reaction bound");
    if (rates) {
      req.mu = 0.5 * res.bundle.mu;
      req.eps = 0.5 * res.bundle.eps;
      req.C1.reset();
      req.C2.reset();
      req.u0.reset();
    } else if (failed("Ebar <= C1 Fbar")) {
      req.C1 = 2.0 * res.bundle.C1;
      req.C2.reset();
      req.u0.reset();
    } else {
      req.C2 = 2.0 * res.bundle.C2;
      req.u0.reset();
    }
  }
  return res;
}

// --- sub-solution ---------------------------------------------------------

StationaryPair build_stationary_pair(const ModelParams& p, std::optional<double> eps,
                                     const StationaryOptions& opt) {
  const ModelParams hom = p.with_capacity(p.K.base);
  if (!eps) {
    eps = find_eps_gamma(hom);
    if (!eps) throw DomainError("stationary pair: potential condition fails, no sterile tail admissible");
  }
  auto res = build_stationary_F(hom, eps, opt);
  if (!res.profile) throw DomainError("stationary pair: " + res.diagnostic);
  StationaryPair pair;
  pair.F = *res.profile;
  pair.M = build_stationary_M(hom, pair.F);
  pair.eps = *eps;
  pair.F_star = res.F_star;
  pair.F_m = res.F_m;
  const auto eq = solve_equilibria(hom);
  pair.M_star = eq.upper ? eq.upper->state.M : 0.0;
  return pair;
}

namespace {

double egg_of(const ModelParams& p, double F) {
  return p.b * F / (p.b * F / p.K.base + p.mu_E + p.nu_E);
}

}  // namespace

VerificationSummary verify_stationary_subsolution(const ModelParams& p,
                                                  const StationaryPair& pair,
                                                  const SubsolutionCheckOptions& opt) {
  VerificationSummary out;
  const auto& F = pair.F.values;
  const auto& M = pair.M.values;
  const auto& x = pair.F.grid;
  const double h = pair.F.spacing();
  const std::size_t n = F.size();
  const std::size_t stride = std::max(1, opt.node_stride);

  InequalityReport mres, fres, bounds, chain;
  mres.name = "stationary M equation";
  fres.name = "stationary F equation";
  bounds.name = "half-line bounds";
  chain.name = "phi(F) <= M";
  const double sM = p.mu_M * pair.M_star;
  const double sF = p.mu_F * pair.F_star;
  for (std::size_t i = 1; i + 1 < n; i += stride) {
    if (opt.x_max > 0.0 && x[i] > opt.x_max) break;
    const double m2 = (M[i + 1] - 2.0 * M[i] + M[i - 1]) / (h * h);
    const double f2 = (F[i + 1] - 2.0 * F[i] + F[i - 1]) / (h * h);
    const double gM = (1.0 - p.rho) * p.nu_E * egg_of(p, F[i]) - p.mu_M * M[i];
    record(mres, (-m2 - gM) / sM, Sign::NonPositive, opt.tol, x[i], 0.0);
    record(fres, (-f2 - g_F_eps(p, pair.eps, x[i], M[i], F[i])) / sF, Sign::NonPositive,
           opt.tol, x[i], 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double mb = pair.M_star * -std::expm1(-std::sqrt(p.mu_M) * x[i]);
    const double fb = pair.F_star * -std::expm1(-std::sqrt(p.mu_F) * x[i]);
    record(bounds, std::max((M[i] - mb) / pair.M_star, (F[i] - fb) / pair.F_star),
           Sign::NonPositive, 1e-9, x[i], 0.0);
    const double ph = F[i] < pair.F_star ? phi(p, F[i], pair.F_star) : 0.5 * pair.M_star;
    record(chain, (ph - M[i]) / pair.M_star, Sign::NonPositive, 1e-9, x[i], 0.0);
  }
  InequalityReport mono;
  mono.name = "profiles nondecreasing";
  mono.passed = pair.F.nondecreasing() && pair.M.nondecreasing();
  mono.points_checked = n;
  if (!mono.passed) mono.note = "profile decreases somewhere";
  out.reports = {mres, fres, bounds, chain, mono};
  return out;
}

double minimal_shift(const ModelParams& p, const SterileBoundProfile& upper, double eps) {
  const double ratio = p.gamma_s * upper.amplitude / eps;
  return upper.Rs + std::max(0.0, std::log(std::max(ratio, 1.0)) / std::sqrt(p.mu_s));
}

VerificationSummary verify_shifted_subsolution(const ModelParams& p,
                                               const StationaryPair& pair,
                                               const SterileBoundProfile& upper,
                                               const ShiftedCheck& check,
                                               const SubsolutionCheckOptions& opt) {
  VerificationSummary out;
  const auto& F = pair.F.values;
  const auto& M = pair.M.values;
  const auto& x = pair.F.grid;
  const double h = pair.F.spacing();
  const std::size_t n = F.size();
  const std::size_t stride = std::max(1, opt.node_stride);
  const double c = check.c;

  InequalityReport fres, mres, eres, kink;
  fres.name = "shifted F sub-solution";
  mres.name = "shifted M sub-solution";
  eres.name = "shifted E sub-solution";
  kink.name = "shifted front kink";
  const double sM = p.mu_M * pair.M_star;
  const double sF = p.mu_F * pair.F_star;
  for (const double t : check.times) {
    for (std::size_t i = 1; i + 1 < n; i += stride) {
      if (opt.x_max > 0.0 && x[i] > opt.x_max) break;
      const double r = x[i] + c * t + check.shift;
      const double f1 = (F[i + 1] - F[i - 1]) / (2.0 * h);
      const double f2 = (F[i + 1] - 2.0 * F[i] + F[i - 1]) / (h * h);
      const double m1 = (M[i + 1] - M[i - 1]) / (2.0 * h);
      const double m2 = (M[i + 1] - 2.0 * M[i] + M[i - 1]) / (h * h);
      const double E = egg_of(p, F[i]);
      const double ms = upper(r, t);
      const double drift = c + 1.0 / r;
      const double rhsF = p.rho * p.nu_E * E * mating_factor(p, M[i], ms) - p.mu_F * F[i];
      const double rhsM = (1.0 - p.rho) * p.nu_E * E - p.mu_M * M[i];
      record(fres, (-f2 - drift * f1 - rhsF) / sF, Sign::NonPositive, opt.tol, r, t);
      record(mres, (-m2 - drift * m1 - rhsM) / sM, Sign::NonPositive, opt.tol, r, t);
      const double e1 = (egg_of(p, F[i + 1]) - egg_of(p, F[i - 1])) / (2.0 * h);
      record(eres, -c * e1 / pair.F_star, Sign::NonPositive, opt.tol, r, t);
    }
    check_jumps(kink, {{check.shift + c * t, t, 0.0, (F[1] - F[0]) / h, true}},
                Sign::NonPositive, 0.0);
  }
  out.reports = {fres, mres, eres, kink};
  return out;
}

// --- sterile bounds ---------------------------------------------------------

namespace {

int upper_region(const SterileBoundProfile& s, double r, double t) {
  return r - s.c * t <= s.Rs ? 0 : 1;
}

int lower_region(const SterileBoundProfile& s, double r, double t) {
  const double xi = r - s.c * t;
  if (s.kind == SterileBoundKind::LowerAnnulusWithTail) {
    if (xi < s.R1) return 0;
    if (xi < s.r1) return 1;
    if (xi <= s.r2) return 2;
    return 3;
  }
  if (xi < s.r1) return 0;
  if (xi <= s.r2) return 1;
  return 2;
}

}  // namespace

VerificationSummary verify_sterile_bounds(const SterileBoundProfile& lower,
                                          const SterileBoundProfile& upper,
                                          const Field& release,
                                          const SterileCheckOptions& opt) {
  VerificationSummary out;
  const double lam = std::max(lower.Lambda_bar, 1e-300);
  const double mu_s = upper.mu_s;

  {
    const double r_max = upper.Rs + upper.c * opt.t_max + 30.0 / std::sqrt(mu_s);
    const auto grid = SpaceTimeGrid::uniform(0.0, r_max, opt.nr, 0.0, opt.t_max, opt.nt);
    const double scale = std::max({upper.Lambda_bar, mu_s * upper.amplitude, 1e-300});
    auto rep = verify_inequality(
        "sterile upper bound", [&](double r, double t) { return upper(r, t); },
        [&](double r, double t) { return upper_region(upper, r, t); },
        [&](double r, double t, const LocalDerivatives& d) {
          return (d.ut - d.lap + mu_s * d.u - release(r, t)) / scale;
        },
        Sign::NonNegative, grid, opt.tol);
    std::vector<InterfaceCheck> js;
    for (const double t : grid.t) {
      const double xi = upper.Rs;
      js.push_back({xi + upper.c * t, t, upper.m_prime(xi) / scale, upper.m_prime(xi + 1e-13 * std::max(1.0, xi)) / scale, true});
    }
    check_jumps(rep, js, Sign::NonNegative, 1e-12);
    out.reports.push_back(rep);
  }

  const double r_max = lower.R2 + lower.c * opt.t_max + 10.0;
  const auto grid = SpaceTimeGrid::uniform(0.0, r_max, opt.nr, 0.0, opt.t_max, opt.nt);
  const double mu_l = lower.mu_s;
  auto rep = verify_inequality(
      "sterile lower bound", [&](double r, double t) { return lower(r, t); },
      [&](double r, double t) { return lower_region(lower, r, t); },
      [&](double r, double t, const LocalDerivatives& d) {
        return (d.ut - d.lap + mu_l * d.u - release(r, t)) / lam;
      },
      Sign::NonPositive, grid, opt.tol);

  std::vector<double> kinks = {lower.r1, lower.r2};
  if (lower.kind == SterileBoundKind::LowerAnnulusWithTail) kinks.insert(kinks.begin(), lower.R1);
  const auto one_sided = [&](double xi, double side) {
    const double d = 1e-13 * std::max(1.0, std::abs(xi));
    return std::pair{lower.m(xi + side * d), lower.m_prime(xi + side * d)};
  };
  std::vector<InterfaceCheck> js;
  for (const double t : grid.t) {
    for (const double xi : kinks) {
      js.push_back({xi + lower.c * t, t, one_sided(xi, -1.0).second / lower.amplitude,
                    one_sided(xi, 1.0).second / lower.amplitude, true});
    }
  }
  check_jumps(rep, js, Sign::NonPositive, 1e-9);
  out.reports.push_back(rep);

  InequalityReport plateau;
  plateau.name = "sterile plateau";
  for (int i = 0; i <= 400; ++i) {
    const double xi = lower.r1 + (lower.r2 - lower.r1) * i / 400.0;
    record(plateau, (lower.amplitude - lower.m(xi)) / lower.amplitude, Sign::NonPositive, 1e-14, xi, 0.0);
  }
  for (int i = 0; i <= 800; ++i) {
    const double xi = (lower.R2 + 10.0) * i / 800.0;
    if (lower.kind == SterileBoundKind::LowerAnnulus) {
      record(plateau, (lower.m(xi) - lower.amplitude) / lower.amplitude, Sign::NonPositive, 1e-14, xi, 0.0);
    } else if (xi < lower.r1) {
      const double floor = lower.amplitude * std::exp(lower.eta * (xi - lower.r1));
      record(plateau, (floor - lower.m(xi)) / lower.amplitude, Sign::NonPositive, 1e-14, xi, 0.0);
    }
  }
  out.reports.push_back(plateau);

  if (lower.kind == SterileBoundKind::LowerAnnulusWithTail) {
    InequalityReport c1;
    c1.name = "tail profile C1 matching";
    for (const double xi : {lower.R1, lower.r1}) {
      const auto [vl, dl] = one_sided(xi, -1.0);
      const auto [vr, dr] = one_sided(xi, 1.0);
      const double gap = std::max(std::abs(vl - vr) / lower.amplitude,
                                  std::abs(dl - dr) / (lower.amplitude * lower.eta));
      record(c1, gap, Sign::NonPositive, opt.c1_tol, xi, 0.0);
    }
    out.reports.push_back(c1);
  }
  return out;
}

}  // namespace sit

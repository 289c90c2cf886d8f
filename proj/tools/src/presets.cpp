#include "sitharness/presets.hpp"

#include <cmath>

#include "sit/errors.hpp"

namespace sitharness {

namespace {

ScenarioConfig line_preset(double gamma) {
  ScenarioConfig c;
  c.model.gamma = gamma;
  c.grid = {"cartesian", -40.0, 40.0, 801};
  c.initial.kind = "step";
  c.initial.position = -10.0;
  c.run.t_end = 150.0;
  c.run.snapshot_every = 1.0;
  return c;
}

ScenarioConfig disc_preset(double radius) {
  ScenarioConfig c;
  c.grid = {"radial", 0.0, radius, static_cast<std::size_t>(std::lround(10.0 * radius)) + 1};
  c.initial.kind = "well-prepared";
  c.run.snapshot_every = 1.0;
  c.run.csv_every = 10;
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig1", "fig2-left", "fig2-right", "carpet", "carpet-hetero", "no-release-2d"};
}

CarpetDesign design_carpet(const ScenarioConfig& cfg) {
  auto p = to_params(cfg);
  p = p.with_capacity(p.K.base);
  auto req = to_bundle_request(cfg);
  CarpetDesign d;
  d.search = sit::search_bundle(p, req, search_attempts(cfg));
  if (!d.search.passed) {
    std::string why;
    for (const auto& f : d.search.summary.failures()) why += (why.empty() ? "" : "; ") + f;
    throw sit::SolverError("no verified super-solution bundle: " + why);
  }
  const auto& B = d.search.bundle;
  const double s = B.sqrtD;
  d.release = sit::carpet_release(B, cfg.verify.inner_margin / s, cfg.verify.outer_margin / s,
                                  cfg.verify.t_check);
  d.Lambda_bar = d.release.Lambda_bar;
  d.R1 = B.to_physical(d.release.R1);
  d.R2 = B.to_physical(d.release.R2);
  d.c = req.c;
  d.u0 = B.u0;
  return d;
}

void apply_carpet(ScenarioConfig& cfg, const CarpetDesign& d) {
  cfg.schedule.kind = "annulus";
  cfg.schedule.Lambda_bar = d.Lambda_bar;
  cfg.schedule.R1 = d.R1;
  cfg.schedule.R2 = d.R2;
  cfg.schedule.c = d.c;
  cfg.initial.kind = "well-prepared";
  cfg.initial.R0_0 = d.R2 + 1.0;
  cfg.initial.R0_1 = d.R2 + 4.0;
  cfg.initial.u0 = d.u0;
}

ScenarioConfig preset(std::string_view name) {
  if (name == "fig1") return line_preset(0.5);
  if (name == "fig2-left") return line_preset(0.01);
  if (name == "fig2-right") return line_preset(2.355e-3);
  if (name == "no-release-2d") {
    auto c = disc_preset(45.0);
    c.initial.R0_0 = 10.0;
    c.initial.R0_1 = 13.0;
    c.initial.u0 = 0.0;
    c.run.t_end = 40.0;
    return c;
  }
  if (name == "carpet" || name == "carpet-hetero") {
    // The sterile halo of the certified release reaches ~16 km past the
    // annulus, so the disc is twice the 45 km of the field runs and the
    // exterior probe sits beyond the halo.
    auto c = disc_preset(90.0);
    apply_carpet(c, design_carpet(c));
    c.run.t_end = 200.0;
    c.analysis.carpet_probes = true;
    c.analysis.c_under = 0.04;
    c.analysis.c_over = 0.3;
    if (name == "carpet-hetero") {
      c.model.K_amplitude = 50.0;
      c.model.K_wavelength = 10.0;
      c.analysis.positivity_exterior = true;
    }
    return c;
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw sit::ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace sitharness

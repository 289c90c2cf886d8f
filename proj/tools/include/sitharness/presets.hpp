#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sit/sterile.hpp"
#include "sit/verify.hpp"
#include "sitharness/config.hpp"

namespace sitharness {

std::vector<std::string> preset_names();

// Throws sit::ConfigError for an unknown name.
ScenarioConfig preset(std::string_view name);

// Release schedule sized from a verified super-solution bundle, in physical
// units. The bundle is built for the homogeneous model at the base capacity.
struct CarpetDesign {
  sit::BundleSearchResult search;
  sit::CarpetRelease release;
  double Lambda_bar = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  double c = 0.0;
  double u0 = 0.0;
};

// Throws sit::SolverError when the constant search does not pass.
CarpetDesign design_carpet(const ScenarioConfig& cfg);

// Fills schedule and initial data from the design: annulus [R1, R2] moving
// at c, clean disc of radius R2 + 1 and equilibrium beyond R2 + 4.
void apply_carpet(ScenarioConfig& cfg, const CarpetDesign& d);

}  // namespace sitharness

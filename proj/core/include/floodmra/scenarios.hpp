#pragma once

#include <string>
#include <utility>
#include <vector>

#include "floodmra/raster.hpp"

namespace floodmra {

// Self-contained synthetic test scenario: a DEM, a ready-to-run config and
// any auxiliary inputs (hydrographs, initial-depth rasters). Generators are
// pure functions of their parameters, so emitted files are reproducible
// byte-for-byte.
struct Scenario {
  std::string name;
  Raster dem;
  std::string config_text;  // references files by the relative names below
  std::vector<std::pair<std::string, std::string>> extra_text;
  std::vector<std::pair<std::string, Raster>> extra_rasters;
};

// Downsloping valley with parabolic cross-section, a rough channel strip and
// three depressions along the thalweg; triangular inflow at the upstream end.
Scenario make_valley(int length_cells = 384, int width_cells = 32, int max_level = 5);

// Flat frictionless bed, depth 1 m on the west half and 0.5 m on the east
// half, reflective sidewalls. Open ends unless `closed`.
Scenario make_dambreak_1d(int cells = 400, bool closed = false);

// Random smooth+rough bed under a constant free surface with zero discharge.
// `emerged` drops the surface below the highest bed point.
Scenario make_lake_at_rest(int size = 32, unsigned seed = 1, bool emerged = false);

// Writes dem.asc, scenario.cfg and the auxiliary files into `dir`.
void emit_scenario(const Scenario& s, const std::string& dir);

}  // namespace floodmra

#pragma once

#include <string>
#include <vector>

namespace floodmra {

// Discharge-versus-time forcing. Sample times are strictly increasing and
// discharges non-negative.
struct Hydrograph {
  struct Sample {
    double t;  // s
    double q;  // m^3/s
  };
  std::vector<Sample> samples;
};

// CSV with a `t,Q` header row.
Hydrograph read_hydrograph_csv(const std::string& path);

// Linear interpolation between bracketing samples, clamped to the first/last
// value outside the sampled range.
double hydrograph_at(const Hydrograph& h, double t);

}  // namespace floodmra

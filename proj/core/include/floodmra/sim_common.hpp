#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "floodmra/config.hpp"
#include "floodmra/field.hpp"
#include "floodmra/hydrograph.hpp"
#include "floodmra/raster.hpp"

namespace floodmra {

// Deterministic contiguous-chunk parallel loop; results must not depend on
// the worker count, so chunk outputs go to disjoint slots.
void parallel_for(int64_t n, int threads, const std::function<void(int64_t, int64_t)>& body);

inline double safe_velocity(double h, double q, double h_dry) {
  return h > h_dry ? q / h : 0.0;
}

// Split implicit Manning friction applied to the average discharge
// coefficients at the start of a step: q <- q / (1 + dt g n^2 |V| / h^(4/3)).
void friction_update(double h0, PlanarCoeffs& qx, PlanarCoeffs& qy, double n_manning, double g,
                     double h_dry, double dt);

// Step scheduler: clips dt so the clock lands exactly on gauge samples,
// raster outputs, and the end time.
struct EventClock {
  double end_time = 0.0;
  double output_interval = 0.0;
  double gauge_interval = 0.0;
  double now = 0.0;
  int64_t next_output = 1;
  int64_t next_gauge = 1;

  double next_event() const;
  double clip(double dt) const;
  void advance(double dt) { now += dt; }
  bool output_due();  // true once per due output; advances the counter
  bool gauge_due();
  bool finished() const { return now >= end_time; }
};

struct GaugeValue {
  double h = 0.0, eta = 0.0, u = 0.0, v = 0.0;
};

struct GaugeRecord {
  std::vector<double> t;
  std::vector<GaugeValue> v;
};

void write_gauge_csv(const GaugeRecord& rec, const std::string& path);

struct RunStats {
  std::string solver;
  int64_t steps = 0;
  double dt_min = std::numeric_limits<double>::infinity();
  double dt_max = 0.0;
  double wall_seconds = 0.0;  // time loop only
  double volume_initial = 0.0;
  double volume_final = 0.0;
  double volume_inflow = 0.0;
  double mass_error_rel = 0.0;
  bool blew_up = false;
  double blow_up_time = 0.0;
  int64_t leaf_count = 0;  // 0 for uniform runs
  std::vector<int64_t> leaf_count_per_level;
};

void write_run_stats(const RunStats& s, const std::string& path);

// Nodata mask over the element grid: an element is masked when any of its
// DEM corner samples is the nodata sentinel.
std::vector<uint8_t> element_nodata_mask(const Raster& dem);

// Crop a fine-grid raster (possibly padded) to nx x ny elements and blank
// masked cells with the nodata sentinel.
Raster crop_and_mask(const Raster& full, int nx, int ny, const std::vector<uint8_t>& mask);

// Inflow resolved against a concrete grid: target cells and the total cell
// count of the configured region.
struct ResolvedInflow {
  Hydrograph hydro;
  // (cell-or-leaf index, number of fine region cells it covers)
  std::vector<std::pair<int32_t, int32_t>> targets;
  int64_t region_cells = 0;
};

}  // namespace floodmra

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace floodmra {

enum class SolverKind { dg2, fv1, acc, mwdg2, hwfv1 };
enum class GridMode { uniform, nonuniform };
enum class BoundaryKind { reflective, open };
enum class Side : int { north = 0, east = 1, south = 2, west = 3 };

const char* solver_name(SolverKind k);
std::optional<SolverKind> solver_from_name(const std::string& s);
bool solver_is_adaptive(SolverKind k);

// Rectangle of fine-grid cells receiving a hydrograph as a depth source.
struct InflowSpec {
  std::string hydrograph_path;
  int i0 = 0, j0 = 0, i1 = 0, j1 = 0;  // inclusive cell range, i = column, j = row from south
};

struct GaugeSpec {
  double x = 0.0, y = 0.0;  // metres, domain coordinates
};

struct ScenarioConfig {
  std::string dem_path;
  SolverKind solver = SolverKind::dg2;
  GridMode grid_mode = GridMode::uniform;
  double epsilon = 1e-3;
  int max_level = -1;  // required for nonuniform grids and adaptive solvers

  double end_time = 0.0;
  double output_interval = 0.0;  // defaults to end_time
  double gauge_interval = 0.0;   // defaults to output_interval

  double manning = 0.0;
  std::string manning_raster;

  double g = 9.80665;
  double h_dry = 1e-6;
  double wet_threshold = 0.01;
  double courant = 0.0;  // 0 = per-solver default (0.33 / 0.5 / 0.7)

  std::array<BoundaryKind, 4> boundary = {BoundaryKind::reflective, BoundaryKind::reflective,
                                          BoundaryKind::reflective, BoundaryKind::reflective};

  std::vector<InflowSpec> inflows;
  std::vector<GaugeSpec> gauges;

  double initial_depth = 0.0;
  std::string initial_depth_raster;
  std::optional<double> initial_surface;

  int adapt_every = 1;
  std::string grid_file;  // optional .nug to run on instead of generating
  std::string output_dir = "out";
  int threads = 1;

  double courant_for(SolverKind k) const;
  BoundaryKind boundary_at(Side s) const { return boundary[static_cast<int>(s)]; }
};

// `key = value` lines, `#` comments. Collects every violation into one error.
ScenarioConfig read_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin);

}  // namespace floodmra

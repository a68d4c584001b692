#include "floodmra/scenarios.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "floodmra/errors.hpp"
#include "floodmra/field.hpp"

namespace floodmra {

namespace {

Raster vertex_raster(int nx_cells, int ny_cells, double cellsize) {
  Raster r;
  r.ncols = nx_cells + 1;
  r.nrows = ny_cells + 1;
  r.cellsize = cellsize;
  r.xll = 0.0;
  r.yll = 0.0;
  r.values.assign(static_cast<size_t>(r.ncols) * r.nrows, 0.0);
  return r;
}

template <typename F>
void fill_vertices(Raster& r, F&& z) {
  for (int row = 0; row < r.nrows; ++row)
    for (int col = 0; col < r.ncols; ++col) r.at(row, col) = z(r.x_of(col), r.y_of(row));
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

Scenario make_valley(int length_cells, int width_cells, int max_level) {
  const double R = 10.0;
  const double X = length_cells * R;
  const double Y = width_cells * R;
  const double slope = 0.005;
  const double cross = 2.0e-4;

  const double pit_x[3] = {0.32 * X, 0.57 * X, 0.83 * X};
  const double pit_a[3] = {1.2, 1.5, 2.5};
  const double pit_w = 150.0;

  auto z = [&](double x, double y) {
    double v = slope * (X - x) + cross * (y - Y / 2) * (y - Y / 2);
    for (int p = 0; p < 3; ++p) {
      const double dx = x - pit_x[p];
      if (std::abs(dx) < pit_w) {
        const double c = std::cos(kPi * dx / (2.0 * pit_w));
        v -= pit_a[p] * c * c * std::exp(-std::pow((y - Y / 2) / 60.0, 2));
      }
    }
    // Rough channel strip; vanishes on the thalweg so the centreline stays
    // monotone between depressions.
    v += 0.25 * std::sin(2.0 * kPi * x / 48.0) * std::sin(2.0 * kPi * (y - Y / 2) / 64.0) *
         std::exp(-std::pow((y - Y / 2) / 80.0, 2));
    return v;
  };

  Scenario s;
  s.name = "valley";
  s.dem = vertex_raster(length_cells, width_cells, R);
  fill_vertices(s.dem, z);

  std::ostringstream hydro;
  hydro << "t,Q\n0,0\n250,60\n500,0\n3600,0\n";
  s.extra_text.emplace_back("inflow.csv", hydro.str());

  const int j0 = width_cells / 2 - 4;
  const int j1 = width_cells / 2 + 3;
  std::ostringstream cfg;
  cfg << "# flood wave along a synthetic valley\n"
      << "dem_path = dem.asc\n"
      << "solver = dg2\n"
      << "max_level = " << max_level << "\n"
      << "end_time = 2400\n"
      << "output_interval = 600\n"
      << "gauge_interval = 10\n"
      << "manning = 0.04\n"
      << "inflow = inflow.csv @ 0 " << j0 << " 3 " << j1 << "\n";
  for (int p = 0; p < 3; ++p)
    cfg << "gauge = " << pit_x[p] << " " << Y / 2 << "\n";
  s.config_text = cfg.str();
  return s;
}

Scenario make_dambreak_1d(int cells, bool closed) {
  if (cells < 100) throw ConfigError("make_dambreak_1d: needs at least 100 cells");
  const double R = 1.0;
  const int rows = 4;
  Scenario s;
  s.name = closed ? "dambreak1d_closed" : "dambreak1d";
  s.dem = vertex_raster(cells, rows, R);
  fill_vertices(s.dem, [](double, double) { return 0.0; });

  const double x_dam = cells * R / 2.0;
  Raster h0 = vertex_raster(cells, rows, R);
  fill_vertices(h0, [&](double x, double) { return x < x_dam ? 1.0 : 0.5; });
  s.extra_rasters.emplace_back("init_h.asc", h0);

  std::ostringstream cfg;
  cfg << "dem_path = dem.asc\n"
      << "solver = dg2\n"
      << "max_level = 2\n"
      << "end_time = 10\n"
      << "output_interval = 10\n"
      << "gauge_interval = 0.5\n"
      << "manning = 0\n"
      << "initial_depth_raster = init_h.asc\n"
      << "boundary_e = " << (closed ? "reflective" : "open") << "\n"
      << "boundary_w = " << (closed ? "reflective" : "open") << "\n"
      << "gauge = " << 0.25 * cells * R << " 2\n"
      << "gauge = " << 0.75 * cells * R << " 2\n";
  s.config_text = cfg.str();
  return s;
}

Scenario make_lake_at_rest(int size, unsigned seed, bool emerged) {
  const double R = 5.0;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);
  const double p1 = phase(rng), p2 = phase(rng), p3 = phase(rng), p4 = phase(rng);
  const double Lx = size * R;

  Scenario s;
  s.name = emerged ? "lake_island" : "lake";
  s.dem = vertex_raster(size, size, R);
  double zmax = -1e300;
  for (int row = 0; row < s.dem.nrows; ++row) {
    for (int col = 0; col < s.dem.ncols; ++col) {
      const double x = s.dem.x_of(col), y = s.dem.y_of(row);
      double v = 1.5 * std::sin(2.0 * kPi * x / Lx + p1) * std::sin(2.0 * kPi * y / Lx + p2) +
                 0.8 * std::sin(14.0 * kPi * x / Lx + p3) * std::cos(10.0 * kPi * y / Lx + p4) +
                 jitter(rng);
      s.dem.at(row, col) = v;
      zmax = std::max(zmax, v);
    }
  }
  // The submerged surface must clear every corner of the piecewise-planar
  // bed representation, not just the raw vertex samples.
  const FieldGrid zg = project_elements(s.dem);
  double plane_max = -1e300;
  for (const PlanarCoeffs& c : zg.cells)
    plane_max = std::max(plane_max, c.c0 + kSqrt3 * (std::abs(c.c1x) + std::abs(c.c1y)));
  const double eta0 = emerged ? zmax - 0.5 : plane_max + 0.5;

  std::ostringstream cfg;
  cfg.precision(17);
  cfg << "dem_path = dem.asc\n"
      << "solver = dg2\n"
      << "max_level = 3\n"
      << "end_time = 100\n"
      << "output_interval = 100\n"
      << "gauge_interval = 10\n"
      << "manning = 0.03\n"
      << "initial_surface = " << eta0 << "\n"
      << "gauge = " << Lx / 2 << " " << Lx / 2 << "\n";
  s.config_text = cfg.str();
  return s;
}

void emit_scenario(const Scenario& s, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_ascii_grid(s.dem, dir + "/dem.asc");
  {
    std::ofstream out(dir + "/scenario.cfg");
    if (!out) throw IoError("cannot write scenario config in " + dir);
    out << s.config_text;
  }
  for (const auto& [name, text] : s.extra_text) {
    std::ofstream out(dir + "/" + name);
    if (!out) throw IoError("cannot write scenario file " + name);
    out << text;
  }
  for (const auto& [name, raster] : s.extra_rasters) write_ascii_grid(raster, dir + "/" + name);
}

}  // namespace floodmra

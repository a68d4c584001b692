#include "floodmra/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "floodmra/errors.hpp"

namespace floodmra {

PlanarCoeffs project_vertices(double z_nw, double z_ne, double z_sw, double z_se) {
  if (!(std::isfinite(z_nw) && std::isfinite(z_ne) && std::isfinite(z_sw) && std::isfinite(z_se)))
    throw DomainError("project_vertices: non-finite vertex value");
  PlanarCoeffs c;
  c.c0 = 0.25 * (z_ne + z_nw + z_se + z_sw);
  c.c1x = (z_ne - z_nw + z_se - z_sw) / (4.0 * kSqrt3);
  c.c1y = (z_ne - z_se + z_nw - z_sw) / (4.0 * kSqrt3);
  return c;
}

double evaluate(const PlanarCoeffs& c, double xc, double yc, double R, double x, double y) {
  if (R <= 0.0) throw DomainError("evaluate: element size must be positive");
  return c.c0 + c.c1x * 2.0 * kSqrt3 * (x - xc) / R + c.c1y * 2.0 * kSqrt3 * (y - yc) / R;
}

double face_limit(const PlanarCoeffs& c, Side s) {
  switch (s) {
    case Side::east: return c.c0 + kSqrt3 * c.c1x;
    case Side::west: return c.c0 - kSqrt3 * c.c1x;
    case Side::north: return c.c0 + kSqrt3 * c.c1y;
    case Side::south: return c.c0 - kSqrt3 * c.c1y;
  }
  return c.c0;
}

double face_point(const PlanarCoeffs& c, Side s, double t, double R) {
  if (R <= 0.0) throw DomainError("face_point: element size must be positive");
  const double tangential = 2.0 * kSqrt3 * t / R;
  switch (s) {
    case Side::east: return c.c0 + kSqrt3 * c.c1x + c.c1y * tangential;
    case Side::west: return c.c0 - kSqrt3 * c.c1x + c.c1y * tangential;
    case Side::north: return c.c0 + kSqrt3 * c.c1y + c.c1x * tangential;
    case Side::south: return c.c0 - kSqrt3 * c.c1y + c.c1x * tangential;
  }
  return c.c0;
}

double nodata_wall_elevation(const Raster& dem) {
  double zmax = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < dem.values.size(); ++k)
    if (dem.values[k] != dem.nodata) zmax = std::max(zmax, dem.values[k]);
  if (!std::isfinite(zmax)) zmax = 0.0;
  return zmax + 100.0;
}

namespace {

// Vertex sample with nodata replaced by the wall elevation.
inline double vertex(const Raster& dem, int row, int col, double wall) {
  const double v = dem.at(row, col);
  return v == dem.nodata ? wall : v;
}

FieldGrid project_grid(const Raster& dem, int nx, int ny) {
  const double wall = nodata_wall_elevation(dem);
  const int n = dem.ncols - 1;  // elements covered by the raster
  const int m = dem.nrows - 1;
  FieldGrid g;
  g.nx = nx;
  g.ny = ny;
  g.R = dem.cellsize;
  g.x0 = dem.xll;
  g.y0 = dem.yll;
  g.cells.resize(static_cast<size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      // Edge-replicate beyond the raster for padded elements.
      const int ie = std::min(i, n - 1);
      const int je = std::min(j, m - 1);
      // Element (ie, je): vertex rows count from the north.
      const int row_s = dem.nrows - 1 - je;
      const int row_n = row_s - 1;
      const double z_sw = vertex(dem, row_s, ie, wall);
      const double z_se = vertex(dem, row_s, ie + 1, wall);
      const double z_nw = vertex(dem, row_n, ie, wall);
      const double z_ne = vertex(dem, row_n, ie + 1, wall);
      g.at(i, j) = project_vertices(z_nw, z_ne, z_sw, z_se);
    }
  }
  return g;
}

}  // namespace

FieldGrid project_elements(const Raster& dem) {
  if (dem.ncols < 2 || dem.nrows < 2)
    throw ConfigError("DEM must have at least 2x2 samples to define elements");
  return project_grid(dem, dem.ncols - 1, dem.nrows - 1);
}

int coarse_blocks(int n_fine, int L) {
  const int step = 1 << L;
  return (n_fine + step - 1) / step;
}

FieldGrid project_raster(const Raster& dem, int L, int* out_M, int* out_N) {
  if (dem.ncols < 2 || dem.nrows < 2)
    throw ConfigError("DEM must have at least 2x2 samples to define elements");
  if (L < 0) throw ConfigError("max_level must be >= 0");
  const int n = dem.ncols - 1;
  const int m = dem.nrows - 1;
  const int M = coarse_blocks(n, L);
  const int N = coarse_blocks(m, L);
  if (out_M) *out_M = M;
  if (out_N) *out_N = N;
  return project_grid(dem, M << L, N << L);
}

}  // namespace floodmra

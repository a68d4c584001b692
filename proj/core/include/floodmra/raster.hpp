#pragma once

#include <string>
#include <vector>

namespace floodmra {

// ESRI ASCII grid. Values are stored row-major with row 0 the northernmost
// row, matching the file layout. xll/yll locate the south-west corner.
struct Raster {
  int ncols = 0;
  int nrows = 0;
  double xll = 0.0;
  double yll = 0.0;
  double cellsize = 1.0;
  double nodata = -9999.0;
  std::vector<double> values;

  double& at(int row, int col) { return values[static_cast<size_t>(row) * ncols + col]; }
  double at(int row, int col) const { return values[static_cast<size_t>(row) * ncols + col]; }

  bool is_nodata(int row, int col) const { return at(row, col) == nodata; }

  // Coordinates of sample (row, col) when samples are treated as points.
  double x_of(int col) const { return xll + col * cellsize; }
  double y_of(int row) const { return yll + (nrows - 1 - row) * cellsize; }

  bool same_geometry(const Raster& o) const {
    return ncols == o.ncols && nrows == o.nrows && xll == o.xll && yll == o.yll &&
           cellsize == o.cellsize;
  }
};

Raster read_ascii_grid(const std::string& path);
void write_ascii_grid(const Raster& r, const std::string& path);

}  // namespace floodmra

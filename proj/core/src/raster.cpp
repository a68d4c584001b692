#include "floodmra/raster.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "floodmra/errors.hpp"

namespace floodmra {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

Raster read_ascii_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open raster file: " + path);

  Raster r;
  bool have[6] = {false, false, false, false, false, false};
  // Header: six keyword/value lines in any order (keywords case-insensitive).
  for (int line_no = 1; line_no <= 6; ++line_no) {
    std::string line;
    if (!std::getline(in, line))
      throw ParseError(path + ": truncated header at line " + std::to_string(line_no));
    std::istringstream ls(line);
    std::string key;
    double val;
    if (!(ls >> key >> val))
      throw ParseError(path + ": malformed header line " + std::to_string(line_no) + ": \"" +
                       line + "\"");
    key = lower(key);
    if (key == "ncols") {
      r.ncols = static_cast<int>(val);
      have[0] = true;
    } else if (key == "nrows") {
      r.nrows = static_cast<int>(val);
      have[1] = true;
    } else if (key == "xllcorner") {
      r.xll = val;
      have[2] = true;
    } else if (key == "yllcorner") {
      r.yll = val;
      have[3] = true;
    } else if (key == "cellsize") {
      r.cellsize = val;
      have[4] = true;
    } else if (key == "nodata_value") {
      r.nodata = val;
      have[5] = true;
    } else {
      throw ParseError(path + ": unknown header keyword at line " + std::to_string(line_no) +
                       ": \"" + key + "\"");
    }
  }
  for (int k = 0; k < 6; ++k)
    if (!have[k]) throw ParseError(path + ": incomplete six-keyword header");
  if (r.ncols < 1 || r.nrows < 1 || r.cellsize <= 0.0)
    throw ParseError(path + ": invalid raster dimensions in header");

  const size_t n = static_cast<size_t>(r.ncols) * r.nrows;
  r.values.reserve(n);
  double v;
  while (in >> v) r.values.push_back(v);
  if (r.values.size() != n)
    throw ParseError(path + ": expected " + std::to_string(n) + " values, found " +
                     std::to_string(r.values.size()));
  return r;
}

void write_ascii_grid(const Raster& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write raster file: " + path);
  out.precision(17);
  out << "ncols " << r.ncols << "\n"
      << "nrows " << r.nrows << "\n"
      << "xllcorner " << r.xll << "\n"
      << "yllcorner " << r.yll << "\n"
      << "cellsize " << r.cellsize << "\n"
      << "NODATA_value " << r.nodata << "\n";
  for (int row = 0; row < r.nrows; ++row) {
    for (int col = 0; col < r.ncols; ++col) {
      if (col) out << ' ';
      out << r.at(row, col);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace floodmra

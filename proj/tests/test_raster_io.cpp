#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "floodmra/errors.hpp"
#include "floodmra/hydrograph.hpp"
#include "floodmra/raster.hpp"

using namespace floodmra;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("read_ascii_grid parses a 2x2 grid top row first") {
  const std::string path = tmp_path("fm_grid2x2.asc");
  write_text(path,
             "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\n"
             "NODATA_value -9999\n1 2\n3 4\n");
  const Raster r = read_ascii_grid(path);
  CHECK(r.ncols == 2);
  CHECK(r.nrows == 2);
  CHECK(r.cellsize == 10.0);
  CHECK(r.values == std::vector<double>{1, 2, 3, 4});
  // Row 0 is the northern row.
  CHECK(r.y_of(0) == 10.0);
  CHECK(r.y_of(1) == 0.0);
}

TEST_CASE("nodata sentinel is preserved") {
  const std::string path = tmp_path("fm_grid_nodata.asc");
  write_text(path,
             "ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
             "NODATA_value -9999\n-9999 5\n");
  const Raster r = read_ascii_grid(path);
  CHECK(r.is_nodata(0, 0));
  CHECK(!r.is_nodata(0, 1));
}

TEST_CASE("header errors name the offending line") {
  const std::string path = tmp_path("fm_grid_bad.asc");
  write_text(path, "ncols 2\nnrows 1\nbogus 3\nyllcorner 0\ncellsize 1\nNODATA_value -9\n1 2\n");
  CHECK_THROWS_AS(read_ascii_grid(path), ParseError);
  try {
    read_ascii_grid(path);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("value count mismatch is a structural error") {
  const std::string path = tmp_path("fm_grid_short.asc");
  write_text(path,
             "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
             "NODATA_value -9999\n1 2 3\n");
  CHECK_THROWS_AS(read_ascii_grid(path), ParseError);
}

TEST_CASE("round trip reproduces values exactly on randomized rasters") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> val(-1e4, 1e4);
  std::uniform_int_distribution<int> dim(1, 9);
  for (int trial = 0; trial < 50; ++trial) {
    Raster r;
    r.ncols = dim(rng);
    r.nrows = dim(rng);
    r.xll = val(rng);
    r.yll = val(rng);
    r.cellsize = std::abs(val(rng)) + 0.5;
    for (int k = 0; k < r.ncols * r.nrows; ++k) r.values.push_back(val(rng));
    const std::string path = tmp_path("fm_grid_rt.asc");
    write_ascii_grid(r, path);
    const Raster back = read_ascii_grid(path);
    REQUIRE(back.values.size() == r.values.size());
    CHECK(back.same_geometry(r));
    for (size_t k = 0; k < r.values.size(); ++k) CHECK(back.values[k] == r.values[k]);
  }
}

TEST_CASE("nodata cells are emitted as the header sentinel") {
  Raster r;
  r.ncols = 2;
  r.nrows = 1;
  r.nodata = -7.0;
  r.values = {-7.0, 3.0};
  const std::string path = tmp_path("fm_grid_sent.asc");
  write_ascii_grid(r, path);
  const Raster back = read_ascii_grid(path);
  CHECK(back.nodata == -7.0);
  CHECK(back.is_nodata(0, 0));
}

TEST_CASE("hydrograph_at interpolates and clamps") {
  Hydrograph h;
  h.samples = {{0.0, 0.0}, {3600.0, 3000.0}};
  CHECK(hydrograph_at(h, 1800.0) == doctest::Approx(1500.0).epsilon(1e-14));
  CHECK(hydrograph_at(h, -5.0) == 0.0);
  CHECK(hydrograph_at(h, 7200.0) == 3000.0);
  CHECK(hydrograph_at(h, 3600.0) == 3000.0);
  CHECK(hydrograph_at(h, 0.0) == 0.0);
}

TEST_CASE("hydrograph interpolation is monotone between samples and continuous") {
  Hydrograph h;
  h.samples = {{0, 1}, {10, 5}, {20, 2}};
  double prev = hydrograph_at(h, 0.0);
  for (double t = 0.25; t <= 10.0; t += 0.25) {
    const double q = hydrograph_at(h, t);
    CHECK(q >= prev - 1e-12);
    prev = q;
  }
  for (double t = 0.0; t <= 20.0; t += 0.1) {
    const double a = hydrograph_at(h, t);
    const double b = hydrograph_at(h, t + 1e-9);
    CHECK(std::abs(a - b) < 1e-6);
  }
}

TEST_CASE("empty hydrograph is a configuration error") {
  Hydrograph h;
  CHECK_THROWS_AS(hydrograph_at(h, 0.0), ConfigError);
}

TEST_CASE("hydrograph csv parser rejects non-increasing times") {
  const std::string path = tmp_path("fm_hydro_bad.csv");
  write_text(path, "t,Q\n0,1\n0,2\n");
  CHECK_THROWS_AS(read_hydrograph_csv(path), ParseError);
}

#pragma once

#include <string>
#include <vector>

#include "floodmra/raster.hpp"

namespace floodmra {

// One sampled time series (strictly increasing timestamps).
struct GaugeSeries {
  std::vector<double> t;
  std::vector<double> v;
};

// Root-mean-square discrepancy; `test` is resampled onto `ref`'s timestamps
// by linear interpolation over the overlapping range.
double rmse(const GaugeSeries& test, const GaugeSeries& ref);

struct ExtentMetrics {
  double hit_rate = 0.0;     // H, best 1
  double false_alarm = 0.0;  // F, best 0
  double csi = 0.0;          // C, best 1
  long long hits = 0, misses = 0, false_alarms = 0;
};

// A cell is inundated iff depth >= wet_threshold; nodata cells in either
// raster are excluded.
ExtentMetrics extent_metrics(const Raster& test, const Raster& ref, double wet_threshold);

struct ReportRow {
  std::string kind;  // "rmse" | "extent"
  std::string id;    // e.g. "gauge_0:h" or "depth_0003"
  std::string metric;
  double value = 0.0;
  bool absent = false;
};

struct CompareReport {
  std::vector<ReportRow> rows;
};

// Pairs gauge CSVs and depth rasters between two completed run directories.
// Missing counterparts are reported, not fatal.
CompareReport compare_runs(const std::string& test_dir, const std::string& ref_dir,
                           double wet_threshold);

std::string format_report(const CompareReport& rep);
void write_report_csv(const CompareReport& rep, const std::string& path);

// Columns of a `gauge_*.csv` file: h, eta, u, v plus derived speed.
struct GaugeTable {
  GaugeSeries h, eta, u, v, speed;
};
GaugeTable read_gauge_csv(const std::string& path);

}  // namespace floodmra

#include "floodmra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "floodmra/errors.hpp"

namespace floodmra {

namespace {

struct MetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double interpolate(const GaugeSeries& s, double t) {
  auto hi = std::upper_bound(s.t.begin(), s.t.end(), t);
  if (hi == s.t.begin()) return s.v.front();
  if (hi == s.t.end()) return s.v.back();
  const size_t k = static_cast<size_t>(hi - s.t.begin());
  const double t0 = s.t[k - 1], t1 = s.t[k];
  const double w = (t - t0) / (t1 - t0);
  return s.v[k - 1] + w * (s.v[k] - s.v[k - 1]);
}

}  // namespace

double rmse(const GaugeSeries& test, const GaugeSeries& ref) {
  if (ref.t.empty() || test.t.empty()) throw ParseError("rmse: empty series");
  const double lo = std::max(test.t.front(), ref.t.front());
  const double hi = std::min(test.t.back(), ref.t.back());
  double sum = 0.0;
  long long n = 0;
  for (size_t k = 0; k < ref.t.size(); ++k) {
    if (ref.t[k] < lo || ref.t[k] > hi) continue;
    const double d = interpolate(test, ref.t[k]) - ref.v[k];
    sum += d * d;
    ++n;
  }
  if (n == 0) throw ParseError("rmse: series do not overlap in time");
  return std::sqrt(sum / double(n));
}

ExtentMetrics extent_metrics(const Raster& test, const Raster& ref, double wet_threshold) {
  if (!test.same_geometry(ref))
    throw ParseError("extent_metrics: raster geometries do not match");
  ExtentMetrics m;
  for (int row = 0; row < ref.nrows; ++row) {
    for (int col = 0; col < ref.ncols; ++col) {
      if (test.is_nodata(row, col) || ref.is_nodata(row, col)) continue;
      const bool wt = test.at(row, col) >= wet_threshold;
      const bool wr = ref.at(row, col) >= wet_threshold;
      if (wt && wr)
        ++m.hits;
      else if (!wt && wr)
        ++m.misses;
      else if (wt && !wr)
        ++m.false_alarms;
    }
  }
  m.hit_rate = (m.hits + m.misses) > 0 ? double(m.hits) / double(m.hits + m.misses) : 1.0;
  m.false_alarm =
      (m.hits + m.false_alarms) > 0 ? double(m.false_alarms) / double(m.hits + m.false_alarms)
                                    : 0.0;
  const long long denom = m.hits + m.misses + m.false_alarms;
  m.csi = denom > 0 ? double(m.hits) / double(denom) : 1.0;
  return m;
}

GaugeTable read_gauge_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open gauge file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty gauge file");
  GaugeTable g;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double t, h, eta, u, v;
    if (!(ls >> t >> h >> eta >> u >> v)) throw ParseError(path + ": malformed gauge row");
    g.h.t.push_back(t);
    g.h.v.push_back(h);
    g.eta.t.push_back(t);
    g.eta.v.push_back(eta);
    g.u.t.push_back(t);
    g.u.v.push_back(u);
    g.v.t.push_back(t);
    g.v.v.push_back(v);
    g.speed.t.push_back(t);
    g.speed.v.push_back(std::sqrt(u * u + v * v));
  }
  return g;
}

CompareReport compare_runs(const std::string& test_dir, const std::string& ref_dir,
                           double wet_threshold) {
  namespace fs = std::filesystem;
  CompareReport rep;
  if (!fs::is_directory(test_dir) || !fs::is_directory(ref_dir))
    throw IoError("compare_runs: both arguments must be run directories");

  std::set<std::string> ref_files;
  for (const auto& e : fs::directory_iterator(ref_dir))
    if (e.is_regular_file()) ref_files.insert(e.path().filename().string());

  for (const std::string& name : ref_files) {
    if (name.rfind("gauge_", 0) == 0 && name.size() > 4 &&
        name.substr(name.size() - 4) == ".csv") {
      const std::string stem = name.substr(0, name.size() - 4);
      const fs::path test_path = fs::path(test_dir) / name;
      if (!fs::exists(test_path)) {
        rep.rows.push_back({"rmse", stem, "", 0.0, true});
        continue;
      }
      const GaugeTable ref = read_gauge_csv((fs::path(ref_dir) / name).string());
      const GaugeTable test = read_gauge_csv(test_path.string());
      rep.rows.push_back({"rmse", stem, "h", rmse(test.h, ref.h), false});
      rep.rows.push_back({"rmse", stem, "eta", rmse(test.eta, ref.eta), false});
      rep.rows.push_back({"rmse", stem, "speed", rmse(test.speed, ref.speed), false});
    } else if (name.rfind("depth_", 0) == 0 && name.size() > 4 &&
               name.substr(name.size() - 4) == ".asc") {
      const std::string stem = name.substr(0, name.size() - 4);
      const fs::path test_path = fs::path(test_dir) / name;
      if (!fs::exists(test_path)) {
        rep.rows.push_back({"extent", stem, "", 0.0, true});
        continue;
      }
      const Raster ref = read_ascii_grid((fs::path(ref_dir) / name).string());
      const Raster test = read_ascii_grid(test_path.string());
      const ExtentMetrics m = extent_metrics(test, ref, wet_threshold);
      rep.rows.push_back({"extent", stem, "H", m.hit_rate, false});
      rep.rows.push_back({"extent", stem, "F", m.false_alarm, false});
      rep.rows.push_back({"extent", stem, "C", m.csi, false});
    }
  }
  if (rep.rows.empty()) throw ConfigError("compare_runs: no gauge or depth outputs found");
  return rep;
}

std::string format_report(const CompareReport& rep) {
  std::ostringstream out;
  out << "kind    id                metric  value\n";
  for (const ReportRow& r : rep.rows) {
    char buf[160];
    if (r.absent)
      std::snprintf(buf, sizeof(buf), "%-7s %-17s %-7s absent\n", r.kind.c_str(), r.id.c_str(),
                    "-");
    else
      std::snprintf(buf, sizeof(buf), "%-7s %-17s %-7s %.6g\n", r.kind.c_str(), r.id.c_str(),
                    r.metric.c_str(), r.value);
    out << buf;
  }
  return out.str();
}

void write_report_csv(const CompareReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report: " + path);
  out.precision(17);
  out << "kind,id,metric,value\n";
  for (const ReportRow& r : rep.rows) {
    out << r.kind << ',' << r.id << ',' << r.metric << ',';
    if (r.absent)
      out << "absent";
    else
      out << r.value;
    out << '\n';
  }
}

}  // namespace floodmra

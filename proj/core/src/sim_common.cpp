#include "floodmra/sim_common.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include "floodmra/errors.hpp"

namespace floodmra {

void parallel_for(int64_t n, int threads, const std::function<void(int64_t, int64_t)>& body) {
  if (n <= 0) return;
  if (threads <= 1 || n < 2 * threads) {
    body(0, n);
    return;
  }
  const int64_t chunk = (n + threads - 1) / threads;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    const int64_t lo = w * chunk;
    const int64_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

void friction_update(double h0, PlanarCoeffs& qx, PlanarCoeffs& qy, double n_manning, double g,
                     double h_dry, double dt) {
  if (h0 <= h_dry) {
    qx = {};
    qy = {};
    return;
  }
  if (n_manning <= 0.0) return;
  const double u = qx.c0 / h0;
  const double v = qy.c0 / h0;
  const double speed = std::sqrt(u * u + v * v);
  if (speed == 0.0) return;
  const double cf = g * n_manning * n_manning / std::cbrt(h0);
  const double denom = 1.0 + dt * cf * speed / h0;
  qx.c0 /= denom;
  qy.c0 /= denom;
}

double EventClock::next_event() const {
  double e = end_time;
  if (output_interval > 0.0) e = std::min(e, next_output * output_interval);
  if (gauge_interval > 0.0) e = std::min(e, next_gauge * gauge_interval);
  return e;
}

double EventClock::clip(double dt) const {
  const double to_event = next_event() - now;
  return std::min(dt, std::max(to_event, 0.0));
}

namespace {
inline bool reached(double now, double target) {
  return now >= target - 1e-9 * std::max(1.0, target);
}
}  // namespace

bool EventClock::output_due() {
  if (output_interval <= 0.0) return false;
  if (reached(now, next_output * output_interval)) {
    ++next_output;
    return true;
  }
  return false;
}

bool EventClock::gauge_due() {
  if (gauge_interval <= 0.0) return false;
  if (reached(now, next_gauge * gauge_interval)) {
    ++next_gauge;
    return true;
  }
  return false;
}

void write_gauge_csv(const GaugeRecord& rec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write gauge file: " + path);
  out.precision(17);
  out << "t,h,eta,u,v\n";
  for (size_t k = 0; k < rec.t.size(); ++k) {
    out << rec.t[k] << ',' << rec.v[k].h << ',' << rec.v[k].eta << ',' << rec.v[k].u << ','
        << rec.v[k].v << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_run_stats(const RunStats& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write stats file: " + path);
  out.precision(17);
  out << "solver = " << s.solver << "\n"
      << "steps = " << s.steps << "\n"
      << "dt_min = " << (s.steps ? s.dt_min : 0.0) << "\n"
      << "dt_max = " << s.dt_max << "\n"
      << "wall_seconds = " << s.wall_seconds << "\n"
      << "volume_initial = " << s.volume_initial << "\n"
      << "volume_final = " << s.volume_final << "\n"
      << "volume_inflow = " << s.volume_inflow << "\n"
      << "mass_error_rel = " << s.mass_error_rel << "\n";
  if (s.blew_up) out << "blow_up_time = " << s.blow_up_time << "\n";
  if (s.leaf_count > 0) {
    out << "leaf_count = " << s.leaf_count << "\n";
    for (size_t lv = 0; lv < s.leaf_count_per_level.size(); ++lv)
      out << "leaves_level_" << lv << " = " << s.leaf_count_per_level[lv] << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<uint8_t> element_nodata_mask(const Raster& dem) {
  const int nx = dem.ncols - 1;
  const int ny = dem.nrows - 1;
  std::vector<uint8_t> mask(static_cast<size_t>(nx) * ny, 0);
  for (int j = 0; j < ny; ++j) {
    const int row_s = dem.nrows - 1 - j;
    for (int i = 0; i < nx; ++i) {
      const bool bad = dem.is_nodata(row_s, i) || dem.is_nodata(row_s, i + 1) ||
                       dem.is_nodata(row_s - 1, i) || dem.is_nodata(row_s - 1, i + 1);
      mask[static_cast<size_t>(j) * nx + i] = bad ? 1 : 0;
    }
  }
  return mask;
}

Raster crop_and_mask(const Raster& full, int nx, int ny, const std::vector<uint8_t>& mask) {
  Raster out;
  out.ncols = nx;
  out.nrows = ny;
  out.xll = full.xll;
  out.yll = full.yll;
  out.cellsize = full.cellsize;
  out.nodata = full.nodata;
  out.values.resize(static_cast<size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    const int row_out = ny - 1 - j;
    const int row_in = full.nrows - 1 - j;
    for (int i = 0; i < nx; ++i) {
      const bool bad = !mask.empty() && mask[static_cast<size_t>(j) * nx + i];
      out.at(row_out, i) = bad ? out.nodata : full.at(row_in, i);
    }
  }
  return out;
}

}  // namespace floodmra

#include "floodmra/run.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "floodmra/detail_tree.hpp"
#include "floodmra/errors.hpp"
#include "floodmra/solver_adaptive.hpp"
#include "floodmra/solver_nonuniform.hpp"
#include "floodmra/solver_uniform.hpp"

namespace floodmra {

namespace {

std::string indexed_name(const char* stem, int idx, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04d.%s", stem, idx, ext);
  return buf;
}

template <typename Sim>
int64_t sim_leaf_count(const Sim&) {
  return 0;
}
int64_t sim_leaf_count(const NonUniformSim& s) {
  return static_cast<int64_t>(s.grid.leaves.size());
}
int64_t sim_leaf_count(const AdaptiveSim& s) {
  return static_cast<int64_t>(s.sim.grid.leaves.size());
}

template <typename Sim>
RunResult drive(Sim& sim, const ScenarioConfig& cfg, const Raster& dem) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const std::string dir = cfg.output_dir + "/";

  const std::vector<uint8_t> mask = element_nodata_mask(dem);
  const int out_nx = dem.ncols - 1;
  const int out_ny = dem.nrows - 1;

  RunResult res;
  res.output_dir = cfg.output_dir;
  RunStats& st = res.stats;
  st.solver = solver_name(cfg.solver);
  st.volume_initial = sim.volume();

  EventClock clock;
  clock.end_time = cfg.end_time;
  clock.output_interval = cfg.output_interval;
  clock.gauge_interval = cfg.gauge_interval;

  std::vector<GaugeRecord> gauges(cfg.gauges.size());
  auto sample_gauges = [&]() {
    for (size_t k = 0; k < cfg.gauges.size(); ++k) {
      gauges[k].t.push_back(clock.now);
      gauges[k].v.push_back(sim.sample_gauge(cfg.gauges[k].x, cfg.gauges[k].y));
    }
  };
  auto emit_rasters = [&](int idx) {
    write_ascii_grid(crop_and_mask(sim.depth_raster(), out_nx, out_ny, mask),
                     dir + indexed_name("depth", idx, "asc"));
    write_ascii_grid(crop_and_mask(sim.qx_raster(), out_nx, out_ny, mask),
                     dir + indexed_name("qx", idx, "asc"));
    write_ascii_grid(crop_and_mask(sim.qy_raster(), out_nx, out_ny, mask),
                     dir + indexed_name("qy", idx, "asc"));
    if constexpr (requires { sim.sim.grid; }) {
      NonUniformGrid g{sim.sim.grid, sim.sim.z};
      write_nug(g, dir + indexed_name("grid", idx, "nug"));
    }
  };

  sample_gauges();
  emit_rasters(res.outputs_written++);

  const auto wall_start = std::chrono::steady_clock::now();
  while (!clock.finished()) {
    double dt = clock.clip(sim.compute_dt());
    if (!(dt > 0.0)) dt = clock.clip(clock.end_time);  // fully dry: jump to next event
    sim.step(dt, cfg.threads);
    st.volume_inflow += sim.apply_inflows(clock.now, dt);
    clock.advance(dt);
    ++st.steps;
    st.dt_min = std::min(st.dt_min, dt);
    st.dt_max = std::max(st.dt_max, dt);

    if constexpr (requires { sim.adapt(0.0); }) {
      if (sim.steps_since_adapt >= sim.adapt_every && !clock.finished()) {
        sim.adapt(clock.now);
        sim.steps_since_adapt = 0;
      }
    }

    double bx = 0, by = 0;
    if (!sim.finite_state(&bx, &by)) {
      st.blew_up = true;
      st.blow_up_time = clock.now;
      st.volume_final = sim.volume();
      write_run_stats(st, dir + "stats.txt");
      char msg[160];
      std::snprintf(msg, sizeof(msg), "solver state is non-finite at t=%.6g near (%.6g, %.6g)",
                    clock.now, bx, by);
      throw BlowUpError(msg, clock.now);
    }

    if (clock.gauge_due()) sample_gauges();
    if (clock.output_due()) emit_rasters(res.outputs_written++);
  }
  const auto wall_end = std::chrono::steady_clock::now();
  st.wall_seconds = std::chrono::duration<double>(wall_end - wall_start).count();

  // End time need not be a multiple of the sampling intervals.
  if (!gauges.empty() && (gauges[0].t.empty() || gauges[0].t.back() < clock.now))
    sample_gauges();

  for (size_t k = 0; k < gauges.size(); ++k)
    write_gauge_csv(gauges[k], dir + "gauge_" + std::to_string(k) + ".csv");

  if constexpr (requires { sim.element_log; }) {
    std::ofstream out(dir + "elements.csv");
    out.precision(17);
    out << "t,leaf_count\n";
    for (const auto& [t, n] : sim.element_log) out << t << ',' << n << '\n';
  }

  st.volume_final = sim.volume();
  const double expect = st.volume_initial + st.volume_inflow;
  st.mass_error_rel =
      std::abs(st.volume_final - expect) / std::max(1e-12, std::abs(expect));
  st.leaf_count = sim_leaf_count(sim);
  if constexpr (requires { sim.sim.grid; }) {
    st.leaf_count_per_level = grid_stats(sim.sim.grid).count_per_level;
  } else if constexpr (requires { sim.grid; }) {
    st.leaf_count_per_level = grid_stats(sim.grid).count_per_level;
  }
  write_run_stats(st, dir + "stats.txt");
  return res;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
  const Raster dem = read_ascii_grid(cfg.dem_path);

  if (solver_is_adaptive(cfg.solver)) {
    AdaptiveSim sim = make_adaptive_sim(cfg, dem);
    return drive(sim, cfg, dem);
  }
  if (cfg.grid_mode == GridMode::nonuniform || !cfg.grid_file.empty()) {
    NonUniformGrid nug;
    if (!cfg.grid_file.empty()) {
      nug = read_nug(cfg.grid_file);
    } else {
      nug = generate_static_grid(dem, cfg.epsilon, cfg.max_level, true, WaveletKind::mw);
    }
    NonUniformSim sim = make_nonuniform_sim(cfg, dem, nug);
    return drive(sim, cfg, dem);
  }
  UniformSim sim = make_uniform_sim(cfg, dem);
  return drive(sim, cfg, dem);
}

}  // namespace floodmra

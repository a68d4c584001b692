#pragma once

#include <optional>
#include <vector>

#include "floodmra/detail_tree.hpp"
#include "floodmra/solver_nonuniform.hpp"

namespace floodmra {

// MWDG2 / HWFV1: encode -> threshold -> decode of flow and topography every
// adapt_every steps, with the non-uniform scheme advancing the solution on
// the resulting graded leaf set. Topography decodes from an immutable
// reference tree so it is exact on every leaf at all times; flow details
// discarded by thresholding decode as zeros when a region refines again.
struct AdaptiveSim {
  NonUniformSim sim;
  DetailTree ztree;  // reference topography details + per-adapt flags
  WaveletKind kind = WaveletKind::mw;
  double eps = 1e-3;
  int adapt_every = 1;
  int64_t steps_since_adapt = 0;
  std::vector<std::pair<double, int64_t>> element_log;  // (t, leaf count)

  // Rebuilds the leaf set from the current flow + topography details and
  // transfers the flow coefficients onto it.
  void adapt(double t_now);

  double compute_dt() const { return sim.compute_dt(); }
  void step(double dt, int threads);
  double apply_inflows(double t, double dt) { return sim.apply_inflows(t, dt); }
  double volume() const { return sim.volume(); }
  bool finite_state(double* x = nullptr, double* y = nullptr) const {
    return sim.finite_state(x, y);
  }
  GaugeValue sample_gauge(double x, double y) const { return sim.sample_gauge(x, y); }
  Raster depth_raster() const { return sim.depth_raster(); }
  Raster qx_raster() const { return sim.qx_raster(); }
  Raster qy_raster() const { return sim.qy_raster(); }

 private:
  struct LevelFlow {
    std::vector<FlowCoeffs> scaling;
    std::vector<DetailTriple> dh, dqx, dqy;
    std::vector<uint8_t> known;  // node at or above the current leaves
  };
  struct RawInflow {
    Hydrograph hydro;
    int i0, j0, i1, j1;
  };
  std::vector<LevelFlow> lvl_;
  std::vector<RawInflow> raw_inflows_;
  double manning_value_ = 0.0;
  std::optional<Raster> manning_raster_;

  void encode_up();
  void flag(double flow_norm_h, double flow_norm_qx, double flow_norm_qy);
  void buffer_ring();
  std::vector<FlowCoeffs> transfer(const QuadGrid& new_grid) const;
  void remap_after_adapt();

  friend AdaptiveSim make_adaptive_sim(const ScenarioConfig& cfg, const Raster& dem);
};

// cfg.solver must be mwdg2 or hwfv1; the initial leaf set comes from an
// adapt pass over the level-L projection of the initial condition.
AdaptiveSim make_adaptive_sim(const ScenarioConfig& cfg, const Raster& dem);

}  // namespace floodmra

#pragma once

#include <unordered_map>
#include <vector>

#include "floodmra/config.hpp"
#include "floodmra/hll.hpp"
#include "floodmra/quadgrid.hpp"
#include "floodmra/sim_common.hpp"
#include "floodmra/wavelets.hpp"

namespace floodmra {

// DG2/FV1/ACC on a static graded non-uniform grid. Non-homogeneous faces are
// handled per fine sub-face; the coarse side supplies its planar expansion
// evaluated at the sub-face centre, and receives the length-weighted flux sum
// so mass exchange across every face is exactly antisymmetric.
struct NonUniformSim {
  SolverKind scheme = SolverKind::dg2;  // dg2 | fv1 | acc
  QuadGrid grid;
  FaceLists faces;
  double g = 9.80665, h_dry = 1e-6, courant = 0.33;
  std::array<BoundaryKind, 4> bc{};

  std::vector<PlanarCoeffs> z;
  std::vector<FlowCoeffs> u;
  std::vector<double> nman;
  std::vector<ResolvedInflow> inflows;

  // When set (adaptive solvers), the pairing state for a coarse leaf against
  // finer neighbours comes from encoding the fine siblings to the leaf's own
  // scale instead of the sub-face aggregate.
  const FilterBank* encode_pairing = nullptr;

  // ACC per-segment discharges, persistent across steps.
  std::vector<double> acc_q, acc_qb;

  void rebuild_topology();  // faces + ACC storage after leaves change

  double compute_dt() const;
  void step(double dt, int threads);
  double apply_inflows(double t, double dt);
  double volume() const;
  bool finite_state(double* bad_x = nullptr, double* bad_y = nullptr) const;

  GaugeValue sample_gauge(double x, double y) const;
  Raster depth_raster() const;  // fine-grid sample
  Raster qx_raster() const;
  Raster qy_raster() const;

  void positivity(std::vector<FlowCoeffs>& state, int threads) const;

 private:
  struct SegState {
    Flux3 flux;
    double z_star = 0.0;
    double h_star_left = 0.0, h_star_right = 0.0;
  };
  struct SideEff {
    double h_star = 0.0, qx_star = 0.0, qy_star = 0.0, z_star = 0.0, z_dag = 0.0;
  };
  struct DirMod {
    double h0 = 0.0, h1 = 0.0, qx0 = 0.0, qx1 = 0.0, qy0 = 0.0, qy1 = 0.0, z1 = 0.0;
  };

  std::vector<SegState> seg_;
  std::vector<SideEff> side_;  // 4 per leaf
  std::vector<FlowCoeffs> rate_, stage_;
  std::unordered_map<uint64_t, FlowCoeffs> encode_cache_;

  struct PointState {
    double h, qx, qy, z, eta, u, v;
  };
  PointState limit_at(const std::vector<FlowCoeffs>& state, int leaf, Side s, double x,
                      double y) const;
  FlowCoeffs region_coeffs(const std::vector<FlowCoeffs>& state, int level, int i, int j) const;
  PlanarCoeffs region_topo(int level, int i, int j) const;

  void segment_states(const std::vector<FlowCoeffs>& state, int threads);
  void side_effective(const std::vector<FlowCoeffs>& state, int threads);
  void assemble(const std::vector<FlowCoeffs>& state, int threads);
  void step_rk(double dt, int threads);
  void step_acc(double dt, int threads);
};

// Restrict a full level-L flow field to the grid's leaves by recursive
// encoding (exact element means).
std::vector<FlowCoeffs> restrict_flow_to_leaves(const QuadGrid& grid,
                                                const std::vector<FlowCoeffs>& fine,
                                                const FilterBank& fb);

NonUniformSim make_nonuniform_sim(const ScenarioConfig& cfg, const Raster& dem,
                                  const NonUniformGrid& nug);

}  // namespace floodmra

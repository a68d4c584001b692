#pragma once

#include <array>
#include <vector>

#include "floodmra/config.hpp"
#include "floodmra/field.hpp"
#include "floodmra/hll.hpp"
#include "floodmra/sim_common.hpp"

namespace floodmra {

// Raster-based solver on the uniform element grid. Element (i, j) has index
// j*nx + i with j counting north from the SW corner.
struct UniformSim {
  SolverKind kind = SolverKind::dg2;
  int nx = 0, ny = 0;
  double R = 1.0, x0 = 0.0, y0 = 0.0;
  double g = 9.80665, h_dry = 1e-6, courant = 0.33;
  std::array<BoundaryKind, 4> bc{};

  std::vector<PlanarCoeffs> z;
  std::vector<FlowCoeffs> u;
  std::vector<double> nman;
  std::vector<ResolvedInflow> inflows;

  // ACC face discharges, persistent across steps.
  std::vector<double> acc_qx;  // (nx+1) * ny
  std::vector<double> acc_qy;  // nx * (ny+1)

  size_t cell(int i, int j) const { return static_cast<size_t>(j) * nx + i; }
  double xc(int i) const { return x0 + (i + 0.5) * R; }
  double yc(int j) const { return y0 + (j + 0.5) * R; }

  double compute_dt() const;
  void step(double dt, int threads);
  double apply_inflows(double t, double dt);  // returns added volume
  double volume() const;
  bool finite_state(double* bad_x = nullptr, double* bad_y = nullptr) const;

  GaugeValue sample_gauge(double x, double y) const;
  Raster depth_raster() const;
  Raster qx_raster() const;
  Raster qy_raster() const;

  void positivity(std::vector<FlowCoeffs>& state, int threads) const;

 private:
  // workspaces
  struct SideState {
    double h = 0.0, qx = 0.0, qy = 0.0;
  };
  struct DirMod {
    double h0 = 0.0, h1 = 0.0, qx0 = 0.0, qx1 = 0.0, qy0 = 0.0, qy1 = 0.0, z1 = 0.0;
  };
  std::vector<SideState> star_e_, star_w_, star_n_, star_s_;
  std::vector<DirMod> mod_x_, mod_y_;
  std::vector<Flux3> fx_, fy_;
  std::vector<FlowCoeffs> rate_, stage_;

  void revise_faces(const std::vector<FlowCoeffs>& state, int threads);
  void fluxes(int threads);
  void assemble_dg2(const std::vector<FlowCoeffs>& state, int threads);
  void assemble_fv1(int threads);
  void step_rk(double dt, int threads);
  void step_acc(double dt, int threads);
};

UniformSim make_uniform_sim(const ScenarioConfig& cfg, const Raster& dem);

// Initial flow coefficients for one element given its topography plane.
FlowCoeffs flow_from_surface(const PlanarCoeffs& z, double eta0);

}  // namespace floodmra

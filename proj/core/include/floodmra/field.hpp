#pragma once

#include <cmath>
#include <vector>

#include "floodmra/config.hpp"
#include "floodmra/raster.hpp"

namespace floodmra {

inline constexpr double kSqrt3 = 1.7320508075688772;

// One scalar field on one element in the scaled local Legendre basis
// [1, 2*sqrt(3)*(x-xc)/R, 2*sqrt(3)*(y-yc)/R]: an average plus two slopes.
struct PlanarCoeffs {
  double c0 = 0.0;
  double c1x = 0.0;
  double c1y = 0.0;

  PlanarCoeffs() = default;
  PlanarCoeffs(double a, double bx, double by) : c0(a), c1x(bx), c1y(by) {}

  PlanarCoeffs& operator+=(const PlanarCoeffs& o) {
    c0 += o.c0;
    c1x += o.c1x;
    c1y += o.c1y;
    return *this;
  }
  PlanarCoeffs& operator-=(const PlanarCoeffs& o) {
    c0 -= o.c0;
    c1x -= o.c1x;
    c1y -= o.c1y;
    return *this;
  }
  PlanarCoeffs& operator*=(double s) {
    c0 *= s;
    c1x *= s;
    c1y *= s;
    return *this;
  }
  friend PlanarCoeffs operator+(PlanarCoeffs a, const PlanarCoeffs& b) { return a += b; }
  friend PlanarCoeffs operator-(PlanarCoeffs a, const PlanarCoeffs& b) { return a -= b; }
  friend PlanarCoeffs operator*(double s, PlanarCoeffs a) { return a *= s; }

  bool finite() const { return std::isfinite(c0) && std::isfinite(c1x) && std::isfinite(c1y); }
};

// Per-element flow coefficients: depth and the two unit-width discharges.
struct FlowCoeffs {
  PlanarCoeffs h;   // m
  PlanarCoeffs qx;  // m^2/s
  PlanarCoeffs qy;  // m^2/s

  FlowCoeffs& operator+=(const FlowCoeffs& o) {
    h += o.h;
    qx += o.qx;
    qy += o.qy;
    return *this;
  }
  FlowCoeffs& operator*=(double s) {
    h *= s;
    qx *= s;
    qy *= s;
    return *this;
  }
  bool finite() const { return h.finite() && qx.finite() && qy.finite(); }
};

// Eq.-of-a-plane coefficients from the four corner samples.
PlanarCoeffs project_vertices(double z_nw, double z_ne, double z_sw, double z_se);

// Local solution value at (x, y) in the element centred at (xc, yc) with size R.
double evaluate(const PlanarCoeffs& c, double xc, double yc, double R, double x, double y);

// Limit of the local solution at a face centre (E/W: c0 +/- sqrt(3) c1x, N/S with c1y).
double face_limit(const PlanarCoeffs& c, Side s);

// Limit at a point on a face offset from its centre by `t` metres along the
// face, for an element of size R.
double face_point(const PlanarCoeffs& c, Side s, double t, double R);

// A uniform grid of per-element planar coefficients. Element (i, j) has its
// SW corner at (x0 + i R, y0 + j R); i runs east, j runs north.
struct FieldGrid {
  int nx = 0, ny = 0;
  double R = 1.0;
  double x0 = 0.0, y0 = 0.0;
  std::vector<PlanarCoeffs> cells;

  PlanarCoeffs& at(int i, int j) { return cells[static_cast<size_t>(j) * nx + i]; }
  const PlanarCoeffs& at(int i, int j) const { return cells[static_cast<size_t>(j) * nx + i]; }
  double xc(int i) const { return x0 + (i + 0.5) * R; }
  double yc(int j) const { return y0 + (j + 0.5) * R; }
};

// DEM samples are point values at element corners: an (n+1) x (m+1) raster
// covers an n x m element grid. nodata samples become high walls.
FieldGrid project_elements(const Raster& dem);

// Like project_elements but pads the element grid on the north/east with
// edge-replicated elevation so dimensions become (M 2^L) x (N 2^L).
FieldGrid project_raster(const Raster& dem, int L, int* out_M = nullptr, int* out_N = nullptr);

// Coarsest-grid dimensions after padding: M = ceil(n / 2^L).
int coarse_blocks(int n_fine, int L);

double nodata_wall_elevation(const Raster& dem);

}  // namespace floodmra

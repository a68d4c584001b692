#pragma once

namespace floodmra {

// Flux of (h, q_normal, q_tangential) through a face whose normal points
// from the left state to the right state.
struct Flux3 {
  double mass = 0.0;   // m^2/s
  double mom_n = 0.0;  // m^3/s^2
  double mom_t = 0.0;  // m^3/s^2
};

// HLL approximate Riemann flux with two-rarefaction wave-speed estimates and
// dry-front characteristics on dry sides; both sides dry gives zero flux.
// Inputs are the face-normal-rotated states; depths must be non-negative.
Flux3 hll_flux(double h_l, double qn_l, double qt_l, double h_r, double qn_r, double qt_r,
               double g, double h_dry);

}  // namespace floodmra

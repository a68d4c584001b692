#include "floodmra/hll.hpp"

#include <algorithm>
#include <cmath>

#include "floodmra/errors.hpp"

namespace floodmra {

Flux3 hll_flux(double h_l, double qn_l, double qt_l, double h_r, double qn_r, double qt_r,
               double g, double h_dry) {
  if (h_l < 0.0 || h_r < 0.0) throw DomainError("hll_flux: negative depth");
  const bool dry_l = h_l <= h_dry;
  const bool dry_r = h_r <= h_dry;
  if (dry_l && dry_r) return {};

  const double u_l = dry_l ? 0.0 : qn_l / h_l;
  const double v_l = dry_l ? 0.0 : qt_l / h_l;
  const double u_r = dry_r ? 0.0 : qn_r / h_r;
  const double v_r = dry_r ? 0.0 : qt_r / h_r;
  const double a_l = std::sqrt(g * std::max(h_l, 0.0));
  const double a_r = std::sqrt(g * std::max(h_r, 0.0));

  double s_l, s_r;
  if (dry_l) {
    s_l = u_r - 2.0 * a_r;
    s_r = u_r + a_r;
  } else if (dry_r) {
    s_l = u_l - a_l;
    s_r = u_l + 2.0 * a_l;
  } else {
    const double u_star = 0.5 * (u_l + u_r) + a_l - a_r;
    const double a_star = 0.5 * (a_l + a_r) + 0.25 * (u_l - u_r);
    s_l = std::min(u_l - a_l, u_star - a_star);
    s_r = std::max(u_r + a_r, u_star + a_star);
  }

  const double f_mass_l = dry_l ? 0.0 : qn_l;
  const double f_mom_l = dry_l ? 0.5 * g * h_l * h_l : qn_l * u_l + 0.5 * g * h_l * h_l;
  const double f_mass_r = dry_r ? 0.0 : qn_r;
  const double f_mom_r = dry_r ? 0.5 * g * h_r * h_r : qn_r * u_r + 0.5 * g * h_r * h_r;

  Flux3 f;
  if (s_l >= 0.0) {
    f.mass = f_mass_l;
    f.mom_n = f_mom_l;
  } else if (s_r <= 0.0) {
    f.mass = f_mass_r;
    f.mom_n = f_mom_r;
  } else {
    const double inv = 1.0 / (s_r - s_l);
    f.mass = (s_r * f_mass_l - s_l * f_mass_r + s_l * s_r * (h_r - h_l)) * inv;
    f.mom_n = (s_r * f_mom_l - s_l * f_mom_r + s_l * s_r * (qn_r - qn_l)) * inv;
  }
  // Tangential momentum upwinded by the mass flux.
  f.mom_t = f.mass >= 0.0 ? f.mass * v_l : f.mass * v_r;
  return f;
}

}  // namespace floodmra

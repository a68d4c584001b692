#include "floodmra/solver_uniform.hpp"

#include <algorithm>
#include <cmath>

#include "floodmra/errors.hpp"

namespace floodmra {

namespace {

struct Limit {
  double h, qx, qy, z, eta, u, v;
};

inline Limit side_limit(const FlowCoeffs& u, const PlanarCoeffs& z, Side s, double h_dry) {
  Limit l;
  l.h = std::max(0.0, face_limit(u.h, s));
  l.qx = face_limit(u.qx, s);
  l.qy = face_limit(u.qy, s);
  l.z = face_limit(z, s);
  l.eta = l.h + l.z;
  l.u = safe_velocity(l.h, l.qx, h_dry);
  l.v = safe_velocity(l.h, l.qy, h_dry);
  return l;
}

inline void phys_flux_x(double h, double qx, double qy, double g, double h_dry, double& fh,
                        double& fqx, double& fqy) {
  const double p = 0.5 * g * h * h;
  if (h <= h_dry) {
    fh = 0.0;
    fqx = p;
    fqy = 0.0;
    return;
  }
  const double u = qx / h;
  fh = qx;
  fqx = qx * u + p;
  fqy = qx * (qy / h);
}

inline void phys_flux_y(double h, double qx, double qy, double g, double h_dry, double& fh,
                        double& fqx, double& fqy) {
  const double p = 0.5 * g * h * h;
  if (h <= h_dry) {
    fh = 0.0;
    fqx = 0.0;
    fqy = p;
    return;
  }
  const double v = qy / h;
  fh = qy;
  fqx = qy * (qx / h);
  fqy = qy * v + p;
}

}  // namespace

FlowCoeffs flow_from_surface(const PlanarCoeffs& z, double eta0) {
  FlowCoeffs f;
  const double span = kSqrt3 * (std::abs(z.c1x) + std::abs(z.c1y));
  if (z.c0 + span < eta0) {
    f.h = {eta0 - z.c0, -z.c1x, -z.c1y};
  } else if (z.c0 - span >= eta0) {
    f.h = {};
  } else {
    f.h = {std::max(0.0, eta0 - z.c0), 0.0, 0.0};
  }
  return f;
}

void UniformSim::revise_faces(const std::vector<FlowCoeffs>& state, int threads) {
  const size_t n = state.size();
  star_e_.resize(n);
  star_w_.resize(n);
  star_n_.resize(n);
  star_s_.resize(n);
  mod_x_.resize(n);
  mod_y_.resize(n);
  parallel_for(ny, threads, [&](int64_t j0, int64_t j1) {
    for (int j = int(j0); j < int(j1); ++j) {
      for (int i = 0; i < nx; ++i) {
        const size_t c = cell(i, j);
        const FlowCoeffs& uc = state[c];

        const Limit le = side_limit(uc, z[c], Side::east, h_dry);
        const Limit lw = side_limit(uc, z[c], Side::west, h_dry);
        const Limit ln = side_limit(uc, z[c], Side::north, h_dry);
        const Limit ls = side_limit(uc, z[c], Side::south, h_dry);

        // Opposing inner limit of the neighbour; the ghost mirrors our own
        // topography so z* degenerates to our face value at the domain edge.
        const double z_we = i + 1 < nx ? face_limit(z[cell(i + 1, j)], Side::west) : le.z;
        const double z_ew = i > 0 ? face_limit(z[cell(i - 1, j)], Side::east) : lw.z;
        const double z_sn = j + 1 < ny ? face_limit(z[cell(i, j + 1)], Side::south) : ln.z;
        const double z_ns = j > 0 ? face_limit(z[cell(i, j - 1)], Side::north) : ls.z;

        const double zs_e = std::max(le.z, z_we);
        const double zs_w = std::max(lw.z, z_ew);
        const double zs_n = std::max(ln.z, z_sn);
        const double zs_s = std::max(ls.z, z_ns);

        const double hs_e = std::max(0.0, le.eta - zs_e);
        const double hs_w = std::max(0.0, lw.eta - zs_w);
        const double hs_n = std::max(0.0, ln.eta - zs_n);
        const double hs_s = std::max(0.0, ls.eta - zs_s);

        star_e_[c] = {hs_e, hs_e * le.u, hs_e * le.v};
        star_w_[c] = {hs_w, hs_w * lw.u, hs_w * lw.v};
        star_n_[c] = {hs_n, hs_n * ln.u, hs_n * ln.v};
        star_s_[c] = {hs_s, hs_s * ls.u, hs_s * ls.v};

        const double zd_e = zs_e - std::max(0.0, zs_e - le.eta);
        const double zd_w = zs_w - std::max(0.0, zs_w - lw.eta);
        const double zd_n = zs_n - std::max(0.0, zs_n - ln.eta);
        const double zd_s = zs_s - std::max(0.0, zs_s - ls.eta);

        const double k = 1.0 / (2.0 * kSqrt3);
        mod_x_[c] = {0.5 * (hs_e + hs_w),
                     (hs_e - hs_w) * k,
                     0.5 * (star_e_[c].qx + star_w_[c].qx),
                     (star_e_[c].qx - star_w_[c].qx) * k,
                     0.5 * (star_e_[c].qy + star_w_[c].qy),
                     (star_e_[c].qy - star_w_[c].qy) * k,
                     (zd_e - zd_w) * k};
        mod_y_[c] = {0.5 * (hs_n + hs_s),
                     (hs_n - hs_s) * k,
                     0.5 * (star_n_[c].qx + star_s_[c].qx),
                     (star_n_[c].qx - star_s_[c].qx) * k,
                     0.5 * (star_n_[c].qy + star_s_[c].qy),
                     (star_n_[c].qy - star_s_[c].qy) * k,
                     (zd_n - zd_s) * k};
      }
    }
  });
}

void UniformSim::fluxes(int threads) {
  fx_.resize(static_cast<size_t>(nx + 1) * ny);
  fy_.resize(static_cast<size_t>(nx) * (ny + 1));
  parallel_for(ny, threads, [&](int64_t j0, int64_t j1) {
    for (int j = int(j0); j < int(j1); ++j) {
      for (int i = 0; i <= nx; ++i) {
        SideState l, r;
        if (i == 0) {
          r = star_w_[cell(0, j)];
          l = r;
          if (bc[int(Side::west)] == BoundaryKind::reflective) l.qx = -l.qx;
        } else if (i == nx) {
          l = star_e_[cell(nx - 1, j)];
          r = l;
          if (bc[int(Side::east)] == BoundaryKind::reflective) r.qx = -r.qx;
        } else {
          l = star_e_[cell(i - 1, j)];
          r = star_w_[cell(i, j)];
        }
        const Flux3 f = hll_flux(l.h, l.qx, l.qy, r.h, r.qx, r.qy, g, h_dry);
        fx_[static_cast<size_t>(j) * (nx + 1) + i] = f;
      }
    }
  });
  parallel_for(ny + 1, threads, [&](int64_t j0, int64_t j1) {
    for (int j = int(j0); j < int(j1); ++j) {
      for (int i = 0; i < nx; ++i) {
        SideState l, r;
        if (j == 0) {
          r = star_s_[cell(i, 0)];
          l = r;
          if (bc[int(Side::south)] == BoundaryKind::reflective) l.qy = -l.qy;
        } else if (j == ny) {
          l = star_n_[cell(i, ny - 1)];
          r = l;
          if (bc[int(Side::north)] == BoundaryKind::reflective) r.qy = -r.qy;
        } else {
          l = star_n_[cell(i, j - 1)];
          r = star_s_[cell(i, j)];
        }
        // Normal component is qy along y faces.
        const Flux3 f = hll_flux(l.h, l.qy, l.qx, r.h, r.qy, r.qx, g, h_dry);
        fy_[static_cast<size_t>(j) * nx + i] = f;
      }
    }
  });
}

void UniformSim::assemble_dg2(const std::vector<FlowCoeffs>& state, int threads) {
  (void)state;
  rate_.resize(static_cast<size_t>(nx) * ny);
  parallel_for(ny, threads, [&](int64_t j0, int64_t j1) {
    for (int j = int(j0); j < int(j1); ++j) {
      for (int i = 0; i < nx; ++i) {
        const size_t c = cell(i, j);
        const Flux3& fe = fx_[static_cast<size_t>(j) * (nx + 1) + i + 1];
        const Flux3& fw = fx_[static_cast<size_t>(j) * (nx + 1) + i];
        const Flux3& fn = fy_[static_cast<size_t>(j + 1) * nx + i];
        const Flux3& fs = fy_[static_cast<size_t>(j) * nx + i];
        const DirMod& mx = mod_x_[c];
        const DirMod& my = mod_y_[c];

        FlowCoeffs L{};
        L.h.c0 = -((fe.mass - fw.mass) + (fn.mass - fs.mass)) / R;
        L.qx.c0 = -((fe.mom_n - fw.mom_n) + (fn.mom_t - fs.mom_t)) / R -
                  g * mx.h0 * (2.0 * kSqrt3 * mx.z1) / R;
        L.qy.c0 = -((fe.mom_t - fw.mom_t) + (fn.mom_n - fs.mom_n)) / R -
                  g * my.h0 * (2.0 * kSqrt3 * my.z1) / R;

        // x-slope operator: Gauss-point evaluations of the revised plane.
        double fhp, fqxp, fqyp, fhm, fqxm, fqym;
        phys_flux_x(mx.h0 + mx.h1, mx.qx0 + mx.qx1, mx.qy0 + mx.qy1, g, h_dry, fhp, fqxp, fqyp);
        phys_flux_x(mx.h0 - mx.h1, mx.qx0 - mx.qx1, mx.qy0 - mx.qy1, g, h_dry, fhm, fqxm, fqym);
        L.h.c1x = -(kSqrt3 / R) * (fe.mass + fw.mass - fhp - fhm);
        L.qx.c1x = -(kSqrt3 / R) * (fe.mom_n + fw.mom_n - fqxp - fqxm) -
                   g * mx.h1 * (2.0 * kSqrt3 * mx.z1) / R;
        L.qy.c1x = -(kSqrt3 / R) * (fe.mom_t + fw.mom_t - fqyp - fqym);

        double ghp, gqxp, gqyp, ghm, gqxm, gqym;
        phys_flux_y(my.h0 + my.h1, my.qx0 + my.qx1, my.qy0 + my.qy1, g, h_dry, ghp, gqxp, gqyp);
        phys_flux_y(my.h0 - my.h1, my.qx0 - my.qx1, my.qy0 - my.qy1, g, h_dry, ghm, gqxm, gqym);
        L.h.c1y = -(kSqrt3 / R) * (fn.mass + fs.mass - ghp - ghm);
        L.qx.c1y = -(kSqrt3 / R) * (fn.mom_t + fs.mom_t - gqxp - gqxm);
        L.qy.c1y = -(kSqrt3 / R) * (fn.mom_n + fs.mom_n - gqyp - gqym) -
                   g * my.h1 * (2.0 * kSqrt3 * my.z1) / R;

        rate_[c] = L;
      }
    }
  });
}

void UniformSim::assemble_fv1(int threads) {
  rate_.resize(static_cast<size_t>(nx) * ny);
  parallel_for(ny, threads, [&](int64_t j0, int64_t j1) {
    for (int j = int(j0); j < int(j1); ++j) {
      for (int i = 0; i < nx; ++i) {
        const size_t c = cell(i, j);
        const Flux3& fe = fx_[static_cast<size_t>(j) * (nx + 1) + i + 1];
        const Flux3& fw = fx_[static_cast<size_t>(j) * (nx + 1) + i];
        const Flux3& fn = fy_[static_cast<size_t>(j + 1) * nx + i];
        const Flux3& fs = fy_[static_cast<size_t>(j) * nx + i];
        FlowCoeffs L{};
        L.h.c0 = -((fe.mass - fw.mass) + (fn.mass - fs.mass)) / R;
        L.qx.c0 = -((fe.mom_n - fw.mom_n) + (fn.mom_t - fs.mom_t)) / R -
                  g * mod_x_[c].h0 * (2.0 * kSqrt3 * mod_x_[c].z1) / R;
        L.qy.c0 = -((fe.mom_t - fw.mom_t) + (fn.mom_n - fs.mom_n)) / R -
                  g * mod_y_[c].h0 * (2.0 * kSqrt3 * mod_y_[c].z1) / R;
        rate_[c] = L;
      }
    }
  });
}

void UniformSim::positivity(std::vector<FlowCoeffs>& state, int threads) const {
  parallel_for(static_cast<int64_t>(state.size()), threads, [&](int64_t a, int64_t b) {
    for (int64_t c = a; c < b; ++c) {
      FlowCoeffs& f = state[c];
      if (!(f.h.c0 > 0.0)) {
        f.h = {std::max(f.h.c0, 0.0), 0.0, 0.0};
        f.qx = {};
        f.qy = {};
        continue;
      }
      if (f.h.c0 <= h_dry) {
        f.h.c1x = f.h.c1y = 0.0;
        f.qx = {};
        f.qy = {};
        continue;
      }
      const double span = kSqrt3 * (std::abs(f.h.c1x) + std::abs(f.h.c1y));
      if (f.h.c0 - span < 0.0) {
        const double theta = f.h.c0 / span;
        f.h.c1x *= theta;
        f.h.c1y *= theta;
        f.qx.c1x *= theta;
        f.qx.c1y *= theta;
        f.qy.c1x *= theta;
        f.qy.c1y *= theta;
      }
    }
  });
}

void UniformSim::step_rk(double dt, int threads) {
  const size_t n = u.size();
  parallel_for(static_cast<int64_t>(n), threads, [&](int64_t a, int64_t b) {
    for (int64_t c = a; c < b; ++c) friction_update(u[c].h.c0, u[c].qx, u[c].qy, nman[c], g, h_dry, dt);
  });

  revise_faces(u, threads);
  fluxes(threads);
  if (kind == SolverKind::dg2)
    assemble_dg2(u, threads);
  else
    assemble_fv1(threads);

  stage_.resize(n);
  parallel_for(static_cast<int64_t>(n), threads, [&](int64_t a, int64_t b) {
    for (int64_t c = a; c < b; ++c) {
      FlowCoeffs s = u[c];
      FlowCoeffs r = rate_[c];
      r *= dt;
      s += r;
      stage_[c] = s;
    }
  });
  positivity(stage_, threads);

  if (kind != SolverKind::dg2) {
    u.swap(stage_);
    return;
  }

  revise_faces(stage_, threads);
  fluxes(threads);
  assemble_dg2(stage_, threads);
  parallel_for(static_cast<int64_t>(n), threads, [&](int64_t a, int64_t b) {
    for (int64_t c = a; c < b; ++c) {
      FlowCoeffs r = rate_[c];
      r *= dt;
      FlowCoeffs s = stage_[c];
      s += r;
      s += u[c];
      s *= 0.5;
      u[c] = s;
    }
  });
  positivity(u, threads);
}

void UniformSim::step_acc(double dt, int threads) {
  const double sevard = 7.0 / 3.0;
  parallel_for(ny, threads, [&](int64_t j0, int64_t j1) {
    for (int j = int(j0); j < int(j1); ++j) {
      for (int i = 0; i <= nx; ++i) {
        double& q = acc_qx[static_cast<size_t>(j) * (nx + 1) + i];
        if (i == 0 || i == nx) {
          const Side edge = i == 0 ? Side::west : Side::east;
          if (bc[int(edge)] == BoundaryKind::reflective) {
            q = 0.0;
            continue;
          }
          const size_t c = cell(i == 0 ? 0 : nx - 1, j);
          const double hf = u[c].h.c0;
          if (hf <= h_dry) {
            q = 0.0;
            continue;
          }
          q = q / (1.0 + g * dt * nman[c] * nman[c] * std::abs(q) / std::pow(hf, sevard));
          continue;
        }
        const size_t l = cell(i - 1, j);
        const size_t r = cell(i, j);
        const double etal = u[l].h.c0 + z[l].c0;
        const double etar = u[r].h.c0 + z[r].c0;
        const double hf = std::max(etal, etar) - std::max(z[l].c0, z[r].c0);
        if (hf <= h_dry) {
          q = 0.0;
          continue;
        }
        const double nf = 0.5 * (nman[l] + nman[r]);
        q = (q - g * hf * dt * (etar - etal) / R) /
            (1.0 + g * dt * nf * nf * std::abs(q) / std::pow(hf, sevard));
      }
    }
  });
  parallel_for(ny + 1, threads, [&](int64_t j0, int64_t j1) {
    for (int j = int(j0); j < int(j1); ++j) {
      for (int i = 0; i < nx; ++i) {
        double& q = acc_qy[static_cast<size_t>(j) * nx + i];
        if (j == 0 || j == ny) {
          const Side edge = j == 0 ? Side::south : Side::north;
          if (bc[int(edge)] == BoundaryKind::reflective) {
            q = 0.0;
            continue;
          }
          const size_t c = cell(i, j == 0 ? 0 : ny - 1);
          const double hf = u[c].h.c0;
          if (hf <= h_dry) {
            q = 0.0;
            continue;
          }
          q = q / (1.0 + g * dt * nman[c] * nman[c] * std::abs(q) / std::pow(hf, sevard));
          continue;
        }
        const size_t l = cell(i, j - 1);
        const size_t r = cell(i, j);
        const double etal = u[l].h.c0 + z[l].c0;
        const double etar = u[r].h.c0 + z[r].c0;
        const double hf = std::max(etal, etar) - std::max(z[l].c0, z[r].c0);
        if (hf <= h_dry) {
          q = 0.0;
          continue;
        }
        const double nf = 0.5 * (nman[l] + nman[r]);
        q = (q - g * hf * dt * (etar - etal) / R) /
            (1.0 + g * dt * nf * nf * std::abs(q) / std::pow(hf, sevard));
      }
    }
  });
  parallel_for(ny, threads, [&](int64_t j0, int64_t j1) {
    for (int j = int(j0); j < int(j1); ++j) {
      for (int i = 0; i < nx; ++i) {
        const size_t c = cell(i, j);
        const double qw = acc_qx[static_cast<size_t>(j) * (nx + 1) + i];
        const double qe = acc_qx[static_cast<size_t>(j) * (nx + 1) + i + 1];
        const double qs = acc_qy[static_cast<size_t>(j) * nx + i];
        const double qn = acc_qy[static_cast<size_t>(j + 1) * nx + i];
        u[c].h.c0 -= dt * ((qe - qw) + (qn - qs)) / R;
        // Diagnostic cell discharges for outputs and gauges.
        u[c].qx.c0 = 0.5 * (qw + qe);
        u[c].qy.c0 = 0.5 * (qs + qn);
      }
    }
  });
}

void UniformSim::step(double dt, int threads) {
  if (kind == SolverKind::acc)
    step_acc(dt, threads);
  else
    step_rk(dt, threads);
}

double UniformSim::compute_dt() const {
  const double inf = std::numeric_limits<double>::infinity();
  if (kind == SolverKind::acc) {
    double hmax = 0.0;
    for (const FlowCoeffs& f : u) hmax = std::max(hmax, f.h.c0);
    if (hmax <= h_dry) return inf;
    return courant * R / std::sqrt(g * hmax);
  }
  double dt = inf;
  for (const FlowCoeffs& f : u) {
    const double h = f.h.c0;
    if (h <= h_dry) continue;
    const double c = std::sqrt(g * h);
    const double sx = std::abs(f.qx.c0 / h) + c;
    const double sy = std::abs(f.qy.c0 / h) + c;
    dt = std::min(dt, R / std::max(sx, sy));
  }
  return dt * courant;
}

double UniformSim::apply_inflows(double t, double dt) {
  double added = 0.0;
  for (const ResolvedInflow& f : inflows) {
    const double q = hydrograph_at(f.hydro, t);
    if (q <= 0.0) continue;
    const double vol = q * dt;
    const double per_cell = vol / double(f.region_cells);
    for (const auto& [c, count] : f.targets) u[c].h.c0 += per_cell * count / (R * R);
    added += vol;
  }
  return added;
}

double UniformSim::volume() const {
  // Kahan summation keeps the mass audit independent of grid size.
  double sum = 0.0, comp = 0.0;
  for (const FlowCoeffs& f : u) {
    const double y = f.h.c0 * R * R - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

bool UniformSim::finite_state(double* bad_x, double* bad_y) const {
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (!u[cell(i, j)].finite()) {
        if (bad_x) *bad_x = xc(i);
        if (bad_y) *bad_y = yc(j);
        return false;
      }
  return true;
}

GaugeValue UniformSim::sample_gauge(double x, double y) const {
  const int i = std::clamp(static_cast<int>(std::floor((x - x0) / R)), 0, nx - 1);
  const int j = std::clamp(static_cast<int>(std::floor((y - y0) / R)), 0, ny - 1);
  const size_t c = cell(i, j);
  GaugeValue gv;
  if (kind == SolverKind::dg2) {
    const double h = std::max(0.0, evaluate(u[c].h, xc(i), yc(j), R, x, y));
    const double zv = evaluate(z[c], xc(i), yc(j), R, x, y);
    const double qx = evaluate(u[c].qx, xc(i), yc(j), R, x, y);
    const double qy = evaluate(u[c].qy, xc(i), yc(j), R, x, y);
    gv = {h, h + zv, safe_velocity(h, qx, h_dry), safe_velocity(h, qy, h_dry)};
  } else {
    const double h = u[c].h.c0;
    gv = {h, h + z[c].c0, safe_velocity(h, u[c].qx.c0, h_dry),
          safe_velocity(h, u[c].qy.c0, h_dry)};
  }
  return gv;
}

namespace {
Raster field_raster(const UniformSim& s, int which) {
  Raster r;
  r.ncols = s.nx;
  r.nrows = s.ny;
  r.xll = s.x0;
  r.yll = s.y0;
  r.cellsize = s.R;
  r.values.resize(static_cast<size_t>(s.nx) * s.ny);
  for (int j = 0; j < s.ny; ++j)
    for (int i = 0; i < s.nx; ++i) {
      const FlowCoeffs& f = s.u[s.cell(i, j)];
      const double v = which == 0 ? f.h.c0 : which == 1 ? f.qx.c0 : f.qy.c0;
      r.at(s.ny - 1 - j, i) = v;
    }
  return r;
}
}  // namespace

Raster UniformSim::depth_raster() const { return field_raster(*this, 0); }
Raster UniformSim::qx_raster() const { return field_raster(*this, 1); }
Raster UniformSim::qy_raster() const { return field_raster(*this, 2); }

UniformSim make_uniform_sim(const ScenarioConfig& cfg, const Raster& dem) {
  UniformSim s;
  s.kind = cfg.solver;
  if (solver_is_adaptive(s.kind))
    throw ConfigError("uniform solver cannot run adaptive kinds");
  const FieldGrid grid = project_elements(dem);
  s.nx = grid.nx;
  s.ny = grid.ny;
  s.R = grid.R;
  s.x0 = grid.x0;
  s.y0 = grid.y0;
  s.z = grid.cells;
  s.g = cfg.g;
  s.h_dry = cfg.h_dry;
  s.courant = cfg.courant_for(cfg.solver);
  s.bc = cfg.boundary;

  const size_t n = s.z.size();
  s.nman.assign(n, cfg.manning);
  if (!cfg.manning_raster.empty()) {
    const Raster mr = read_ascii_grid(cfg.manning_raster);
    for (int j = 0; j < s.ny; ++j)
      for (int i = 0; i < s.nx; ++i) {
        const int row = std::clamp(mr.nrows - 1 - j, 0, mr.nrows - 1);
        const int col = std::clamp(i, 0, mr.ncols - 1);
        s.nman[s.cell(i, j)] = mr.at(row, col);
      }
  }

  s.u.assign(n, FlowCoeffs{});
  if (!cfg.initial_depth_raster.empty()) {
    const Raster hr = read_ascii_grid(cfg.initial_depth_raster);
    if (hr.ncols != dem.ncols || hr.nrows != dem.nrows)
      throw ConfigError("initial_depth_raster geometry must match the DEM");
    const FieldGrid hg = project_elements(hr);
    for (size_t c = 0; c < n; ++c) s.u[c].h = hg.cells[c];
  } else if (cfg.initial_surface) {
    for (size_t c = 0; c < n; ++c) s.u[c] = flow_from_surface(s.z[c], *cfg.initial_surface);
  } else if (cfg.initial_depth > 0.0) {
    for (size_t c = 0; c < n; ++c) s.u[c].h = {cfg.initial_depth, 0.0, 0.0};
  }
  if (s.kind != SolverKind::dg2) {
    // Piecewise-constant representation: averages only, for flow and bed.
    for (PlanarCoeffs& c : s.z) c.c1x = c.c1y = 0.0;
    for (FlowCoeffs& f : s.u) {
      f.h.c1x = f.h.c1y = 0.0;
      f.qx = {};
      f.qy = {};
    }
  }
  s.positivity(s.u, 1);

  const std::vector<uint8_t> mask = element_nodata_mask(dem);
  for (const InflowSpec& spec : cfg.inflows) {
    if (spec.i0 < 0 || spec.j0 < 0 || spec.i1 >= s.nx || spec.j1 >= s.ny)
      throw ConfigError("inflow region outside the domain");
    ResolvedInflow f;
    f.hydro = read_hydrograph_csv(spec.hydrograph_path);
    bool any_active = false;
    for (int j = spec.j0; j <= spec.j1; ++j)
      for (int i = spec.i0; i <= spec.i1; ++i) {
        f.targets.push_back({static_cast<int32_t>(s.cell(i, j)), 1});
        if (!mask[s.cell(i, j)]) any_active = true;
      }
    f.region_cells = static_cast<int64_t>(f.targets.size());
    if (!any_active) throw ConfigError("inflow region lies entirely on nodata cells");
    s.inflows.push_back(std::move(f));
  }

  for (const GaugeSpec& gp : cfg.gauges) {
    if (gp.x < s.x0 || gp.x > s.x0 + s.nx * s.R || gp.y < s.y0 || gp.y > s.y0 + s.ny * s.R)
      throw ConfigError("gauge point outside the domain");
  }

  if (s.kind == SolverKind::acc) {
    s.acc_qx.assign(static_cast<size_t>(s.nx + 1) * s.ny, 0.0);
    s.acc_qy.assign(static_cast<size_t>(s.nx) * (s.ny + 1), 0.0);
  }
  return s;
}

}  // namespace floodmra

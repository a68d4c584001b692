#include "floodmra/solver_nonuniform.hpp"

#include <algorithm>
#include <cmath>

#include "floodmra/errors.hpp"
#include "floodmra/hydrograph.hpp"
#include "floodmra/solver_uniform.hpp"

namespace floodmra {

namespace {

inline uint64_t node_key(int level, int i, int j) {
  return (uint64_t(level) << 58) | morton_encode(uint32_t(i), uint32_t(j));
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

constexpr double kHalfInvSqrt3 = 1.0 / (2.0 * kSqrt3);

}  // namespace

NonUniformSim::PointState NonUniformSim::limit_at(const std::vector<FlowCoeffs>& state, int leaf,
                                                  Side, double x, double y) const {
  const double cx = grid.leaf_xc(leaf);
  const double cy = grid.leaf_yc(leaf);
  const double sz = grid.leaf_size(leaf);
  PointState p;
  p.h = std::max(0.0, evaluate(state[leaf].h, cx, cy, sz, x, y));
  p.qx = evaluate(state[leaf].qx, cx, cy, sz, x, y);
  p.qy = evaluate(state[leaf].qy, cx, cy, sz, x, y);
  p.z = evaluate(z[leaf], cx, cy, sz, x, y);
  p.eta = p.h + p.z;
  p.u = safe_velocity(p.h, p.qx, h_dry);
  p.v = safe_velocity(p.h, p.qy, h_dry);
  return p;
}

FlowCoeffs NonUniformSim::region_coeffs(const std::vector<FlowCoeffs>& state, int level, int i,
                                        int j) const {
  const int leaf = grid.find(level, i, j);
  if (leaf >= 0) return state[leaf];
  std::array<FlowCoeffs, 4> kids;
  for (int k = 0; k < 4; ++k) {
    const int ci = k & 1, cj = k >> 1;
    kids[k] = region_coeffs(state, level + 1, 2 * i + ci, 2 * j + cj);
  }
  return encode_flow(kids, *encode_pairing).parent;
}

PlanarCoeffs NonUniformSim::region_topo(int level, int i, int j) const {
  const int leaf = grid.find(level, i, j);
  if (leaf >= 0) return z[leaf];
  std::array<PlanarCoeffs, 4> kids;
  for (int k = 0; k < 4; ++k) {
    const int ci = k & 1, cj = k >> 1;
    kids[k] = region_topo(level + 1, 2 * i + ci, 2 * j + cj);
  }
  return encode(kids, *encode_pairing).parent;
}

void NonUniformSim::segment_states(const std::vector<FlowCoeffs>& state, int threads) {
  seg_.resize(faces.interior.size());
  parallel_for(static_cast<int64_t>(faces.interior.size()), threads, [&](int64_t a, int64_t b) {
    for (int64_t s = a; s < b; ++s) {
      const FaceSegment& fs = faces.interior[s];
      const Side side_l = fs.x_normal ? Side::east : Side::north;
      const Side side_r = fs.x_normal ? Side::west : Side::south;
      const PointState pl = limit_at(state, fs.left, side_l, fs.cx, fs.cy);
      const PointState pr = limit_at(state, fs.right, side_r, fs.cx, fs.cy);
      const double zs = std::max(pl.z, pr.z);
      const double hl = std::max(0.0, pl.eta - zs);
      const double hr = std::max(0.0, pr.eta - zs);
      SegState out;
      out.z_star = zs;
      out.h_star_left = hl;
      out.h_star_right = hr;
      if (fs.x_normal) {
        out.flux = hll_flux(hl, hl * pl.u, hl * pl.v, hr, hr * pr.u, hr * pr.v, g, h_dry);
      } else {
        out.flux = hll_flux(hl, hl * pl.v, hl * pl.u, hr, hr * pr.v, hr * pr.u, g, h_dry);
      }
      seg_[s] = out;
    }
  });
}

void NonUniformSim::side_effective(const std::vector<FlowCoeffs>& state, int threads) {
  const int nleaf = static_cast<int>(grid.leaves.size());
  side_.resize(static_cast<size_t>(nleaf) * 4);

  // Encoded pairing states must be memoised serially before the parallel pass.
  if (encode_pairing) {
    encode_cache_.clear();
    for (int leaf = 0; leaf < nleaf; ++leaf) {
      const LeafId& l = grid.leaves[leaf];
      for (int sd = 0; sd < 4; ++sd) {
        if (faces.sides[leaf][sd].size() < 2) continue;
        const Side s = static_cast<Side>(sd);
        const int ni = l.i + (s == Side::east ? 1 : s == Side::west ? -1 : 0);
        const int nj = l.j + (s == Side::north ? 1 : s == Side::south ? -1 : 0);
        const uint64_t key = node_key(l.level, ni, nj);
        if (!encode_cache_.count(key)) encode_cache_[key] = region_coeffs(state, l.level, ni, nj);
      }
    }
  }

  parallel_for(nleaf, threads, [&](int64_t a, int64_t b) {
    for (int leaf = int(a); leaf < int(b); ++leaf) {
      const LeafId& lid = grid.leaves[leaf];
      const double sz = grid.leaf_size(leaf);
      const double cx = grid.leaf_xc(leaf);
      const double cy = grid.leaf_yc(leaf);
      for (int sd = 0; sd < 4; ++sd) {
        const Side s = static_cast<Side>(sd);
        const double fx = cx + (s == Side::east ? sz / 2 : s == Side::west ? -sz / 2 : 0.0);
        const double fy = cy + (s == Side::north ? sz / 2 : s == Side::south ? -sz / 2 : 0.0);
        const PointState me = limit_at(state, leaf, s, fx, fy);
        const auto& segs = faces.sides[leaf][sd];

        SideEff e;
        if (segs.size() == 1 && segs[0] < 0) {
          e.z_star = me.z;  // domain edge: ghost shares our topography
        } else if (segs.size() == 1) {
          e.z_star = seg_[segs[0]].z_star;
        } else if (encode_pairing) {
          const int ni = lid.i + (s == Side::east ? 1 : s == Side::west ? -1 : 0);
          const int nj = lid.j + (s == Side::north ? 1 : s == Side::south ? -1 : 0);
          const PlanarCoeffs zt = region_topo(lid.level, ni, nj);
          const Side opp = s == Side::east    ? Side::west
                           : s == Side::west  ? Side::east
                           : s == Side::north ? Side::south
                                              : Side::north;
          e.z_star = std::max(me.z, face_limit(zt, opp));
        } else {
          // Length-weighted mean of the sub-face z*.
          double acc = 0.0;
          for (int id : segs) acc += (faces.interior[id].len / sz) * seg_[id].z_star;
          e.z_star = acc;
        }
        e.h_star = std::max(0.0, me.eta - e.z_star);
        e.qx_star = e.h_star * me.u;
        e.qy_star = e.h_star * me.v;
        e.z_dag = e.z_star - std::max(0.0, e.z_star - me.eta);
        side_[static_cast<size_t>(leaf) * 4 + sd] = e;
      }
    }
  });
}

void NonUniformSim::assemble(const std::vector<FlowCoeffs>& state, int threads) {
  (void)state;
  const int nleaf = static_cast<int>(grid.leaves.size());
  rate_.resize(nleaf);
  const bool dg2 = scheme == SolverKind::dg2;

  parallel_for(nleaf, threads, [&](int64_t a, int64_t b) {
    for (int leaf = int(a); leaf < int(b); ++leaf) {
      const double sz = grid.leaf_size(leaf);

      // Accumulated side fluxes with the pressure corrections that collapse
      // sub-face variance onto the side-effective starred state.
      Flux3 f_side[4];
      for (int sd = 0; sd < 4; ++sd) {
        const Side s = static_cast<Side>(sd);
        const SideEff& e = side_[static_cast<size_t>(leaf) * 4 + sd];
        const auto& segs = faces.sides[leaf][sd];
        Flux3 acc;
        for (int id : segs) {
          if (id < 0) {
            // Domain edge: mirror the side-effective starred state.
            const bool xn = (s == Side::east || s == Side::west);
            const double qn = xn ? e.qx_star : e.qy_star;
            const double qt = xn ? e.qy_star : e.qx_star;
            const BoundaryKind kind = bc[sd];
            const double qn_ghost = kind == BoundaryKind::reflective ? -qn : qn;
            Flux3 f;
            if (s == Side::east || s == Side::north)
              f = hll_flux(e.h_star, qn, qt, e.h_star, qn_ghost, qt, g, h_dry);
            else
              f = hll_flux(e.h_star, qn_ghost, qt, e.h_star, qn, qt, g, h_dry);
            acc.mass += f.mass;
            acc.mom_n += f.mom_n;
            acc.mom_t += f.mom_t;
            continue;
          }
          const FaceSegment& fs = faces.interior[id];
          const SegState& ss = seg_[id];
          const double w = fs.len / sz;
          const bool mine_left = (s == Side::east || s == Side::north);
          const double h_me = mine_left ? ss.h_star_left : ss.h_star_right;
          const double corr = 0.5 * g * (e.h_star * e.h_star - h_me * h_me);
          acc.mass += w * ss.flux.mass;
          acc.mom_n += w * (ss.flux.mom_n + corr);
          acc.mom_t += w * ss.flux.mom_t;
        }
        f_side[sd] = acc;
      }

      const Flux3& fn = f_side[int(Side::north)];
      const Flux3& fe = f_side[int(Side::east)];
      const Flux3& fs_ = f_side[int(Side::south)];
      const Flux3& fw = f_side[int(Side::west)];
      const SideEff& en = side_[static_cast<size_t>(leaf) * 4 + int(Side::north)];
      const SideEff& ee = side_[static_cast<size_t>(leaf) * 4 + int(Side::east)];
      const SideEff& es = side_[static_cast<size_t>(leaf) * 4 + int(Side::south)];
      const SideEff& ew = side_[static_cast<size_t>(leaf) * 4 + int(Side::west)];

      const DirMod mx = {0.5 * (ee.h_star + ew.h_star),   (ee.h_star - ew.h_star) * kHalfInvSqrt3,
                         0.5 * (ee.qx_star + ew.qx_star), (ee.qx_star - ew.qx_star) * kHalfInvSqrt3,
                         0.5 * (ee.qy_star + ew.qy_star), (ee.qy_star - ew.qy_star) * kHalfInvSqrt3,
                         (ee.z_dag - ew.z_dag) * kHalfInvSqrt3};
      const DirMod my = {0.5 * (en.h_star + es.h_star),   (en.h_star - es.h_star) * kHalfInvSqrt3,
                         0.5 * (en.qx_star + es.qx_star), (en.qx_star - es.qx_star) * kHalfInvSqrt3,
                         0.5 * (en.qy_star + es.qy_star), (en.qy_star - es.qy_star) * kHalfInvSqrt3,
                         (en.z_dag - es.z_dag) * kHalfInvSqrt3};

      FlowCoeffs L{};
      L.h.c0 = -((fe.mass - fw.mass) + (fn.mass - fs_.mass)) / sz;
      L.qx.c0 = -((fe.mom_n - fw.mom_n) + (fn.mom_t - fs_.mom_t)) / sz -
                g * mx.h0 * (2.0 * kSqrt3 * mx.z1) / sz;
      L.qy.c0 = -((fe.mom_t - fw.mom_t) + (fn.mom_n - fs_.mom_n)) / sz -
                g * my.h0 * (2.0 * kSqrt3 * my.z1) / sz;

      if (dg2) {
        double fhp, fqxp, fqyp, fhm, fqxm, fqym;
        phys_flux_x(mx.h0 + mx.h1, mx.qx0 + mx.qx1, mx.qy0 + mx.qy1, g, h_dry, fhp, fqxp, fqyp);
        phys_flux_x(mx.h0 - mx.h1, mx.qx0 - mx.qx1, mx.qy0 - mx.qy1, g, h_dry, fhm, fqxm, fqym);
        L.h.c1x = -(kSqrt3 / sz) * (fe.mass + fw.mass - fhp - fhm);
        L.qx.c1x = -(kSqrt3 / sz) * (fe.mom_n + fw.mom_n - fqxp - fqxm) -
                   g * mx.h1 * (2.0 * kSqrt3 * mx.z1) / sz;
        L.qy.c1x = -(kSqrt3 / sz) * (fe.mom_t + fw.mom_t - fqyp - fqym);

        double ghp, gqxp, gqyp, ghm, gqxm, gqym;
        phys_flux_y(my.h0 + my.h1, my.qx0 + my.qx1, my.qy0 + my.qy1, g, h_dry, ghp, gqxp, gqyp);
        phys_flux_y(my.h0 - my.h1, my.qx0 - my.qx1, my.qy0 - my.qy1, g, h_dry, ghm, gqxm, gqym);
        L.h.c1y = -(kSqrt3 / sz) * (fn.mass + fs_.mass - ghp - ghm);
        L.qx.c1y = -(kSqrt3 / sz) * (fn.mom_t + fs_.mom_t - gqxp - gqxm);
        L.qy.c1y = -(kSqrt3 / sz) * (fn.mom_n + fs_.mom_n - gqyp - gqym) -
                   g * my.h1 * (2.0 * kSqrt3 * my.z1) / sz;
      }
      rate_[leaf] = L;
    }
  });
}

void NonUniformSim::positivity(std::vector<FlowCoeffs>& state, int threads) const {
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

void NonUniformSim::step_rk(double dt, int threads) {
  const size_t n = u.size();
  parallel_for(static_cast<int64_t>(n), threads, [&](int64_t a, int64_t b) {
    for (int64_t c = a; c < b; ++c) friction_update(u[c].h.c0, u[c].qx, u[c].qy, nman[c], g, h_dry, dt);
  });

  segment_states(u, threads);
  side_effective(u, threads);
  assemble(u, threads);

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

  if (scheme != SolverKind::dg2) {
    u.swap(stage_);
    return;
  }

  segment_states(stage_, threads);
  side_effective(stage_, threads);
  assemble(stage_, threads);
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

void NonUniformSim::step_acc(double dt, int threads) {
  const double sevard = 7.0 / 3.0;
  parallel_for(static_cast<int64_t>(faces.interior.size()), threads, [&](int64_t a, int64_t b) {
    for (int64_t s = a; s < b; ++s) {
      const FaceSegment& fs = faces.interior[s];
      const int l = fs.left, r = fs.right;
      const double etal = u[l].h.c0 + z[l].c0;
      const double etar = u[r].h.c0 + z[r].c0;
      const double hf = std::max(etal, etar) - std::max(z[l].c0, z[r].c0);
      double& q = acc_q[s];
      if (hf <= h_dry) {
        q = 0.0;
        continue;
      }
      const double dist = 0.5 * (grid.leaf_size(l) + grid.leaf_size(r));
      const double nf = 0.5 * (nman[l] + nman[r]);
      q = (q - g * hf * dt * (etar - etal) / dist) /
          (1.0 + g * dt * nf * nf * std::abs(q) / std::pow(hf, sevard));
    }
  });
  parallel_for(static_cast<int64_t>(faces.boundary.size()), threads, [&](int64_t a, int64_t b) {
    for (int64_t s = a; s < b; ++s) {
      const BoundarySegment& bs = faces.boundary[s];
      double& q = acc_qb[s];
      if (bc[int(bs.side)] == BoundaryKind::reflective) {
        q = 0.0;
        continue;
      }
      const double hf = u[bs.leaf].h.c0;
      if (hf <= h_dry) {
        q = 0.0;
        continue;
      }
      const double nf = nman[bs.leaf];
      q = q / (1.0 + g * dt * nf * nf * std::abs(q) / std::pow(hf, sevard));
    }
  });
  const int nleaf = static_cast<int>(grid.leaves.size());
  parallel_for(nleaf, threads, [&](int64_t a, int64_t b) {
    for (int leaf = int(a); leaf < int(b); ++leaf) {
      const double sz = grid.leaf_size(leaf);
      const double area = sz * sz;
      double net = 0.0;       // volumetric inflow
      double qx_sum = 0.0, qy_sum = 0.0;
      for (int sd = 0; sd < 4; ++sd) {
        const Side s = static_cast<Side>(sd);
        const double sign = (s == Side::east || s == Side::north) ? -1.0 : 1.0;
        for (int id : faces.sides[leaf][sd]) {
          const double q = id >= 0 ? acc_q[id] : acc_qb[-1 - id];
          double len;
          if (id >= 0) {
            len = faces.interior[id].len;
          } else {
            len = faces.boundary[-1 - id].len;
          }
          // Boundary discharges are oriented outward along +axis on E/N sides.
          net += sign * q * len;
          if (s == Side::east || s == Side::west)
            qx_sum += q * len;
          else
            qy_sum += q * len;
        }
      }
      u[leaf].h.c0 += dt * net / area;
      u[leaf].qx.c0 = 0.5 * qx_sum / sz;
      u[leaf].qy.c0 = 0.5 * qy_sum / sz;
    }
  });
}

void NonUniformSim::step(double dt, int threads) {
  if (scheme == SolverKind::acc)
    step_acc(dt, threads);
  else
    step_rk(dt, threads);
}

double NonUniformSim::compute_dt() const {
  const double inf = std::numeric_limits<double>::infinity();
  if (scheme == SolverKind::acc) {
    double hmax = 0.0, rmin = inf;
    for (size_t c = 0; c < u.size(); ++c) {
      if (u[c].h.c0 <= h_dry) continue;
      hmax = std::max(hmax, u[c].h.c0);
      rmin = std::min(rmin, grid.leaf_size(static_cast<int>(c)));
    }
    if (hmax <= h_dry) return inf;
    return courant * rmin / std::sqrt(g * hmax);
  }
  double dt = inf;
  for (size_t c = 0; c < u.size(); ++c) {
    const double h = u[c].h.c0;
    if (h <= h_dry) continue;
    const double cw = std::sqrt(g * h);
    const double sx = std::abs(u[c].qx.c0 / h) + cw;
    const double sy = std::abs(u[c].qy.c0 / h) + cw;
    dt = std::min(dt, grid.leaf_size(static_cast<int>(c)) / std::max(sx, sy));
  }
  return dt * courant;
}

double NonUniformSim::apply_inflows(double t, double dt) {
  double added = 0.0;
  for (const ResolvedInflow& f : inflows) {
    const double q = hydrograph_at(f.hydro, t);
    if (q <= 0.0) continue;
    const double vol = q * dt;
    const double per_cell = vol / double(f.region_cells);
    for (const auto& [leaf, count] : f.targets) {
      const double area = grid.leaf_size(leaf) * grid.leaf_size(leaf);
      u[leaf].h.c0 += per_cell * count / area;
    }
    added += vol;
  }
  return added;
}

double NonUniformSim::volume() const {
  double sum = 0.0, comp = 0.0;
  for (size_t c = 0; c < u.size(); ++c) {
    const double sz = grid.leaf_size(static_cast<int>(c));
    const double y = u[c].h.c0 * sz * sz - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

bool NonUniformSim::finite_state(double* bad_x, double* bad_y) const {
  for (size_t c = 0; c < u.size(); ++c)
    if (!u[c].finite()) {
      if (bad_x) *bad_x = grid.leaf_xc(static_cast<int>(c));
      if (bad_y) *bad_y = grid.leaf_yc(static_cast<int>(c));
      return false;
    }
  return true;
}

GaugeValue NonUniformSim::sample_gauge(double x, double y) const {
  const int leaf = grid.find_point(x, y);
  if (leaf < 0) return {};
  GaugeValue gv;
  if (scheme == SolverKind::dg2) {
    const double cx = grid.leaf_xc(leaf), cy = grid.leaf_yc(leaf), sz = grid.leaf_size(leaf);
    const double h = std::max(0.0, evaluate(u[leaf].h, cx, cy, sz, x, y));
    const double zv = evaluate(z[leaf], cx, cy, sz, x, y);
    const double qx = evaluate(u[leaf].qx, cx, cy, sz, x, y);
    const double qy = evaluate(u[leaf].qy, cx, cy, sz, x, y);
    gv = {h, h + zv, safe_velocity(h, qx, h_dry), safe_velocity(h, qy, h_dry)};
  } else {
    const double h = u[leaf].h.c0;
    gv = {h, h + z[leaf].c0, safe_velocity(h, u[leaf].qx.c0, h_dry),
          safe_velocity(h, u[leaf].qy.c0, h_dry)};
  }
  return gv;
}

namespace {
Raster leaf_raster(const NonUniformSim& s, int which) {
  std::vector<PlanarCoeffs> field(s.u.size());
  for (size_t c = 0; c < s.u.size(); ++c)
    field[c] = which == 0 ? s.u[c].h : which == 1 ? s.u[c].qx : s.u[c].qy;
  return sample_to_raster(s.grid, field);
}
}  // namespace

Raster NonUniformSim::depth_raster() const { return leaf_raster(*this, 0); }
Raster NonUniformSim::qx_raster() const { return leaf_raster(*this, 1); }
Raster NonUniformSim::qy_raster() const { return leaf_raster(*this, 2); }

void NonUniformSim::rebuild_topology() {
  faces = enumerate_faces(grid, true);
  if (scheme == SolverKind::acc) {
    acc_q.assign(faces.interior.size(), 0.0);
    acc_qb.assign(faces.boundary.size(), 0.0);
  }
}

std::vector<FlowCoeffs> restrict_flow_to_leaves(const QuadGrid& grid,
                                                const std::vector<FlowCoeffs>& fine,
                                                const FilterBank& fb) {
  std::vector<FlowCoeffs> out(grid.leaves.size());
  std::vector<FlowCoeffs> scaling = fine;
  int w = grid.M << grid.L;
  for (int level = grid.L; level >= 0; --level) {
    // Record values at leaves of this level.
    for (size_t k = 0; k < grid.leaves.size(); ++k) {
      const LeafId& l = grid.leaves[k];
      if (l.level == level) out[k] = scaling[static_cast<size_t>(l.j) * w + l.i];
    }
    if (level == 0) break;
    const int cw = w / 2;
    std::vector<FlowCoeffs> coarser(static_cast<size_t>(cw) * ((grid.N << (level - 1))));
    for (int j = 0; j < (grid.N << (level - 1)); ++j) {
      for (int i = 0; i < cw; ++i) {
        const std::array<FlowCoeffs, 4> kids = {
            scaling[size_t(2 * j) * w + 2 * i], scaling[size_t(2 * j) * w + 2 * i + 1],
            scaling[size_t(2 * j + 1) * w + 2 * i], scaling[size_t(2 * j + 1) * w + 2 * i + 1]};
        coarser[static_cast<size_t>(j) * cw + i] = encode_flow(kids, fb).parent;
      }
    }
    scaling.swap(coarser);
    w = cw;
  }
  return out;
}

NonUniformSim make_nonuniform_sim(const ScenarioConfig& cfg, const Raster& dem,
                                  const NonUniformGrid& nug) {
  NonUniformSim s;
  s.scheme = cfg.solver == SolverKind::mwdg2   ? SolverKind::dg2
             : cfg.solver == SolverKind::hwfv1 ? SolverKind::fv1
                                               : cfg.solver;
  s.grid = nug.grid;
  s.z = nug.topo;
  if (!is_graded(s.grid))
    throw StructureError("non-uniform solvers require a graded (2:1) grid");
  s.g = cfg.g;
  s.h_dry = cfg.h_dry;
  s.courant = cfg.courant_for(cfg.solver);
  s.bc = cfg.boundary;

  const size_t n = s.grid.leaves.size();
  s.nman.assign(n, cfg.manning);
  if (!cfg.manning_raster.empty()) {
    const Raster mr = read_ascii_grid(cfg.manning_raster);
    for (size_t c = 0; c < n; ++c) {
      const int col = std::clamp(int((s.grid.leaf_xc(int(c)) - mr.xll) / mr.cellsize), 0,
                                 mr.ncols - 1);
      const int row = std::clamp(mr.nrows - 1 - int((s.grid.leaf_yc(int(c)) - mr.yll) / mr.cellsize),
                                 0, mr.nrows - 1);
      s.nman[c] = mr.at(row, col);
    }
  }

  s.u.assign(n, FlowCoeffs{});
  if (!cfg.initial_depth_raster.empty()) {
    const Raster hr = read_ascii_grid(cfg.initial_depth_raster);
    if (hr.ncols != dem.ncols || hr.nrows != dem.nrows)
      throw ConfigError("initial_depth_raster geometry must match the DEM");
    const FieldGrid hg = project_raster(hr, s.grid.L);
    std::vector<FlowCoeffs> fine(hg.cells.size());
    for (size_t c = 0; c < hg.cells.size(); ++c) fine[c].h = hg.cells[c];
    s.u = restrict_flow_to_leaves(s.grid, fine, filter_bank(WaveletKind::mw));
  } else if (cfg.initial_surface) {
    for (size_t c = 0; c < n; ++c) s.u[c] = flow_from_surface(s.z[c], *cfg.initial_surface);
  } else if (cfg.initial_depth > 0.0) {
    for (size_t c = 0; c < n; ++c) s.u[c].h = {cfg.initial_depth, 0.0, 0.0};
  }
  if (s.scheme != SolverKind::dg2) {
    for (size_t c = 0; c < n; ++c) {
      s.z[c].c1x = s.z[c].c1y = 0.0;
      s.u[c].h.c1x = s.u[c].h.c1y = 0.0;
      s.u[c].qx = {};
      s.u[c].qy = {};
    }
  }
  s.positivity(s.u, 1);

  // Inflow rectangles are given in fine-grid cells.
  for (const InflowSpec& spec : cfg.inflows) {
    if (spec.i0 < 0 || spec.j0 < 0 || spec.i1 >= (s.grid.M << s.grid.L) ||
        spec.j1 >= (s.grid.N << s.grid.L))
      throw ConfigError("inflow region outside the domain");
    ResolvedInflow f;
    f.hydro = read_hydrograph_csv(spec.hydrograph_path);
    std::unordered_map<int32_t, int32_t> counts;
    for (int j = spec.j0; j <= spec.j1; ++j)
      for (int i = spec.i0; i <= spec.i1; ++i) {
        const int leaf = s.grid.find_containing(i, j);
        if (leaf < 0) throw StructureError("inflow cell not covered by any leaf");
        counts[leaf] += 1;
        f.region_cells += 1;
      }
    f.targets.assign(counts.begin(), counts.end());
    std::sort(f.targets.begin(), f.targets.end());
    s.inflows.push_back(std::move(f));
  }

  for (const GaugeSpec& gp : cfg.gauges) {
    if (s.grid.find_point(gp.x, gp.y) < 0) throw ConfigError("gauge point outside the domain");
  }

  s.rebuild_topology();
  return s;
}

}  // namespace floodmra

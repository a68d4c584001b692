#include "floodmra/solver_adaptive.hpp"

#include <algorithm>
#include <cmath>

#include "floodmra/errors.hpp"

namespace floodmra {

namespace {
constexpr uint8_t kUnknown = 0;
constexpr uint8_t kLeafNode = 1;
constexpr uint8_t kInternal = 2;  // scaling and details both valid
}  // namespace

void AdaptiveSim::encode_up() {
  const int L = ztree.L;
  lvl_.resize(L + 1);
  for (int level = 0; level <= L; ++level) {
    const size_t n = static_cast<size_t>(ztree.M << level) * (ztree.N << level);
    lvl_[level].scaling.assign(n, FlowCoeffs{});
    lvl_[level].known.assign(n, kUnknown);
    if (level < L) {
      lvl_[level].dh.assign(n, DetailTriple{});
      lvl_[level].dqx.assign(n, DetailTriple{});
      lvl_[level].dqy.assign(n, DetailTriple{});
    }
  }
  for (size_t k = 0; k < sim.grid.leaves.size(); ++k) {
    const LeafId& l = sim.grid.leaves[k];
    const size_t node = ztree.node(l.level, l.i, l.j);
    lvl_[l.level].scaling[node] = sim.u[k];
    lvl_[l.level].known[node] = kLeafNode;
  }
  const FilterBank& fb = filter_bank(kind);
  for (int level = L - 1; level >= 0; --level) {
    const int w = ztree.M << level, h = ztree.N << level;
    const int cw = w * 2;
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        const size_t node = ztree.node(level, i, j);
        if (lvl_[level].known[node] != kUnknown) continue;
        const size_t k0 = static_cast<size_t>(2 * j) * cw + 2 * i;
        const size_t k2 = static_cast<size_t>(2 * j + 1) * cw + 2 * i;
        const auto& kn = lvl_[level + 1].known;
        if (!(kn[k0] && kn[k0 + 1] && kn[k2] && kn[k2 + 1])) continue;
        const auto& sc = lvl_[level + 1].scaling;
        const FlowEncodeResult e = encode_flow({sc[k0], sc[k0 + 1], sc[k2], sc[k2 + 1]}, fb);
        lvl_[level].scaling[node] = e.parent;
        lvl_[level].dh[node] = e.h;
        lvl_[level].dqx[node] = e.qx;
        lvl_[level].dqy[node] = e.qy;
        lvl_[level].known[node] = kInternal;
      }
    }
  }
}

void AdaptiveSim::flag(double nh, double nqx, double nqy) {
  for (int level = 0; level < ztree.L; ++level) {
    const size_t n = ztree.details[level].size();
    for (size_t k = 0; k < n; ++k) {
      double d = normalize_detail(ztree.details[level][k], ztree.field_norm);
      if (lvl_[level].known[k] == kInternal) {
        d = std::max(d, normalize_detail(lvl_[level].dh[k], nh));
        d = std::max(d, normalize_detail(lvl_[level].dqx[k], nqx));
        d = std::max(d, normalize_detail(lvl_[level].dqy[k], nqy));
      }
      ztree.flags[level][k] = d >= eps;
    }
  }
  ancestor_closure(ztree);
}

void AdaptiveSim::buffer_ring() {
  for (int level = 0; level < ztree.L; ++level) {
    const int w = ztree.width(level), h = ztree.height(level);
    std::vector<uint8_t> extra(ztree.flags[level].size(), 0);
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        if (!ztree.flags[level][ztree.node(level, i, j)]) continue;
        for (int dj = -1; dj <= 1; ++dj)
          for (int di = -1; di <= 1; ++di) {
            const int ni = i + di, nj = j + dj;
            if (ni < 0 || nj < 0 || ni >= w || nj >= h) continue;
            extra[ztree.node(level, ni, nj)] = 1;
          }
      }
    }
    for (size_t k = 0; k < extra.size(); ++k)
      if (extra[k]) ztree.flags[level][k] = 1;
  }
  ancestor_closure(ztree);
}

std::vector<FlowCoeffs> AdaptiveSim::transfer(const QuadGrid& new_grid) const {
  std::vector<FlowCoeffs> out(new_grid.leaves.size());
  const FilterBank& fb = filter_bank(kind);
  struct Item {
    int level, i, j;
    FlowCoeffs v;
  };
  std::vector<Item> stack;
  for (int j = 0; j < ztree.N; ++j)
    for (int i = 0; i < ztree.M; ++i)
      stack.push_back({0, i, j, lvl_[0].scaling[ztree.node(0, i, j)]});
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    const bool is_leaf = it.level == ztree.L || !ztree.flagged(it.level, it.i, it.j);
    if (is_leaf) {
      const int idx = new_grid.find(it.level, it.i, it.j);
      if (idx < 0) throw StructureError("adaptive transfer: leaf set does not match flags");
      // A leaf surviving unchanged keeps its coefficients bit-for-bit.
      const int old = sim.grid.find(it.level, it.i, it.j);
      out[idx] = old >= 0 ? sim.u[old] : it.v;
      continue;
    }
    const size_t node = ztree.node(it.level, it.i, it.j);
    std::array<FlowCoeffs, 4> kids;
    if (lvl_[it.level].known[node] == kInternal) {
      kids = decode_flow(it.v, lvl_[it.level].dh[node], lvl_[it.level].dqx[node],
                         lvl_[it.level].dqy[node], fb);
    } else {
      // Flow information below the old leaves was discarded by thresholding.
      kids = decode_flow(it.v, DetailTriple{}, DetailTriple{}, DetailTriple{}, fb);
    }
    for (int k = 0; k < 4; ++k) {
      const int ci = k & 1, cj = k >> 1;
      stack.push_back({it.level + 1, 2 * it.i + ci, 2 * it.j + cj, kids[k]});
    }
  }
  return out;
}

void AdaptiveSim::adapt(double t_now) {
  encode_up();

  double nh = 0.0, nqx = 0.0, nqy = 0.0;
  for (const FlowCoeffs& f : sim.u) {
    nh = std::max(nh, std::abs(f.h.c0));
    nqx = std::max(nqx, std::abs(f.qx.c0));
    nqy = std::max(nqy, std::abs(f.qy.c0));
  }

  flag(nh, nqx, nqy);
  buffer_ring();
  grade_flags(ztree);

  const FilterBank& fb = filter_bank(kind);
  NonUniformGrid nug = assemble_grid(ztree, fb);
  std::vector<FlowCoeffs> new_u = transfer(nug.grid);

  sim.grid = nug.grid;
  sim.z = std::move(nug.topo);
  sim.u = std::move(new_u);
  if (sim.scheme != SolverKind::dg2) {
    for (size_t c = 0; c < sim.u.size(); ++c) {
      sim.z[c].c1x = sim.z[c].c1y = 0.0;
      sim.u[c].h.c1x = sim.u[c].h.c1y = 0.0;
      sim.u[c].qx.c1x = sim.u[c].qx.c1y = 0.0;
      sim.u[c].qy.c1x = sim.u[c].qy.c1y = 0.0;
    }
  }

  // Manning per new leaf and inflow targets from the stored fine rectangles.
  remap_after_adapt();

  sim.rebuild_topology();
  element_log.emplace_back(t_now, static_cast<int64_t>(sim.grid.leaves.size()));
}

void AdaptiveSim::remap_after_adapt() {
  const size_t n = sim.grid.leaves.size();
  sim.nman.assign(n, manning_value_);
  if (manning_raster_) {
    const Raster& mr = *manning_raster_;
    for (size_t c = 0; c < n; ++c) {
      const int col =
          std::clamp(int((sim.grid.leaf_xc(int(c)) - mr.xll) / mr.cellsize), 0, mr.ncols - 1);
      const int row = std::clamp(
          mr.nrows - 1 - int((sim.grid.leaf_yc(int(c)) - mr.yll) / mr.cellsize), 0, mr.nrows - 1);
      sim.nman[c] = mr.at(row, col);
    }
  }
  sim.inflows.clear();
  for (const RawInflow& raw : raw_inflows_) {
    ResolvedInflow f;
    f.hydro = raw.hydro;
    std::unordered_map<int32_t, int32_t> counts;
    for (int j = raw.j0; j <= raw.j1; ++j)
      for (int i = raw.i0; i <= raw.i1; ++i) {
        const int leaf = sim.grid.find_containing(i, j);
        if (leaf < 0) throw StructureError("inflow cell not covered by any leaf");
        counts[leaf] += 1;
        f.region_cells += 1;
      }
    f.targets.assign(counts.begin(), counts.end());
    std::sort(f.targets.begin(), f.targets.end());
    sim.inflows.push_back(std::move(f));
  }
}

void AdaptiveSim::step(double dt, int threads) {
  sim.step(dt, threads);
  ++steps_since_adapt;
}

AdaptiveSim make_adaptive_sim(const ScenarioConfig& cfg, const Raster& dem) {
  if (!solver_is_adaptive(cfg.solver))
    throw ConfigError("adaptive sim requires solver mwdg2 or hwfv1");
  AdaptiveSim a;
  a.kind = cfg.solver == SolverKind::mwdg2 ? WaveletKind::mw : WaveletKind::hw;
  a.eps = cfg.epsilon;
  a.adapt_every = cfg.adapt_every;
  a.ztree = topography_tree(dem, cfg.max_level, a.kind);

  int M = 0, N = 0;
  const FieldGrid fine = project_raster(dem, cfg.max_level, &M, &N);
  NonUniformGrid nug0;
  nug0.grid = make_uniform_quadgrid(cfg.max_level, M, N, fine.R, fine.x0, fine.y0,
                                    cfg.max_level);
  nug0.topo = fine.cells;
  a.sim = make_nonuniform_sim(cfg, dem, nug0);
  a.sim.encode_pairing = &filter_bank(a.kind);

  a.manning_value_ = cfg.manning;
  if (!cfg.manning_raster.empty()) a.manning_raster_ = read_ascii_grid(cfg.manning_raster);
  for (size_t k = 0; k < cfg.inflows.size(); ++k) {
    const InflowSpec& spec = cfg.inflows[k];
    a.raw_inflows_.push_back({a.sim.inflows[k].hydro, spec.i0, spec.j0, spec.i1, spec.j1});
  }

  a.adapt(0.0);
  return a;
}

}  // namespace floodmra

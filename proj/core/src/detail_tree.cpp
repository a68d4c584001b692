#include "floodmra/detail_tree.hpp"

#include <algorithm>
#include <cmath>

#include "floodmra/errors.hpp"

namespace floodmra {

DetailTree build_detail_tree(const FieldGrid& fine, int L, int M, int N, const FilterBank& fb) {
  if (fine.nx != (M << L) || fine.ny != (N << L))
    throw StructureError("build_detail_tree: field is not an (M 2^L) x (N 2^L) grid");
  DetailTree t;
  t.L = L;
  t.M = M;
  t.N = N;
  t.Rfine = fine.R;
  t.x0 = fine.x0;
  t.y0 = fine.y0;
  t.kind = fb.kind;

  t.field_norm = 0.0;
  for (const PlanarCoeffs& c : fine.cells) t.field_norm = std::max(t.field_norm, std::abs(c.c0));

  t.details.resize(L);
  t.flags.resize(L);
  for (int level = 0; level < L; ++level) {
    const size_t n = static_cast<size_t>(M << level) * (N << level);
    t.details[level].resize(n);
    t.flags[level].assign(n, 0);
  }

  std::vector<PlanarCoeffs> scaling = fine.cells;
  for (int level = L - 1; level >= 0; --level) {
    const int w = t.width(level), h = t.height(level);
    const int cw = w * 2;
    std::vector<PlanarCoeffs> coarser(static_cast<size_t>(w) * h);
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        const std::array<PlanarCoeffs, 4> kids = {
            scaling[size_t(2 * j) * cw + 2 * i],       // SW
            scaling[size_t(2 * j) * cw + 2 * i + 1],   // SE
            scaling[size_t(2 * j + 1) * cw + 2 * i],   // NW
            scaling[size_t(2 * j + 1) * cw + 2 * i + 1]};  // NE
        const EncodeResult e = encode(kids, fb);
        coarser[t.node(level, i, j)] = e.parent;
        t.details[level][t.node(level, i, j)] = e.d;
      }
    }
    scaling.swap(coarser);
  }
  t.coarse = std::move(scaling);
  return t;
}

void ancestor_closure(DetailTree& tree) {
  for (int level = tree.L - 1; level >= 1; --level) {
    const int w = tree.width(level), h = tree.height(level);
    for (int j = 0; j < h; ++j)
      for (int i = 0; i < w; ++i)
        if (tree.flags[level][tree.node(level, i, j)])
          tree.flags[level - 1][tree.node(level - 1, i / 2, j / 2)] = 1;
  }
}

void flag_significant(DetailTree& tree, double eps) {
  if (eps < 0.0) throw DomainError("flag_significant: eps must be >= 0");
  for (int level = 0; level < tree.L; ++level) {
    const size_t n = tree.details[level].size();
    for (size_t k = 0; k < n; ++k)
      tree.flags[level][k] = normalize_detail(tree.details[level][k], tree.field_norm) >= eps;
  }
  ancestor_closure(tree);
}

bool flags_graded(const DetailTree& tree) {
  // A flagged node at level l >= 1 requires the parents of its edge
  // neighbours at level l to be flagged.
  for (int level = 1; level < tree.L; ++level) {
    const int w = tree.width(level), h = tree.height(level);
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        if (!tree.flags[level][tree.node(level, i, j)]) continue;
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          const int ni = i + di[d], nj = j + dj[d];
          if (ni < 0 || nj < 0 || ni >= w || nj >= h) continue;
          if (!tree.flags[level - 1][tree.node(level - 1, ni / 2, nj / 2)]) return false;
        }
      }
    }
  }
  return true;
}

void grade_flags(DetailTree& tree) {
  for (int level = tree.L - 1; level >= 1; --level) {
    const int w = tree.width(level), h = tree.height(level);
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        if (!tree.flags[level][tree.node(level, i, j)]) continue;
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          const int ni = i + di[d], nj = j + dj[d];
          if (ni < 0 || nj < 0 || ni >= w || nj >= h) continue;
          tree.flags[level - 1][tree.node(level - 1, ni / 2, nj / 2)] = 1;
        }
      }
    }
  }
}

std::vector<LeafId> leaves_from_flags(const DetailTree& tree) {
  std::vector<LeafId> leaves;
  // A node is a leaf when it is unflagged and (level == 0 or its parent is
  // flagged); flagged level-(L-1) nodes spawn level-L leaves.
  for (int level = 0; level <= tree.L; ++level) {
    const int w = tree.M << level, h = tree.N << level;
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        const bool self_flagged = level < tree.L && tree.flagged(level, i, j);
        const bool parent_flagged = level == 0 || tree.flagged(level - 1, i / 2, j / 2);
        if (!self_flagged && parent_flagged) leaves.push_back({level, i, j});
      }
    }
  }
  return leaves;
}

NonUniformGrid assemble_grid(const DetailTree& tree, const FilterBank& fb) {
  NonUniformGrid out;
  out.grid = make_quadgrid(tree.L, tree.M, tree.N, tree.Rfine, tree.x0, tree.y0,
                           leaves_from_flags(tree));
  out.topo.assign(out.grid.leaves.size(), PlanarCoeffs{});

  // Descend the flag tree from the level-0 coefficients, decoding with the
  // stored details wherever the descent continues.
  struct Item {
    int level, i, j;
    PlanarCoeffs z;
  };
  std::vector<Item> stack;
  for (int j = 0; j < tree.N; ++j)
    for (int i = 0; i < tree.M; ++i)
      stack.push_back({0, i, j, tree.coarse[tree.node(0, i, j)]});
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    if (it.level == tree.L || !tree.flagged(it.level, it.i, it.j)) {
      const int leaf = out.grid.find(it.level, it.i, it.j);
      if (leaf < 0) throw StructureError("assemble_grid: leaf set does not match flags");
      out.topo[leaf] = it.z;
      continue;
    }
    const auto kids = decode(it.z, tree.details[it.level][tree.node(it.level, it.i, it.j)], fb);
    for (int k = 0; k < 4; ++k) {
      const int ci = (k & 1), cj = (k >> 1);
      stack.push_back({it.level + 1, 2 * it.i + ci, 2 * it.j + cj, kids[k]});
    }
  }
  return out;
}

DetailTree topography_tree(const Raster& dem, int L, WaveletKind kind) {
  int M = 0, N = 0;
  const FieldGrid fine = project_raster(dem, L, &M, &N);
  return build_detail_tree(fine, L, M, N, filter_bank(kind));
}

NonUniformGrid generate_static_grid(const Raster& dem, double eps, int L, bool graded,
                                    WaveletKind kind) {
  DetailTree tree = topography_tree(dem, L, kind);
  flag_significant(tree, eps);
  if (graded) grade_flags(tree);
  return assemble_grid(tree, filter_bank(kind));
}

}  // namespace floodmra

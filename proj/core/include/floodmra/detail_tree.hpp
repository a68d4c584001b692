#pragma once

#include <vector>

#include "floodmra/quadgrid.hpp"
#include "floodmra/wavelets.hpp"

namespace floodmra {

// Tree of encoded details over levels 0..L-1, plus the level-0 scaling
// coefficients. Node (level, i, j) is the parent of the four level+1
// children (2i+ci, 2j+cj).
struct DetailTree {
  int L = 0, M = 1, N = 1;
  double Rfine = 1.0;
  double x0 = 0.0, y0 = 0.0;
  WaveletKind kind = WaveletKind::mw;
  double field_norm = 1.0;  // max |c0| on the level-L grid

  std::vector<std::vector<DetailTriple>> details;  // [level][j*(M<<level)+i]
  std::vector<std::vector<uint8_t>> flags;         // significance per node
  std::vector<PlanarCoeffs> coarse;                // level-0 scaling (M x N)

  int width(int level) const { return M << level; }
  int height(int level) const { return N << level; }
  size_t node(int level, int i, int j) const {
    return static_cast<size_t>(j) * width(level) + i;
  }
  bool flagged(int level, int i, int j) const { return flags[level][node(level, i, j)] != 0; }
};

// Recursive application of the two-scale encoding, L times, from the fine
// level-L coefficient field (fine.nx = M 2^L, fine.ny = N 2^L).
DetailTree build_detail_tree(const FieldGrid& fine, int L, int M, int N, const FilterBank& fb);

// Node significant iff its normalized detail >= eps; every ancestor of a
// significant node is flagged as well.
void flag_significant(DetailTree& tree, double eps);
void ancestor_closure(DetailTree& tree);

// Minimal superset of flags such that the induced leaf set satisfies the
// 2:1 rule on every face. Idempotent.
void grade_flags(DetailTree& tree);
bool flags_graded(const DetailTree& tree);

// Leaves = first unflagged nodes on each root-to-bottom path.
std::vector<LeafId> leaves_from_flags(const DetailTree& tree);

// Decode the stored details down the flag tree; leaf coefficients are the
// decoded values (grading-forced descents use the stored details too, so
// topography stays the exact two-scale restriction).
NonUniformGrid assemble_grid(const DetailTree& tree, const FilterBank& fb);

// Full static pipeline: project -> encode -> flag -> (grade) -> assemble.
NonUniformGrid generate_static_grid(const Raster& dem, double eps, int L, bool graded,
                                    WaveletKind kind = WaveletKind::mw);

// The tree for `generate_static_grid`, kept for adaptive solvers that need
// exact topography details at every node.
DetailTree topography_tree(const Raster& dem, int L, WaveletKind kind);

}  // namespace floodmra

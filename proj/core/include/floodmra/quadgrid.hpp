#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "floodmra/config.hpp"
#include "floodmra/field.hpp"
#include "floodmra/raster.hpp"

namespace floodmra {

// Bit-interleaved code: x bits in even positions, y bits in odd positions.
uint64_t morton_encode(uint32_t i, uint32_t j);
void morton_decode(uint64_t code, uint32_t& i, uint32_t& j);

// One leaf of the quadtree. (i, j) index the element at its own level;
// i runs east, j runs north from the domain's SW corner.
struct LeafId {
  int level = 0;
  int i = 0;
  int j = 0;
  bool operator==(const LeafId&) const = default;
};

// One flux-evaluation unit of an interior face: for homogeneous faces the
// whole face, for non-homogeneous faces one fine sub-face.
struct FaceSegment {
  int left = -1;   // leaf west/south of the face
  int right = -1;  // leaf east/north of the face
  uint8_t x_normal = 1;
  double cx = 0.0, cy = 0.0;  // segment centre
  double len = 0.0;           // = size of the finer leaf
};

// A leaf side at the domain edge.
struct BoundarySegment {
  int leaf = -1;
  Side side = Side::north;
  double cx = 0.0, cy = 0.0;
  double len = 0.0;
};

struct NeighborQuery {
  std::vector<int> leaves;  // adjacent leaf indices, empty at the domain edge
  bool boundary = false;
};

// Graded or ungraded quadtree of leaves exactly tiling an (M 2^L) x (N 2^L)
// fine-element domain. Leaf payloads live in parallel vectors owned by the
// callers, indexed by position in `leaves`.
struct QuadGrid {
  int L = 0, M = 1, N = 1;
  double Rfine = 1.0;   // finest element size (m)
  double x0 = 0.0, y0 = 0.0;
  std::vector<LeafId> leaves;
  std::unordered_map<uint64_t, int32_t> index;

  int levels() const { return L + 1; }
  double leaf_size(int idx) const { return Rfine * double(1 << (L - leaves[idx].level)); }
  double leaf_xc(int idx) const {
    const LeafId& l = leaves[idx];
    return x0 + (l.i + 0.5) * Rfine * double(1 << (L - l.level));
  }
  double leaf_yc(int idx) const {
    const LeafId& l = leaves[idx];
    return y0 + (l.j + 0.5) * Rfine * double(1 << (L - l.level));
  }
  // Fine cells covered per leaf; sums to (M 2^L)(N 2^L) on a tiling grid.
  int64_t leaf_weight(int idx) const {
    const int d = L - leaves[idx].level;
    return int64_t(1) << (2 * d);
  }

  int find(int level, int i, int j) const;
  // Deepest leaf containing fine cell (fi, fj).
  int find_containing(int fi, int fj) const;
  int find_point(double x, double y) const;

  void rebuild_index();
  bool in_domain(int level, int i, int j) const;
};

QuadGrid make_quadgrid(int L, int M, int N, double Rfine, double x0, double y0,
                       std::vector<LeafId> leaves);

// Uniform level-`level` grid over the same domain.
QuadGrid make_uniform_quadgrid(int L, int M, int N, double Rfine, double x0, double y0,
                               int level);

// Every leaf sharing positive-length boundary on that side (1 on homogeneous
// sides, 2 on a graded grid, more if ungraded); boundary flag at the edge.
NeighborQuery neighbors(const QuadGrid& g, int leaf, Side side);

// Exhaustive scan: no face pairs leaves more than one level apart.
bool is_graded(const QuadGrid& g);

struct FaceLists {
  std::vector<FaceSegment> interior;
  std::vector<BoundarySegment> boundary;
  // Per leaf, per side (N,E,S,W): indices into `interior` (positive k) or
  // `boundary` (encoded as -1-k).
  std::vector<std::array<std::vector<int32_t>, 4>> sides;
};

// Every leaf-boundary segment exactly once. Requires a graded grid when
// `require_graded`.
FaceLists enumerate_faces(const QuadGrid& g, bool require_graded = true);

// Evaluate a per-leaf planar field at every fine-cell centre.
Raster sample_to_raster(const QuadGrid& g, const std::vector<PlanarCoeffs>& field,
                        double nodata = -9999.0);

// Non-uniform grid with per-leaf topography coefficients.
struct NonUniformGrid {
  QuadGrid grid;
  std::vector<PlanarCoeffs> topo;
};

void write_nug(const NonUniformGrid& g, const std::string& path);
NonUniformGrid read_nug(const std::string& path);

struct GridStats {
  std::vector<int64_t> count_per_level;
  int64_t total = 0;
  int64_t uniform_total = 0;  // leaves of the fully refined grid
};
GridStats grid_stats(const QuadGrid& g);
std::string format_grid_stats(const GridStats& s);

}  // namespace floodmra

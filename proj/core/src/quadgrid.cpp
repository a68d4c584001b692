#include "floodmra/quadgrid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "floodmra/errors.hpp"

namespace floodmra {

namespace {

inline uint64_t spread_bits(uint32_t v) {
  uint64_t x = v;
  x &= 0x00000000ffffffffULL;
  x = (x | (x << 16)) & 0x0000ffff0000ffffULL;
  x = (x | (x << 8)) & 0x00ff00ff00ff00ffULL;
  x = (x | (x << 4)) & 0x0f0f0f0f0f0f0f0fULL;
  x = (x | (x << 2)) & 0x3333333333333333ULL;
  x = (x | (x << 1)) & 0x5555555555555555ULL;
  return x;
}

inline uint32_t compact_bits(uint64_t x) {
  x &= 0x5555555555555555ULL;
  x = (x | (x >> 1)) & 0x3333333333333333ULL;
  x = (x | (x >> 2)) & 0x0f0f0f0f0f0f0f0fULL;
  x = (x | (x >> 4)) & 0x00ff00ff00ff00ffULL;
  x = (x | (x >> 8)) & 0x0000ffff0000ffffULL;
  x = (x | (x >> 16)) & 0x00000000ffffffffULL;
  return static_cast<uint32_t>(x);
}

inline uint64_t leaf_key(int level, int i, int j) {
  return (uint64_t(level) << 58) | morton_encode(uint32_t(i), uint32_t(j));
}

}  // namespace

uint64_t morton_encode(uint32_t i, uint32_t j) {
  return spread_bits(i) | (spread_bits(j) << 1);
}

void morton_decode(uint64_t code, uint32_t& i, uint32_t& j) {
  i = compact_bits(code);
  j = compact_bits(code >> 1);
}

bool QuadGrid::in_domain(int level, int i, int j) const {
  if (level < 0 || level > L) return false;
  return i >= 0 && j >= 0 && i < (M << level) && j < (N << level);
}

int QuadGrid::find(int level, int i, int j) const {
  if (!in_domain(level, i, j)) throw DomainError("QuadGrid::find: index out of range");
  auto it = index.find(leaf_key(level, i, j));
  return it == index.end() ? -1 : it->second;
}

int QuadGrid::find_containing(int fi, int fj) const {
  if (!in_domain(L, fi, fj)) return -1;
  for (int level = L; level >= 0; --level) {
    auto it = index.find(leaf_key(level, fi >> (L - level), fj >> (L - level)));
    if (it != index.end()) return it->second;
  }
  return -1;
}

int QuadGrid::find_point(double x, double y) const {
  const int fi = static_cast<int>(std::floor((x - x0) / Rfine));
  const int fj = static_cast<int>(std::floor((y - y0) / Rfine));
  return find_containing(std::clamp(fi, 0, (M << L) - 1), std::clamp(fj, 0, (N << L) - 1));
}

void QuadGrid::rebuild_index() {
  index.clear();
  index.reserve(leaves.size() * 2);
  for (size_t k = 0; k < leaves.size(); ++k) {
    const LeafId& l = leaves[k];
    index[leaf_key(l.level, l.i, l.j)] = static_cast<int32_t>(k);
  }
}

QuadGrid make_quadgrid(int L, int M, int N, double Rfine, double x0, double y0,
                       std::vector<LeafId> leaves) {
  QuadGrid g;
  g.L = L;
  g.M = M;
  g.N = N;
  g.Rfine = Rfine;
  g.x0 = x0;
  g.y0 = y0;
  std::sort(leaves.begin(), leaves.end(), [](const LeafId& a, const LeafId& b) {
    if (a.level != b.level) return a.level < b.level;
    if (a.j != b.j) return a.j < b.j;
    return a.i < b.i;
  });
  g.leaves = std::move(leaves);
  g.rebuild_index();
  int64_t weight = 0;
  for (size_t k = 0; k < g.leaves.size(); ++k) {
    if (!g.in_domain(g.leaves[k].level, g.leaves[k].i, g.leaves[k].j))
      throw StructureError("make_quadgrid: leaf outside domain");
    weight += g.leaf_weight(static_cast<int>(k));
  }
  const int64_t want = int64_t(M) * N * (int64_t(1) << (2 * L));
  if (weight != want) throw StructureError("make_quadgrid: leaves do not tile the domain");
  return g;
}

QuadGrid make_uniform_quadgrid(int L, int M, int N, double Rfine, double x0, double y0,
                               int level) {
  std::vector<LeafId> leaves;
  leaves.reserve(size_t(M << level) * size_t(N << level));
  for (int j = 0; j < (N << level); ++j)
    for (int i = 0; i < (M << level); ++i) leaves.push_back({level, i, j});
  return make_quadgrid(L, M, N, Rfine, x0, y0, std::move(leaves));
}

NeighborQuery neighbors(const QuadGrid& g, int leaf, Side side) {
  if (leaf < 0 || leaf >= static_cast<int>(g.leaves.size()))
    throw StructureError("neighbors: leaf not in grid");
  const LeafId l = g.leaves[leaf];
  const int di = side == Side::east ? 1 : side == Side::west ? -1 : 0;
  const int dj = side == Side::north ? 1 : side == Side::south ? -1 : 0;
  const int ni = l.i + di;
  const int nj = l.j + dj;
  NeighborQuery out;
  if (!g.in_domain(l.level, ni, nj)) {
    out.boundary = true;
    return out;
  }
  // Same level or coarser: probe ancestors.
  for (int level = l.level; level >= 0; --level) {
    const int sh = l.level - level;
    const int idx = g.find(level, ni >> sh, nj >> sh);
    if (idx >= 0) {
      out.leaves.push_back(idx);
      return out;
    }
  }
  // Finer: collect the leaves of the neighbor region touching this side.
  std::vector<LeafId> stack{{l.level, ni, nj}};
  while (!stack.empty()) {
    const LeafId n = stack.back();
    stack.pop_back();
    const int idx = n.level <= g.L ? g.find(n.level, n.i, n.j) : -1;
    if (idx >= 0) {
      out.leaves.push_back(idx);
      continue;
    }
    if (n.level >= g.L) throw StructureError("neighbors: grid does not tile the domain");
    // Children adjacent to the querying leaf's side.
    const int ci0 = side == Side::east ? 0 : side == Side::west ? 1 : 0;
    const int ci1 = side == Side::east ? 0 : side == Side::west ? 1 : 1;
    const int cj0 = side == Side::north ? 0 : side == Side::south ? 1 : 0;
    const int cj1 = side == Side::north ? 0 : side == Side::south ? 1 : 1;
    for (int cj = cj0; cj <= cj1; ++cj)
      for (int ci = ci0; ci <= ci1; ++ci)
        stack.push_back({n.level + 1, 2 * n.i + ci, 2 * n.j + cj});
  }
  std::sort(out.leaves.begin(), out.leaves.end(), [&g](int a, int b) {
    const LeafId& la = g.leaves[a];
    const LeafId& lb = g.leaves[b];
    const int ja = la.j << (g.L - la.level), jb = lb.j << (g.L - lb.level);
    if (ja != jb) return ja < jb;
    return (la.i << (g.L - la.level)) < (lb.i << (g.L - lb.level));
  });
  return out;
}

bool is_graded(const QuadGrid& g) {
  for (int k = 0; k < static_cast<int>(g.leaves.size()); ++k) {
    for (Side s : {Side::north, Side::east, Side::south, Side::west}) {
      const NeighborQuery q = neighbors(g, k, s);
      for (int nb : q.leaves)
        if (std::abs(g.leaves[nb].level - g.leaves[k].level) > 1) return false;
    }
  }
  return true;
}

FaceLists enumerate_faces(const QuadGrid& g, bool require_graded) {
  FaceLists fl;
  fl.sides.resize(g.leaves.size());
  for (int k = 0; k < static_cast<int>(g.leaves.size()); ++k) {
    const LeafId l = g.leaves[k];
    const double size = g.leaf_size(k);
    const double xc = g.leaf_xc(k);
    const double yc = g.leaf_yc(k);
    for (Side s : {Side::north, Side::east, Side::south, Side::west}) {
      const NeighborQuery q = neighbors(g, k, s);
      const bool xn = (s == Side::east || s == Side::west);
      if (q.boundary) {
        BoundarySegment b;
        b.leaf = k;
        b.side = s;
        b.len = size;
        b.cx = xc + (s == Side::east ? size / 2 : s == Side::west ? -size / 2 : 0.0);
        b.cy = yc + (s == Side::north ? size / 2 : s == Side::south ? -size / 2 : 0.0);
        fl.boundary.push_back(b);
        fl.sides[k][int(s)].push_back(-1 - int(fl.boundary.size() - 1));
        continue;
      }
      const int first = q.leaves.front();
      const int nb_level = g.leaves[first].level;
      if (nb_level < l.level) continue;  // coarse side owns the face
      if (nb_level == l.level && (s == Side::west || s == Side::south))
        continue;  // owned by the leaf to the west/south
      if (require_graded && q.leaves.size() > 2)
        throw StructureError("enumerate_faces: grid is not graded");
      for (int nb : q.leaves) {
        if (require_graded && g.leaves[nb].level > l.level + 1)
          throw StructureError("enumerate_faces: grid is not graded");
        FaceSegment seg;
        seg.x_normal = xn ? 1 : 0;
        const double nlen = g.leaf_size(nb);
        seg.len = std::min(size, nlen);
        // Segment centre sits at the finer leaf's face centre.
        const double nxc = g.leaf_xc(nb);
        const double nyc = g.leaf_yc(nb);
        if (xn) {
          seg.cx = xc + (s == Side::east ? size / 2 : -size / 2);
          seg.cy = nyc;
          seg.left = (s == Side::east) ? k : nb;
          seg.right = (s == Side::east) ? nb : k;
        } else {
          seg.cy = yc + (s == Side::north ? size / 2 : -size / 2);
          seg.cx = nxc;
          seg.left = (s == Side::north) ? k : nb;
          seg.right = (s == Side::north) ? nb : k;
        }
        fl.interior.push_back(seg);
      }
    }
  }
  // Populate per-leaf side lists from the owned segment set.
  for (int si = 0; si < static_cast<int>(fl.interior.size()); ++si) {
    const FaceSegment& seg = fl.interior[si];
    if (seg.x_normal) {
      fl.sides[seg.left][int(Side::east)].push_back(si);
      fl.sides[seg.right][int(Side::west)].push_back(si);
    } else {
      fl.sides[seg.left][int(Side::north)].push_back(si);
      fl.sides[seg.right][int(Side::south)].push_back(si);
    }
  }
  // Deterministic sub-face order within each side: south-to-north, west-to-east.
  for (auto& per_leaf : fl.sides)
    for (auto& lst : per_leaf)
      std::sort(lst.begin(), lst.end(), [&fl](int a, int b) {
        if (a < 0 || b < 0) return a > b;
        const FaceSegment& sa = fl.interior[a];
        const FaceSegment& sb = fl.interior[b];
        if (sa.cy != sb.cy) return sa.cy < sb.cy;
        return sa.cx < sb.cx;
      });
  return fl;
}

Raster sample_to_raster(const QuadGrid& g, const std::vector<PlanarCoeffs>& field,
                        double nodata) {
  if (field.size() != g.leaves.size())
    throw StructureError("sample_to_raster: field size does not match leaf count");
  Raster r;
  r.ncols = g.M << g.L;
  r.nrows = g.N << g.L;
  r.cellsize = g.Rfine;
  r.xll = g.x0;
  r.yll = g.y0;
  r.nodata = nodata;
  r.values.assign(static_cast<size_t>(r.ncols) * r.nrows, nodata);
  for (int fj = 0; fj < r.nrows; ++fj) {
    for (int fi = 0; fi < r.ncols; ++fi) {
      const int leaf = g.find_containing(fi, fj);
      if (leaf < 0) throw StructureError("sample_to_raster: hole in grid");
      const double x = g.x0 + (fi + 0.5) * g.Rfine;
      const double y = g.y0 + (fj + 0.5) * g.Rfine;
      r.at(r.nrows - 1 - fj, fi) =
          evaluate(field[leaf], g.leaf_xc(leaf), g.leaf_yc(leaf), g.leaf_size(leaf), x, y);
    }
  }
  return r;
}

void write_nug(const NonUniformGrid& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write grid file: " + path);
  out.precision(17);
  out << "nug " << g.grid.L << " " << g.grid.M << " " << g.grid.N << " " << g.grid.Rfine << " "
      << g.grid.x0 << " " << g.grid.y0 << "\n";
  for (size_t k = 0; k < g.grid.leaves.size(); ++k) {
    const LeafId& l = g.grid.leaves[k];
    const PlanarCoeffs& z = g.topo[k];
    out << l.level << " " << l.i << " " << l.j << " " << z.c0 << " " << z.c1x << " " << z.c1y
        << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

NonUniformGrid read_nug(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open grid file: " + path);
  std::string magic;
  int L, M, N;
  double R, x0, y0;
  if (!(in >> magic >> L >> M >> N >> R >> x0 >> y0) || magic != "nug")
    throw ParseError(path + ": malformed .nug header");
  std::vector<LeafId> leaves;
  std::vector<PlanarCoeffs> topo;
  LeafId l;
  PlanarCoeffs z;
  while (in >> l.level >> l.i >> l.j >> z.c0 >> z.c1x >> z.c1y) {
    leaves.push_back(l);
    topo.push_back(z);
  }
  NonUniformGrid g;
  g.grid = make_quadgrid(L, M, N, R, x0, y0, leaves);
  // make_quadgrid sorts leaves; re-align the payload.
  g.topo.resize(topo.size());
  for (size_t k = 0; k < leaves.size(); ++k) {
    const int idx = g.grid.find(leaves[k].level, leaves[k].i, leaves[k].j);
    g.topo[idx] = topo[k];
  }
  return g;
}

GridStats grid_stats(const QuadGrid& g) {
  GridStats s;
  s.count_per_level.assign(g.L + 1, 0);
  for (const LeafId& l : g.leaves) ++s.count_per_level[l.level];
  s.total = static_cast<int64_t>(g.leaves.size());
  s.uniform_total = int64_t(g.M) * g.N * (int64_t(1) << (2 * g.L));
  return s;
}

std::string format_grid_stats(const GridStats& s) {
  std::ostringstream out;
  out << "level  leaves  share\n";
  for (size_t lv = 0; lv < s.count_per_level.size(); ++lv) {
    const double pct = s.total ? 100.0 * double(s.count_per_level[lv]) / double(s.total) : 0.0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%5zu  %6lld  %5.1f%%\n", lv,
                  static_cast<long long>(s.count_per_level[lv]), pct);
    out << buf;
  }
  out << "total " << s.total << " of " << s.uniform_total << " uniform ("
      << (s.uniform_total ? 100.0 * double(s.total) / double(s.uniform_total) : 0.0) << "%)\n";
  return out.str();
}

}  // namespace floodmra

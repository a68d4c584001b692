#pragma once

#include <array>

#include "floodmra/field.hpp"

namespace floodmra {

enum class WaveletKind { mw, hw };

// Encoded inter-level differences along the horizontal, vertical and
// diagonal directions. For Haar wavelets only the c0 slots are used.
struct DetailTriple {
  PlanarCoeffs dh, dv, dd;
};

// Child storage order within a 2x2 sibling block: SW=0, SE=1, NW=2, NE=3.
inline constexpr int kChildSW = 0;
inline constexpr int kChildSE = 1;
inline constexpr int kChildNW = 2;
inline constexpr int kChildNE = 3;
inline int child_sx(int k) { return (k & 1) ? 1 : -1; }
inline int child_sy(int k) { return (k & 2) ? 1 : -1; }

// Two-scale filter bank: 12 analysis rows (3 coarse, 9 detail) over the
// 4 children x 3 modes of a sibling block. Synthesis is 4x the transpose,
// so decode(encode(x)) == x on the represented subspace (the full planar
// space for MW, the constant modes for HW).
struct FilterBank {
  WaveletKind kind;
  // rows: [c0, c1x, c1y, dh0..2, dv0..2, dd0..2]; cols: child k, mode n.
  double a[12][4][3];
};

const FilterBank& filter_bank(WaveletKind kind);

struct EncodeResult {
  PlanarCoeffs parent;
  DetailTriple d;
};

EncodeResult encode(const std::array<PlanarCoeffs, 4>& children, const FilterBank& fb);
std::array<PlanarCoeffs, 4> decode(const PlanarCoeffs& parent, const DetailTriple& d,
                                   const FilterBank& fb);

struct FlowEncodeResult {
  FlowCoeffs parent;
  DetailTriple h, qx, qy;
};

FlowEncodeResult encode_flow(const std::array<FlowCoeffs, 4>& children, const FilterBank& fb);
std::array<FlowCoeffs, 4> decode_flow(const FlowCoeffs& parent, const DetailTriple& dh,
                                      const DetailTriple& dqx, const DetailTriple& dqy,
                                      const FilterBank& fb);

double max_abs_detail(const DetailTriple& d);

// d_hat = max |detail entry| / max(1, global_norm), with global_norm the
// maximum |average coefficient| of the field on the finest grid.
double normalize_detail(const DetailTriple& d, double global_norm);

}  // namespace floodmra

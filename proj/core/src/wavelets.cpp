#include "floodmra/wavelets.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace floodmra {

namespace {

// Rows are orthonormal under the block inner product sum_k (1/4) <.,.>_child,
// written here in physical coordinates (hence the extra factor 1/2 against
// the unit-norm rows). Synthesis multiplies the transpose by 4.
FilterBank build_mw() {
  FilterBank fb{};
  fb.kind = WaveletKind::mw;
  std::memset(fb.a, 0, sizeof(fb.a));
  const double s3 = kSqrt3;
  for (int k = 0; k < 4; ++k) {
    const double sx = child_sx(k);
    const double sy = child_sy(k);
    // coarse scaling rows
    fb.a[0][k][0] = 0.25;
    fb.a[1][k][0] = sx * s3 / 8.0;
    fb.a[1][k][1] = 1.0 / 8.0;
    fb.a[2][k][0] = sy * s3 / 8.0;
    fb.a[2][k][2] = 1.0 / 8.0;
    // horizontal details (sx-signed)
    fb.a[3][k][0] = sx / 8.0;
    fb.a[3][k][1] = -s3 / 8.0;
    fb.a[4][k][1] = sx / 4.0;
    fb.a[5][k][2] = sx / 4.0;
    // vertical details (sy-signed)
    fb.a[6][k][0] = sy / 8.0;
    fb.a[6][k][2] = -s3 / 8.0;
    fb.a[7][k][2] = sy / 4.0;
    fb.a[8][k][1] = sy / 4.0;
    // diagonal details (sx*sy-signed)
    fb.a[9][k][0] = sx * sy / 4.0;
    fb.a[10][k][1] = sx * sy / 4.0;
    fb.a[11][k][2] = sx * sy / 4.0;
  }
  return fb;
}

FilterBank build_hw() {
  FilterBank fb{};
  fb.kind = WaveletKind::hw;
  std::memset(fb.a, 0, sizeof(fb.a));
  for (int k = 0; k < 4; ++k) {
    const double sx = child_sx(k);
    const double sy = child_sy(k);
    fb.a[0][k][0] = 0.25;
    fb.a[3][k][0] = sx / 4.0;
    fb.a[6][k][0] = sy / 4.0;
    fb.a[9][k][0] = sx * sy / 4.0;
  }
  return fb;
}

inline double row_dot(const FilterBank& fb, int row, const std::array<PlanarCoeffs, 4>& z) {
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    acc += fb.a[row][k][0] * z[k].c0 + fb.a[row][k][1] * z[k].c1x + fb.a[row][k][2] * z[k].c1y;
  }
  return acc;
}

}  // namespace

const FilterBank& filter_bank(WaveletKind kind) {
  static const FilterBank mw = build_mw();
  static const FilterBank hw = build_hw();
  return kind == WaveletKind::mw ? mw : hw;
}

EncodeResult encode(const std::array<PlanarCoeffs, 4>& children, const FilterBank& fb) {
  EncodeResult r;
  r.parent.c0 = row_dot(fb, 0, children);
  r.parent.c1x = row_dot(fb, 1, children);
  r.parent.c1y = row_dot(fb, 2, children);
  r.d.dh = {row_dot(fb, 3, children), row_dot(fb, 4, children), row_dot(fb, 5, children)};
  r.d.dv = {row_dot(fb, 6, children), row_dot(fb, 7, children), row_dot(fb, 8, children)};
  r.d.dd = {row_dot(fb, 9, children), row_dot(fb, 10, children), row_dot(fb, 11, children)};
  return r;
}

std::array<PlanarCoeffs, 4> decode(const PlanarCoeffs& parent, const DetailTriple& d,
                                   const FilterBank& fb) {
  const double v[12] = {parent.c0, parent.c1x, parent.c1y, d.dh.c0, d.dh.c1x, d.dh.c1y,
                        d.dv.c0,   d.dv.c1x,   d.dv.c1y,   d.dd.c0, d.dd.c1x, d.dd.c1y};
  std::array<PlanarCoeffs, 4> out{};
  for (int k = 0; k < 4; ++k) {
    double z[3] = {0.0, 0.0, 0.0};
    for (int n = 0; n < 3; ++n)
      for (int row = 0; row < 12; ++row) z[n] += 4.0 * fb.a[row][k][n] * v[row];
    out[k] = {z[0], z[1], z[2]};
  }
  return out;
}

FlowEncodeResult encode_flow(const std::array<FlowCoeffs, 4>& children, const FilterBank& fb) {
  std::array<PlanarCoeffs, 4> h, qx, qy;
  for (int k = 0; k < 4; ++k) {
    h[k] = children[k].h;
    qx[k] = children[k].qx;
    qy[k] = children[k].qy;
  }
  const EncodeResult eh = encode(h, fb);
  const EncodeResult ex = encode(qx, fb);
  const EncodeResult ey = encode(qy, fb);
  FlowEncodeResult r;
  r.parent.h = eh.parent;
  r.parent.qx = ex.parent;
  r.parent.qy = ey.parent;
  r.h = eh.d;
  r.qx = ex.d;
  r.qy = ey.d;
  return r;
}

std::array<FlowCoeffs, 4> decode_flow(const FlowCoeffs& parent, const DetailTriple& dh,
                                      const DetailTriple& dqx, const DetailTriple& dqy,
                                      const FilterBank& fb) {
  const auto h = decode(parent.h, dh, fb);
  const auto qx = decode(parent.qx, dqx, fb);
  const auto qy = decode(parent.qy, dqy, fb);
  std::array<FlowCoeffs, 4> out{};
  for (int k = 0; k < 4; ++k) {
    out[k].h = h[k];
    out[k].qx = qx[k];
    out[k].qy = qy[k];
  }
  return out;
}

double max_abs_detail(const DetailTriple& d) {
  double m = 0.0;
  for (const PlanarCoeffs* p : {&d.dh, &d.dv, &d.dd}) {
    m = std::max(m, std::abs(p->c0));
    m = std::max(m, std::abs(p->c1x));
    m = std::max(m, std::abs(p->c1y));
  }
  return m;
}

double normalize_detail(const DetailTriple& d, double global_norm) {
  return max_abs_detail(d) / std::max(1.0, global_norm);
}

}  // namespace floodmra

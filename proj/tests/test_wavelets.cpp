#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "floodmra/field.hpp"
#include "floodmra/wavelets.hpp"

using namespace floodmra;

namespace {

std::array<PlanarCoeffs, 4> random_children(std::mt19937& rng, double scale = 10.0) {
  std::uniform_real_distribution<double> val(-scale, scale);
  std::array<PlanarCoeffs, 4> c;
  for (auto& p : c) p = {val(rng), val(rng), val(rng)};
  return c;
}

double max_rel_err(const std::array<PlanarCoeffs, 4>& a, const std::array<PlanarCoeffs, 4>& b,
                   double scale) {
  double m = 0.0;
  for (int k = 0; k < 4; ++k) {
    m = std::max(m, std::abs(a[k].c0 - b[k].c0) / scale);
    m = std::max(m, std::abs(a[k].c1x - b[k].c1x) / scale);
    m = std::max(m, std::abs(a[k].c1y - b[k].c1y) / scale);
  }
  return m;
}

// Children of a unit parent element centred at the origin, projected from a
// global plane z = a + bx x + by y.
std::array<PlanarCoeffs, 4> plane_children(double a, double bx, double by) {
  std::array<PlanarCoeffs, 4> c;
  for (int k = 0; k < 4; ++k) {
    const double cx = 0.25 * child_sx(k);
    const double cy = 0.25 * child_sy(k);
    // Slope coefficient of a linear field on a size-1/2 element.
    c[k] = {a + bx * cx + by * cy, bx * 0.5 / (2.0 * kSqrt3), by * 0.5 / (2.0 * kSqrt3)};
  }
  return c;
}

}  // namespace

TEST_CASE("encoding four identical constant children gives that constant, zero details") {
  for (WaveletKind kind : {WaveletKind::mw, WaveletKind::hw}) {
    const FilterBank& fb = filter_bank(kind);
    const std::array<PlanarCoeffs, 4> kids = {PlanarCoeffs{2.0, 0, 0}, PlanarCoeffs{2.0, 0, 0},
                                              PlanarCoeffs{2.0, 0, 0}, PlanarCoeffs{2.0, 0, 0}};
    const EncodeResult e = encode(kids, fb);
    CHECK(e.parent.c0 == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(e.parent.c1x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(max_abs_detail(e.d) == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("MW details vanish for children sampled from one global plane") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  const FilterBank& fb = filter_bank(WaveletKind::mw);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = val(rng), bx = val(rng), by = val(rng);
    const EncodeResult e = encode(plane_children(a, bx, by), fb);
    CHECK(max_abs_detail(e.d) <= 1e-13 * std::max(1.0, std::abs(a) + std::abs(bx) + std::abs(by)));
    // Parent represents the same plane on the size-1 element.
    CHECK(e.parent.c0 == doctest::Approx(a).epsilon(1e-13));
    CHECK(e.parent.c1x == doctest::Approx(bx / (2.0 * kSqrt3)).epsilon(1e-12));
    CHECK(e.parent.c1y == doctest::Approx(by / (2.0 * kSqrt3)).epsilon(1e-12));
  }
}

TEST_CASE("MW decode of a parent with zero details tiles the parent plane") {
  const FilterBank& fb = filter_bank(WaveletKind::mw);
  const PlanarCoeffs parent{1.0, 0.5, -0.25};
  const auto kids = decode(parent, DetailTriple{}, fb);
  // Compare plane values at shared sample points (parent element size 1).
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> pos(-0.5, 0.5);
  for (int s = 0; s < 50; ++s) {
    const double x = pos(rng), y = pos(rng);
    const int k = (x >= 0.0 ? 1 : 0) + (y >= 0.0 ? 2 : 0);
    const double cx = 0.25 * child_sx(k), cy = 0.25 * child_sy(k);
    const double vp = evaluate(parent, 0, 0, 1.0, x, y);
    const double vc = evaluate(kids[k], cx, cy, 0.5, x, y);
    CHECK(vc == doctest::Approx(vp).epsilon(1e-13));
  }
}

TEST_CASE("HW decode of zero details replicates the parent average") {
  const FilterBank& fb = filter_bank(WaveletKind::hw);
  const auto kids = decode(PlanarCoeffs{3.25, 0, 0}, DetailTriple{}, fb);
  for (const PlanarCoeffs& k : kids) {
    CHECK(k.c0 == doctest::Approx(3.25).epsilon(1e-15));
    CHECK(k.c1x == 0.0);
    CHECK(k.c1y == 0.0);
  }
}

TEST_CASE("HW single-child spike produces details proportional to its size") {
  const FilterBank& fb = filter_bank(WaveletKind::hw);
  for (double s : {1.0, 2.0, 8.0}) {
    const std::array<PlanarCoeffs, 4> kids = {PlanarCoeffs{s, 0, 0}, PlanarCoeffs{},
                                              PlanarCoeffs{}, PlanarCoeffs{}};
    const EncodeResult e = encode(kids, fb);
    CHECK(e.parent.c0 == doctest::Approx(s / 4).epsilon(1e-15));
    CHECK(std::abs(e.d.dh.c0) == doctest::Approx(s / 4).epsilon(1e-15));
    CHECK(std::abs(e.d.dv.c0) == doctest::Approx(s / 4).epsilon(1e-15));
    CHECK(std::abs(e.d.dd.c0) == doctest::Approx(s / 4).epsilon(1e-15));
  }
}

TEST_CASE("parent average equals the mean of child averages for all inputs") {
  std::mt19937 rng(13);
  for (WaveletKind kind : {WaveletKind::mw, WaveletKind::hw}) {
    const FilterBank& fb = filter_bank(kind);
    for (int trial = 0; trial < 200; ++trial) {
      const auto kids = random_children(rng);
      const EncodeResult e = encode(kids, fb);
      const double mean = 0.25 * (kids[0].c0 + kids[1].c0 + kids[2].c0 + kids[3].c0);
      CHECK(e.parent.c0 == doctest::Approx(mean).epsilon(1e-14));
    }
  }
}

TEST_CASE("MW round trip: decode(encode(x)) = x to 1e-13 over many random draws") {
  std::mt19937 rng(29);
  const FilterBank& fb = filter_bank(WaveletKind::mw);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto kids = random_children(rng);
    const EncodeResult e = encode(kids, fb);
    const auto back = decode(e.parent, e.d, fb);
    worst = std::max(worst, max_rel_err(kids, back, 10.0));
  }
  CHECK(worst <= 1e-13);
}

TEST_CASE("MW round trip the other way: encode(decode(p, d)) = (p, d)") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  const FilterBank& fb = filter_bank(WaveletKind::mw);
  for (int trial = 0; trial < 2000; ++trial) {
    const PlanarCoeffs p{val(rng), val(rng), val(rng)};
    DetailTriple d;
    d.dh = {val(rng), val(rng), val(rng)};
    d.dv = {val(rng), val(rng), val(rng)};
    d.dd = {val(rng), val(rng), val(rng)};
    const auto kids = decode(p, d, fb);
    const EncodeResult e = encode(kids, fb);
    CHECK(e.parent.c0 == doctest::Approx(p.c0).epsilon(1e-13));
    CHECK(e.parent.c1x == doctest::Approx(p.c1x).epsilon(1e-13));
    CHECK(e.parent.c1y == doctest::Approx(p.c1y).epsilon(1e-13));
    CHECK(e.d.dh.c0 == doctest::Approx(d.dh.c0).epsilon(1e-13));
    CHECK(e.d.dv.c1x == doctest::Approx(d.dv.c1x).epsilon(1e-13));
    CHECK(e.d.dd.c1y == doctest::Approx(d.dd.c1y).epsilon(1e-13));
  }
}

TEST_CASE("HW round trip on constant modes") {
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  const FilterBank& fb = filter_bank(WaveletKind::hw);
  for (int trial = 0; trial < 10000; ++trial) {
    std::array<PlanarCoeffs, 4> kids;
    for (auto& k : kids) k = {val(rng), 0.0, 0.0};
    const EncodeResult e = encode(kids, fb);
    const auto back = decode(e.parent, e.d, fb);
    for (int k = 0; k < 4; ++k) CHECK(back[k].c0 == doctest::Approx(kids[k].c0).epsilon(1e-13));
  }
}

TEST_CASE("normalize_detail applies the max(1, |z0|) clamp") {
  DetailTriple d;
  CHECK(normalize_detail(d, 5.0) == 0.0);
  d.dh = {0.002, 0, 0};
  CHECK(normalize_detail(d, 0.5) == doctest::Approx(0.002).epsilon(1e-15));
  d.dh = {0.2, 0, 0};
  CHECK(normalize_detail(d, 100.0) == doctest::Approx(0.002).epsilon(1e-15));
}

TEST_CASE("max_abs_detail scans all nine detail entries") {
  DetailTriple d;
  d.dv.c1y = -3.5;
  CHECK(max_abs_detail(d) == 3.5);
}

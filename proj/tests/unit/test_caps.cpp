#include "polylab/caps.hpp"
#include "polylab/kernel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace polylab;

namespace {

const Polytope& square() {
  static const Polytope p = make_cube(2);
  return p;
}

// Independent oracle: minimum over a dense sweep of cutting angles, each
// cap area from an explicit half-plane clip of the square.
double sweep_v(const Vec& z, int n = 200000) {
  double best = 1.0;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    const Vec u = make_vec({std::cos(a), std::sin(a)});
    const Halfspace cut{-u, -u.dot(z)};
    best = std::min(best, clipped_volume(square(), std::span<const Halfspace>(&cut, 1)));
  }
  return best;
}

double square_v(double x, double y) {
  return 2.0 * std::min(x, 1.0 - x) * std::min(y, 1.0 - y);
}

}  // namespace

TEST(Caps, SlabCap) {
  EXPECT_NEAR(make_cap(square(), make_vec({1, 0}), 0.25).volume, 0.25, 1e-14);
  EXPECT_NEAR(make_cap(square(), make_vec({1, 0}), 1.0).volume, 1.0, 1e-14);
}

TEST(Caps, DiagonalCornerCap) {
  const double r = 1.0 / std::sqrt(2.0);
  // Depth 1/2 along the diagonal cuts the corner triangle with legs 1/sqrt(2).
  const Cap c = make_cap(square(), make_vec({r, r}), 0.5);
  EXPECT_NEAR(c.volume, 0.25, 1e-14);
  EXPECT_NEAR(c.center[0], 1.0, 1e-15);
  EXPECT_NEAR(c.center[1], 1.0, 1e-15);
  // Depth sqrt(2)/2 reaches the anti-diagonal x + y = 1: half the square.
  const Cap half = make_cap(square(), make_vec({r, r}), std::sqrt(2.0) / 2.0);
  EXPECT_NEAR(half.volume, 0.5, 1e-14);
}

TEST(Caps, InvalidDepth) {
  try {
    make_cap(square(), make_vec({1, 0}), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidDepth);
  }
}

TEST(Caps, Dilation) {
  const Cap c = make_cap(square(), make_vec({1, 0}), 0.1);
  EXPECT_NEAR(dilate(square(), c, 2.0).volume, 0.2, 1e-14);
  EXPECT_NEAR(dilate(square(), c, 1.0).volume, c.volume, 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  const Cap corner = make_cap(square(), make_vec({r, r}), 0.05);
  EXPECT_NEAR(dilate(square(), corner, 2.0).volume / corner.volume, 4.0, 1e-10);
}

TEST(Caps, CapSliceMatchesVolume) {
  const Cap c = make_cap(make_cube(3), make_vec({0.6, 0.8, 0.0}), 0.3);
  EXPECT_NEAR(cap_slice(make_cube(3), c).volume(), c.volume, 1e-10);
}

TEST(Caps, MinimalCapExamples) {
  EXPECT_NEAR(v_at(square(), make_vec({0.5, 0.5})), 0.5, 1e-7);
  EXPECT_NEAR(v_at(square(), make_vec({0.25, 0.5})), 0.25, 1e-7);
  EXPECT_NEAR(v_at(square(), make_vec({0.125, 0.125})), 1.0 / 32.0, 1e-8);
}

TEST(Caps, MinimalCapAgreesWithSweepOracle) {
  Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    const Vec z = make_vec({0.02 + 0.96 * rng.uniform(), 0.02 + 0.96 * rng.uniform()});
    const double oracle = sweep_v(z, 100000);
    const double v = v_at(square(), z);
    EXPECT_LE(v, oracle * (1 + 1e-9));
    EXPECT_NEAR(v, oracle, 1e-6 * oracle + 1e-9);
    EXPECT_NEAR(v, square_v(z[0], z[1]), 1e-6 * v);
  }
}

TEST(Caps, MinimalCapInTheCube) {
  // Symmetric center: every halving plane through it gives 1/2.
  EXPECT_NEAR(v_at(make_cube(3), make_vec({0.5, 0.5, 0.5})), 0.5, 1e-6);
  // Near a corner the minimal cap is the corner tetrahedron with z at its
  // facet centroid: (3a)^3 / 6 = 4.5 a^3.
  const double a = 0.05;
  EXPECT_NEAR(v_at(make_cube(3), make_vec({a, a, a})), 4.5 * a * a * a, 1e-6 * 4.5 * a * a * a);
}

TEST(Caps, BoundaryAndOutsideErrors) {
  try {
    v_at(square(), make_vec({1.0, 0.5}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BoundaryPoint);
  }
  try {
    v_at(square(), make_vec({1.5, 0.5}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PreconditionViolated);
  }
}

TEST(Caps, MacbeathExamples) {
  EXPECT_NEAR(macbeath(square(), make_vec({0.5, 0.5}), 1.0).volume, 1.0, 1e-12);
  EXPECT_NEAR(macbeath(square(), make_vec({0.25, 0.25}), 1.0).volume, 0.25, 1e-12);
  EXPECT_NEAR(macbeath(square(), make_vec({0.25, 0.25}), 0.5).volume, 1.0 / 16.0, 1e-12);
  EXPECT_NEAR(macbeath_volume(square(), make_vec({0.25, 0.25})), 0.25, 1e-12);
}

TEST(Caps, MacbeathScalingAndSymmetry) {
  Rng rng(4);
  const Polytope p = make_cross_polytope(3);
  for (int i = 0; i < 20; ++i) {
    const Vec z = 0.3 * rng.direction(3);
    const double u1 = macbeath(p, z, 1.0).volume;
    for (double lambda : {0.25, 0.5, 2.0}) {
      EXPECT_NEAR(macbeath(p, z, lambda).volume, std::pow(lambda, 3) * u1,
                  1e-6 * std::pow(lambda, 3) * u1);
    }
    EXPECT_NEAR(macbeath_volume(p, z), u1, 1e-10);
    const auto m = macbeath(p, z, 1.0);
    for (int k = 0; k < 50; ++k) {
      const Vec x = z + 0.5 * rng.direction(3) * rng.uniform();
      EXPECT_EQ(m.contains(x, 1e-12), m.contains(2 * z - x, 1e-12));
    }
  }
}

TEST(Caps, GaugeMatchesRegionMembership) {
  const Vec z = make_vec({0.3, 0.2});
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    const Vec x = make_vec({rng.uniform(), rng.uniform()});
    const double mu = macbeath_gauge(square(), z, x);
    EXPECT_TRUE(macbeath(square(), z, mu * (1 + 1e-9)).contains(x));
    EXPECT_FALSE(macbeath(square(), z, mu * (1 - 1e-6)).contains(x, 0.0));
  }
}

TEST(Caps, FloatingBodyExamples) {
  EXPECT_TRUE(floating_body_contains(square(), make_vec({0.5, 0.5}), 0.4));
  EXPECT_FALSE(floating_body_contains(square(), make_vec({0.125, 0.125}), 0.05));
  EXPECT_TRUE(floating_body_contains(square(), make_vec({0.125, 0.125}), 1.0 / 64.0));
}

TEST(Caps, CheapBoundsBracketV) {
  Rng rng(10);
  for (int i = 0; i < 200; ++i) {
    const Vec z = make_vec({rng.uniform(), rng.uniform()});
    const VBounds b = v_bounds(square(), z);
    const double v = square_v(z[0], z[1]);
    EXPECT_LE(b.lower, v * (1 + 1e-12));
    EXPECT_GE(b.upper, v * (1 - 1e-12));
  }
}

TEST(Caps, WetPartVolume) {
  Rng rng(12);
  const Estimate all = wet_part_volume(square(), 0.5, 2000, rng);
  EXPECT_NEAR(all.value, 1.0, 1e-3);
  // Closed form for the square: 2 s (1 - ln 2 + ln(1/s)).
  const double s = 0.01;
  const Estimate e = wet_part_volume(square(), s, 40000, rng);
  const double exact = 2 * s * (1 - std::log(2.0) + std::log(1 / s));
  EXPECT_NEAR(e.value, exact, 4 * e.se);
  EXPECT_LE(e.value, 1.0);
}

TEST(Caps, LevelPoints) {
  const LevelPoint a = boundary_point_at_level(square(), make_vec({1, 0}), 0.25);
  EXPECT_NEAR(a.z[0], 0.75, 1e-6);
  EXPECT_NEAR(a.z[1], 0.5, 1e-9);
  const LevelPoint b = boundary_point_at_level(square(), make_vec({1, 1}), 1.0 / 32.0);
  EXPECT_NEAR(b.z[0], 0.875, 1e-6);
  EXPECT_NEAR(b.z[1], 0.875, 1e-6);
  EXPECT_NEAR(b.v, 1.0 / 32.0, kTauLevel / 32.0);
  const LevelPoint c = boundary_point_at_level(square(), make_vec({0, 1}), 0.5);
  EXPECT_NEAR((c.z - square().centroid()).norm(), 0.0, 1e-12);
  try {
    boundary_point_at_level(square(), make_vec({0, 1}), 0.6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LevelNotBracketed);
  }
}

TEST(Caps, VisibilityExamples) {
  const Vec z = make_vec({0.125, 0.125});
  EXPECT_TRUE(visible_set_contains(square(), z, 0.05, z));
  EXPECT_FALSE(visible_set_contains(square(), z, 0.05, make_vec({0.875, 0.875})));
  EXPECT_TRUE(visible_set_contains(square(), z, 0.05, make_vec({0.125, 0.0625})));
}

TEST(Caps, VisibilitySuperset) {
  EXPECT_NEAR(superset_beta(2), 2 * std::numbers::e * 8 + 1, 1e-12);
  const Cap whole = visibility_superset(square(), make_vec({0.5, 0.5}), 0.5);
  EXPECT_NEAR(whole.volume, 1.0, 1e-12);
  try {
    visibility_superset(square(), make_vec({0.5, 0.5}), 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PreconditionViolated);
  }
  const Vec z = make_vec({0.05, 0.1});
  const double v = square_v(0.05, 0.1);
  const Cap sup = visibility_superset(square(), z, v);
  const MinimalCapResult m = minimal_cap(square(), z);
  EXPECT_NEAR(sup.t / m.cap.t, superset_beta(2), 1e-9);
}

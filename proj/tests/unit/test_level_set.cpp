#include "polylab/level_set.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace polylab;

namespace {

double square_v(const Vec& z) {
  return 2.0 * std::min(z[0], 1.0 - z[0]) * std::min(z[1], 1.0 - z[1]);
}

}  // namespace

TEST(LevelSet, WetClassificationMatchesClosedForm) {
  const Polytope sq = make_cube(2);
  Rng rng(3);
  for (double s : {0.1, 0.01, 1e-3}) {
    const LevelSet ls(sq, s);
    EXPECT_FALSE(ls.empty());
    EXPECT_GT(ls.decided_fraction(), 0.99);
    for (const auto& lp : ls.level_points()) EXPECT_GE(square_v(lp.z), s * (1 - 1e-12));
    int checked = 0;
    for (int i = 0; i < 20000; ++i) {
      const Vec x = sample_uniform(sq, rng);
      const double v = square_v(x);
      if (std::fabs(v - s) < 1e-5 * s) continue;
      ASSERT_EQ(ls.wet(x), v <= s) << x.transpose() << " v=" << v;
      ++checked;
    }
    EXPECT_GT(checked, 19000);
  }
}

TEST(LevelSet, OuterHalfspacesOnlyCutWetPoints) {
  const Polytope sq = make_cube(2);
  const LevelSet ls(sq, 0.02);
  Rng rng(8);
  for (int i = 0; i < 20000; ++i) {
    const Vec x = sample_uniform(sq, rng);
    for (const auto& h : ls.outer())
      if (h.normal.dot(x) >= h.offset) ASSERT_LE(square_v(x), 0.02);
  }
}

TEST(LevelSet, EmptyAboveTheMaximum) {
  const LevelSet ls(make_cube(2), 0.6);
  EXPECT_TRUE(ls.empty());
  EXPECT_TRUE(ls.wet(make_vec({0.5, 0.5})));
}

TEST(LevelSet, SegmentAvoidanceAgreesWithExactSearch) {
  const Polytope sq = make_cube(2);
  const double s = 0.01;
  const LevelSet ls(sq, s);
  Rng rng(21);
  int agree = 0, total = 0;
  for (int i = 0; i < 300; ++i) {
    // Endpoints near the same corner or near different edges.
    const Vec a = make_vec({0.2 * rng.uniform(), 0.2 * rng.uniform()});
    const Vec b = (i % 3 == 0) ? make_vec({0.8 + 0.2 * rng.uniform(), 0.2 * rng.uniform()})
                               : make_vec({0.2 * rng.uniform(), 0.2 * rng.uniform()});
    // Dense closed-form scan as the oracle.
    double best = 0.0;
    for (int k = 0; k <= 20000; ++k) best = std::max(best, square_v(a + (k / 20000.0) * (b - a)));
    if (std::fabs(best - s) < 1e-4 * s) continue;
    ++total;
    agree += ls.segment_avoids(a, b) == (best < s);
  }
  EXPECT_EQ(agree, total);
}

TEST(LevelSet, CubeLevelSet) {
  const Polytope cube = make_cube(3);
  const LevelSet ls(cube, 0.01, 256);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Vec x = sample_uniform(cube, rng);
    if (ls.wet(x) != (v_or_zero(cube, x) <= 0.01)) {
      EXPECT_NEAR(v_or_zero(cube, x), 0.01, 1e-6);
    }
  }
}

#include "polylab/kernel.hpp"
#include "polylab/polytope.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace polylab;

TEST(Polytope, SquareFromCorners) {
  const Polytope p = make_cube(2);
  EXPECT_NEAR(p.volume(), 1.0, 1e-12);
  EXPECT_EQ(p.vertices().size(), 4u);
  EXPECT_EQ(p.facets().size(), 4u);
}

TEST(Polytope, TriangleVolume) {
  const Polytope p = make_simplex(2);
  EXPECT_NEAR(p.volume(), 0.5, 1e-14);
  EXPECT_NEAR(p.centroid()[0], 1.0 / 3.0, 1e-14);
}

TEST(Polytope, InteriorPointIsDropped) {
  const PointList pts{make_vec({0, 0}), make_vec({1, 0}), make_vec({0, 1}), make_vec({1, 1}),
                      make_vec({0.5, 0.5})};
  const Polytope p = build_from_vertices(pts);
  EXPECT_EQ(p.vertices().size(), 4u);
}

TEST(Polytope, DegenerateInputThrows) {
  const PointList pts{make_vec({0, 0}), make_vec({1, 1}), make_vec({2, 2}), make_vec({3, 3})};
  try {
    build_from_vertices(pts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateInput);
  }
}

TEST(Polytope, FlagCounts) {
  EXPECT_EQ(flag_count(make_cube(2)), 8);
  EXPECT_EQ(flag_count(make_cube(3)), 48);
  EXPECT_EQ(flag_count(make_cube(4)), 384);
  EXPECT_EQ(flag_count(make_simplex(2)), 6);
  EXPECT_EQ(flag_count(make_simplex(3)), 24);
  EXPECT_EQ(flag_count(make_cross_polytope(3)), 48);
}

TEST(Polytope, FlagCountMatchesBruteForceChains) {
  // Brute force over (vertex, edge, facet) triples of the 3-cube lattice.
  const Polytope p = make_cube(3);
  const auto& f = p.lattice().faces_by_dim;
  long long chains = 0;
  auto sub = [](const VertexSet& a, const VertexSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  for (const auto& v : f[0])
    for (const auto& e : f[1])
      for (const auto& g : f[2]) chains += sub(v, e) && sub(e, g);
  EXPECT_EQ(chains, 48);
}

TEST(Polytope, LatticeInvariants) {
  for (const Polytope& p : {make_cube(3), make_simplex(4), make_cross_polytope(4), make_cube(4)}) {
    const int d = p.dim();
    const auto f = p.lattice().f_vector();
    long euler = 0;
    for (int k = 0; k < d; ++k) euler += (k % 2 == 0 ? 1 : -1) * f[k];
    EXPECT_EQ(euler, 1 - (d % 2 == 0 ? 1 : -1));
    for (std::size_t fi = 0; fi < p.facets().size(); ++fi) {
      EXPECT_GE(static_cast<int>(p.facet_vertices()[fi].size()), d);
      for (int v : p.facet_vertices()[fi])
        EXPECT_NEAR(p.facets()[fi].slack(p.vertices()[v]), 0.0, 1e-9);
    }
    for (const auto& v : p.vertices()) {
      int tight = 0;
      for (const auto& h : p.facets()) tight += std::fabs(h.slack(v)) <= 1e-9;
      EXPECT_GE(tight, d);
    }
    const auto& inc = p.lattice().incidence;
    for (int k = 0; k + 1 < d; ++k) {
      for (auto [i, j] : inc[k]) {
        const auto& a = p.lattice().faces_by_dim[k][i];
        const auto& b = p.lattice().faces_by_dim[k + 1][j];
        EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
      }
    }
  }
}

TEST(Polytope, SupportFunction) {
  const Polytope p = make_cube(2);
  EXPECT_NEAR(support(p, make_vec({1, 0})), 1.0, 1e-15);
  EXPECT_NEAR(support(p, make_vec({-1, 0})), 0.0, 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(support(p, make_vec({r, r})), std::sqrt(2.0), 1e-15);
}

TEST(Polytope, SupportIsSublinear) {
  const Polytope p = make_cross_polytope(3);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Vec u = rng.direction(3), v = rng.direction(3);
    EXPECT_LE(support(p, u + v), support(p, u) + support(p, v) + 1e-12);
  }
}

TEST(Polytope, Contains) {
  const Polytope p = make_cube(2);
  EXPECT_TRUE(contains(p, make_vec({0.5, 0.5})));
  EXPECT_FALSE(contains(p, make_vec({1.5, 0.5})));
  EXPECT_TRUE(contains(p, make_vec({1.0, 0.5})));
}

TEST(Polytope, UniformSamplingMoments) {
  const Polytope sq = make_cube(2);
  Rng rng(42);
  const int n = 1000000;
  double mx = 0, my = 0;
  int corner = 0;
  for (int i = 0; i < n; ++i) {
    const Vec x = sample_uniform(sq, rng);
    mx += x[0];
    my += x[1];
    corner += x[0] <= 0.5 && x[1] <= 0.5;
  }
  const double se = std::sqrt(1.0 / 12.0 / n);
  EXPECT_NEAR(mx / n, 0.5, 3 * se);
  EXPECT_NEAR(my / n, 0.5, 3 * se);
  EXPECT_NEAR(static_cast<double>(corner) / n, 0.25, 3 * std::sqrt(0.25 * 0.75 / n));

  const Polytope tri = make_simplex(2);
  double tx = 0, ty = 0;
  for (int i = 0; i < n; ++i) {
    const Vec x = sample_uniform(tri, rng);
    tx += x[0];
    ty += x[1];
  }
  // Var of a coordinate on the standard triangle is 1/18.
  const double tse = std::sqrt(1.0 / 18.0 / n);
  EXPECT_NEAR(tx / n, 1.0 / 3.0, 3 * tse);
  EXPECT_NEAR(ty / n, 1.0 / 3.0, 3 * tse);
}

TEST(Polytope, SamplingChiSquareOnSubBoxes) {
  const Polytope p = make_cube(3);
  Rng rng(77);
  const int n = 80000;
  int counts[8] = {};
  for (int i = 0; i < n; ++i) {
    const Vec x = sample_uniform(p, rng);
    ASSERT_TRUE(contains(p, x));
    counts[(x[0] > 0.5) + 2 * (x[1] > 0.5) + 4 * (x[2] > 0.5)]++;
  }
  double chi2 = 0;
  for (int c : counts) chi2 += (c - n / 8.0) * (c - n / 8.0) / (n / 8.0);
  EXPECT_LT(chi2, 24.32);  // 0.999 quantile with 7 degrees of freedom
}

TEST(Polytope, CapVolumeKernelsAgreeWithLasserre) {
  Rng rng(8);
  for (const Polytope& p : {make_cube(2), make_simplex(2), make_cube(3), make_cross_polytope(3),
                            make_simplex(3)}) {
    for (int i = 0; i < 300; ++i) {
      const Vec u = rng.direction(p.dim());
      const double h = support(p, u);
      const double level = h - rng.uniform() * p.width(u);
      const Halfspace cap{-u, -level};
      const double oracle = clipped_volume(p, std::span<const Halfspace>(&cap, 1));
      EXPECT_NEAR(cap_volume_at(p, u, level), oracle, 1e-10);
    }
  }
}

TEST(Polytope, SpecParsing) {
  EXPECT_EQ(parse_polytope_spec("cube:3").vertices().size(), 8u);
  EXPECT_EQ(parse_polytope_spec("cross-polytope:2").vertices().size(), 4u);
  EXPECT_NEAR(parse_polytope_spec(R"({"dim":2,"vertices":[[0,0],[2,0],[0,2]]})").volume(), 2.0,
              1e-12);
  EXPECT_THROW(parse_polytope_spec("blob:2"), Error);
  EXPECT_THROW(parse_polytope_spec("{\"dim\":2}"), Error);
}

TEST(Polytope, NormalizeToUnitVolume) {
  const Polytope p = normalize(make_cross_polytope(3));
  EXPECT_NEAR(p.volume(), 1.0, 1e-12);
}

#include "polylab/depgraph.hpp"

#include <gtest/gtest.h>

using namespace polylab;

namespace {

const Polytope& square() {
  static const Polytope p = make_cube(2);
  return p;
}

struct Fixture {
  CapCovering covering;
  CellDecomposition cells;
  DependencyGraph graph;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    out.covering = cap_covering(square(), saturate(square(), 0.002, 11));
    out.cells = build_cells(square(), out.covering, 0.002, 12);
    out.graph = build_graph(out.cells, 1e-6, 13);
    return out;
  }();
  return f;
}

}  // namespace

TEST(DepGraph, Constants) {
  EXPECT_DOUBLE_EQ(gamma_for(2), 864.0);
  EXPECT_DOUBLE_EQ(t_star_for(2, 0.002), 0.144);
}

TEST(DepGraph, CentersOwnTheirCells) {
  const auto& f = fixture();
  for (int j = 0; j < f.cells.m(); ++j) EXPECT_EQ(f.cells.cell_of(f.covering.elements[j].z), j);
}

TEST(DepGraph, DeepInteriorNotTrimmed) {
  EXPECT_FALSE(fixture().cells.trimmed(make_vec({0.5, 0.5})));
  EXPECT_TRUE(fixture().cells.trimmed(make_vec({0.01, 0.5})));
}

TEST(DepGraph, RelationStructure) {
  const auto& g = fixture().graph;
  EXPECT_EQ(g.m, fixture().cells.m());
  EXPECT_TRUE(g.reflexive());
  EXPECT_TRUE(g.symmetric());
  EXPECT_TRUE(g.degree_consistent());
  for (int i = 0; i < g.m; ++i) EXPECT_GE(count_SkLi(g, i), 1);
}

TEST(DepGraph, OppositeSidesInvisible) {
  const auto& f = fixture();
  // Upper left edge against lower right edge: every connecting segment
  // passes near the center, where v = 1/2 > T*.
  int left = -1, right = -1;
  for (int j = 0; j < f.cells.m(); ++j) {
    const Vec& z = f.covering.elements[j].z;
    if (z[0] < 0.01 && z[1] > 0.6 && z[1] < 0.9) left = j;
    if (z[0] > 0.99 && z[1] > 0.1 && z[1] < 0.4) right = j;
  }
  ASSERT_GE(left, 0);
  ASSERT_GE(right, 0);
  EXPECT_FALSE(std::binary_search(f.graph.L[left].begin(), f.graph.L[left].end(), right));
}

TEST(DepGraph, NeighboursVisible) {
  const auto& f = fixture();
  // The nearest other center along the boundary shares a visible witness.
  const Vec& z0 = f.covering.elements[0].z;
  int best = -1;
  double dist = 1e9;
  for (int j = 1; j < f.cells.m(); ++j) {
    const double d = (f.covering.elements[j].z - z0).norm();
    if (d < dist) {
      dist = d;
      best = j;
    }
  }
  EXPECT_TRUE(std::binary_search(f.graph.L[0].begin(), f.graph.L[0].end(), best));
}

TEST(DepGraph, WitnessMonotoneInLevel) {
  const auto& f = fixture();
  CellDecomposition wider = f.cells;
  wider.upper = std::make_shared<const LevelSet>(square(), 2 * f.cells.T_star);
  const DependencyGraph g2 = build_graph(wider, 1e-6, 13);
  for (int i = 0; i < g2.m; ++i)
    for (int k : f.graph.L[i])
      EXPECT_TRUE(std::binary_search(g2.L[i].begin(), g2.L[i].end(), k)) << i << " " << k;
}

TEST(DepGraph, CompleteWhenFloatingBodyEmpty) {
  const CapCovering cov = cap_covering(square(), saturate(square(), 0.01, 3));
  const CellDecomposition cells = build_cells(square(), cov, 0.01, 4);
  EXPECT_TRUE(cells.upper->empty());
  const DependencyGraph g = build_graph(cells, 1e-6, 5);
  EXPECT_EQ(g.D, g.m - 1);
  for (int i = 0; i < g.m; ++i) EXPECT_EQ(count_SkLi(g, i), g.m);
}

TEST(DepGraph, Export) {
  const auto& g = fixture().graph;
  EXPECT_NE(g.to_json().find("\"D\""), std::string::npos);
  EXPECT_EQ(g.to_dot().rfind("graph G {", 0), 0u);
}

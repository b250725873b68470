#include <gtest/gtest.h>

#include "slitcarpet/cut_grid.hpp"

using namespace slitcarpet;

TEST(CutGrid, NodeCounts) {
  const CutGrid g0(0, 3);
  EXPECT_EQ(g0.node_count(), 81u);
  const CutGrid g1(1, 2);  // slit interior contains one grid node (j=2)
  EXPECT_EQ(g1.node_count(), 26u);
  const CutGrid d1(1, 2, Ambient::DS2);  // 16 seam nodes shared
  EXPECT_EQ(d1.node_count(), 16u + 2 * 10u);
}

TEST(CutGrid, RejectsMisalignedExponent) {
  EXPECT_THROW(CutGrid(2, 2), std::invalid_argument);
  EXPECT_NO_THROW(CutGrid(2, 3));
}

TEST(CutGrid, SplitNodesMatchLocate) {
  const int n = 3;
  const int g = 6;
  const CutGrid grid(n, g);
  for (std::int32_t i = 0; i <= grid.cells(); ++i) {
    for (std::int32_t j = 0; j <= grid.cells(); ++j) {
      const auto loc = locate(Coord(Dyadic(i, g)), Coord(Dyadic(j, g)), n);
      EXPECT_EQ(grid.is_split(i, j), loc.needs_side()) << i << "," << j;
    }
  }
}

namespace {

double energy_of(const CutGrid& grid, auto&& u) {
  double e = 0.0;
  for (const auto& edge : grid.edges()) {
    const double d = u(edge.a) - u(edge.b);
    e += edge.weight * d * d;
  }
  return e;
}

}  // namespace

TEST(CutGrid, LinearPotentialsHaveUnitEnergy) {
  for (const Ambient amb : {Ambient::S2, Ambient::DS2}) {
    for (int n = 0; n <= 3; ++n) {
      const CutGrid grid(n, n + 3, amb);
      const double scale = amb == Ambient::DS2 ? 2.0 : 1.0;
      EXPECT_NEAR(energy_of(grid, [&](std::size_t id) { return grid.y(id); }), scale, 1e-12);
      if (n == 0) EXPECT_NEAR(energy_of(grid, [&](std::size_t id) { return grid.x(id); }), scale, 1e-12);
    }
  }
}

TEST(CutGrid, NoEdgeCrossesASlit) {
  const CutGrid grid(3, 5);
  for (const auto& e : grid.edges()) {
    const auto& a = grid.node(e.a);
    const auto& b = grid.node(e.b);
    if (a.i != b.i) {
      // horizontal edge: the node on the slit column must face the other end
      const auto& lo = a.i < b.i ? a : b;
      const auto& hi = a.i < b.i ? b : a;
      if (lo.side) EXPECT_EQ(*lo.side, Side::right);
      if (hi.side) EXPECT_EQ(*hi.side, Side::left);
    } else if (a.side && b.side) {
      EXPECT_EQ(*a.side, *b.side);
    }
  }
}

TEST(CutGrid, LineOfSight) {
  const CutGrid grid(1, 3);  // slit at i=4, j in (2, 6)
  const auto left = *grid.find(2, 4);
  const auto right = *grid.find(6, 4);
  EXPECT_FALSE(grid.line_of_sight(left, right));
  EXPECT_TRUE(grid.line_of_sight(*grid.find(2, 0), *grid.find(6, 4)));  // passes (4,2): tip
  EXPECT_TRUE(grid.line_of_sight(left, *grid.find(4, 4, Side::left)));
  EXPECT_FALSE(grid.line_of_sight(left, *grid.find(4, 4, Side::right)));
  EXPECT_FALSE(grid.line_of_sight(*grid.find(4, 3, Side::left), *grid.find(4, 5, Side::right)));
  EXPECT_TRUE(grid.line_of_sight(*grid.find(4, 3, Side::left), *grid.find(4, 5, Side::left)));
  EXPECT_TRUE(grid.line_of_sight(*grid.find(4, 3, Side::left), *grid.find(4, 8)));
}

TEST(CutGrid, DoubleSharesTheSeam) {
  const CutGrid grid(1, 2, Ambient::DS2);
  EXPECT_EQ(grid.find(0, 1), grid.find(0, 1));
  EXPECT_FALSE(grid.find(0, 1, std::nullopt, Copy::front).has_value());
  EXPECT_FALSE(grid.find(1, 1).has_value());
  EXPECT_NE(grid.find(1, 1, std::nullopt, Copy::front), grid.find(1, 1, std::nullopt, Copy::back));
  EXPECT_FALSE(grid.line_of_sight(*grid.find(1, 1, std::nullopt, Copy::front),
                                  *grid.find(3, 3, std::nullopt, Copy::back)));
  EXPECT_TRUE(grid.line_of_sight(*grid.find(0, 3), *grid.find(3, 3, std::nullopt, Copy::back)));
  EXPECT_FALSE(grid.line_of_sight(*grid.find(0, 1), *grid.find(3, 3, std::nullopt, Copy::back)));
}

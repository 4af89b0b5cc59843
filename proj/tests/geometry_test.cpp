#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tsppp/geometry.hpp"

using namespace tsppp;

TEST(WorldToGrid, CornersMapToCornerCells) {
  const GridMap g(128, 128);
  EXPECT_EQ(world_to_grid({-1.0, -1.0}, g), (GridIndex{0, 0}));
  EXPECT_EQ(world_to_grid({1.0, 1.0}, g), (GridIndex{127, 127}));
  EXPECT_EQ(world_to_grid({1.0, -1.0}, g), (GridIndex{0, 127}));
}

TEST(WorldToGrid, OriginOnSmallGrid) {
  const GridMap g(4, 4);
  EXPECT_EQ(world_to_grid({0.0, 0.0}, g), (GridIndex{2, 2}));
}

TEST(WorldToGrid, XIsColumnYIsRow) {
  const GridMap g(8, 4);
  const GridIndex c = world_to_grid({0.9, -0.9}, g);
  EXPECT_EQ(c.row, 0);
  EXPECT_EQ(c.col, 7);
}

TEST(WorldToGrid, RoundTripIsIdentityOnIndices) {
  for (auto [w, h] : {std::pair{128, 128}, std::pair{7, 13}, std::pair{1, 1}}) {
    const GridMap g(w, h);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) EXPECT_EQ(world_to_grid(grid_to_world({r, c}, g), g), (GridIndex{r, c}));
  }
}

TEST(GridMap, FreeFractionAndCounts) {
  GridMap g(4, 2);
  g.set_obstacle(0, 1);
  g.set_obstacle(1, 3);
  EXPECT_EQ(g.obstacle_count(), 2u);
  EXPECT_DOUBLE_EQ(g.free_fraction(), 0.75);
  EXPECT_TRUE(g.obstacle(GridIndex{1, 3}));
  EXPECT_TRUE(g.free(1, 2));
}

TEST(PathLength, SumsPolylineSegments) {
  const std::vector<Vec2> p{{0, 0}, {3, 4}, {3, 0}};
  EXPECT_DOUBLE_EQ(path_length(p), 9.0);
  EXPECT_EQ(path_length(std::vector<Vec2>{}), 0.0);
}

TEST(Segment, ThroughObstacleIsInvalid) {
  GridMap g(4, 4);
  g.set_obstacle(1, 1);
  g.set_obstacle(1, 2);
  g.set_obstacle(2, 1);
  g.set_obstacle(2, 2);
  EXPECT_FALSE(is_valid_segment({-0.9, 0.0}, {0.9, 0.0}, g));
  EXPECT_TRUE(is_valid_segment({-0.9, -0.9}, {0.9, -0.9}, g));
}

TEST(Segment, DiagonalCornerContactCounts) {
  // Passing exactly through the shared corner of two obstacle-free cells
  // that touch an obstacle diagonally must be rejected.
  GridMap g(2, 2);
  g.set_obstacle(0, 1);
  EXPECT_FALSE(is_valid_segment({-0.5, -0.5}, {0.5, 0.5}, g));
  EXPECT_TRUE(is_valid_segment({-0.5, -0.5}, {-0.5, 0.5}, g));
}

TEST(Segment, DegenerateSegmentChecksOneCell) {
  GridMap g(4, 4);
  g.set_obstacle(0, 0);
  EXPECT_FALSE(is_valid_segment({-0.8, -0.8}, {-0.8, -0.8}, g));
  EXPECT_TRUE(is_valid_segment({0.8, 0.8}, {0.8, 0.8}, g));
}

TEST(Segment, SymmetricAndNeverLaxerThanDenseSampling) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const GridMap g = oracle::random_grid(32, 32, 0.1, 100 + k);
    const double step = 0.25 * std::min(g.pitch_x(), g.pitch_y());
    for (int s = 0; s < 200; ++s) {
      const Vec2 p{u(rng), u(rng)}, q{u(rng), u(rng)};
      const bool v = is_valid_segment(p, q, g);
      EXPECT_EQ(v, is_valid_segment(q, p, g));
      if (v) { EXPECT_TRUE(oracle::dense_segment_free(p, q, g, step)); }
    }
  }
}

TEST(DistanceTransform, MatchesBruteForceExactly) {
  for (int k = 0; k < 5; ++k) {
    const GridMap g = oracle::random_grid(17 + k, 23 - k, 0.08, 300 + k);
    std::vector<bool> seed(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) seed[i] = g.obstacle(g.cell(i));
    const auto fast = squared_distance_transform(g.width(), g.height(), seed);
    const auto brute = oracle::brute_squared_distance(g, seed);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (brute[i] < 0) continue;
      ASSERT_EQ(fast[i], brute[i]) << "cell " << i;
    }
  }
}

TEST(DistanceTransform, WorldUnitsOnRectangularGrid) {
  GridMap g(4, 2);
  g.set_obstacle(0, 0);
  const DistanceField f = obstacle_distance(g);
  EXPECT_EQ(f.at(0, 0), 0.0);
  EXPECT_NEAR(f.at(0, 3), 3 * g.pitch_x(), 1e-15);
  EXPECT_NEAR(f.at(1, 0), g.pitch_y(), 1e-15);
  EXPECT_NEAR(f.at(1, 1), std::hypot(g.pitch_x(), g.pitch_y()), 1e-15);
}

TEST(DistanceTransform, NoSeedsGivesDiagonal) {
  const GridMap g(8, 8);
  for (double v : obstacle_distance(g).values) EXPECT_EQ(v, kDiagonal);
}

TEST(DistanceTransform, LipschitzOverAdjacentCells) {
  const GridMap g = oracle::random_grid(40, 30, 0.05, 11);
  const DistanceField f = obstacle_distance(g);
  const double diag = std::hypot(g.pitch_x(), g.pitch_y());
  for (int r = 0; r < g.height(); ++r)
    for (int c = 0; c < g.width(); ++c) {
      if (c + 1 < g.width()) { EXPECT_LE(std::abs(f.at(r, c) - f.at(r, c + 1)), g.pitch_x() + 1e-12); }
      if (r + 1 < g.height()) { EXPECT_LE(std::abs(f.at(r, c) - f.at(r + 1, c)), g.pitch_y() + 1e-12); }
      if (r + 1 < g.height() && c + 1 < g.width()) {
        EXPECT_LE(std::abs(f.at(r, c) - f.at(r + 1, c + 1)), diag + 1e-12);
      }
    }
}

TEST(BoundaryNodes, SingleObstacleHasEightNeighbors) {
  GridMap g(3, 3);
  g.set_obstacle(1, 1);
  const auto nodes = boundary_nodes(g);
  EXPECT_EQ(nodes.size(), 8u);
  for (const Vec2& p : nodes) EXPECT_TRUE(is_free_point(p, g));
}

TEST(BoundaryNodes, SubsetOfFreeCells) {
  const GridMap g = oracle::random_grid(30, 30, 0.2, 5);
  for (const Vec2& p : boundary_nodes(g)) EXPECT_TRUE(is_free_point(p, g));
  EXPECT_TRUE(boundary_nodes(GridMap(5, 5)).empty());
}

TEST(FieldInterpolation, ReproducesCellCenterValues) {
  const GridMap g = oracle::random_grid(12, 9, 0.2, 3);
  const DistanceField f = obstacle_distance(g);
  for (int r = 0; r < g.height(); ++r)
    for (int c = 0; c < g.width(); ++c) EXPECT_NEAR(field_value(f, grid_to_world({r, c}, g)), f.at(r, c), 1e-14);
}

TEST(FieldGradient, MatchesFiniteDifferenceAwayFromKinks) {
  const GridMap g = oracle::random_grid(16, 16, 0.1, 21);
  const DistanceField f = obstacle_distance(g);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  const double h = 1e-6;
  int checked = 0;
  while (checked < 300) {
    const Vec2 p{u(rng), u(rng)};
    // lattice coordinate of the point relative to cell centers
    const double a = (p.x + 1.0) * 0.5 * g.width() - 0.5;
    const double b = (p.y + 1.0) * 0.5 * g.height() - 0.5;
    const auto near_line = [](double t) { return std::abs(t - std::round(t)) < 1e-3; };
    if (near_line(a) || near_line(b)) continue;
    const Vec2 grad = field_gradient(f, p);
    const double gx = (field_value(f, {p.x + h, p.y}) - field_value(f, {p.x - h, p.y})) / (2 * h);
    const double gy = (field_value(f, {p.x, p.y + h}) - field_value(f, {p.x, p.y - h})) / (2 * h);
    EXPECT_NEAR(grad.x, gx, 1e-6);
    EXPECT_NEAR(grad.y, gy, 1e-6);
    ++checked;
  }
}

TEST(FieldGradient, PointsAwayFromSingleObstacle) {
  GridMap g(9, 9);
  g.set_obstacle(4, 4);
  const DistanceField f = obstacle_distance(g);
  const Vec2 right = field_gradient(f, {0.5, 0.03});
  EXPECT_GT(right.x, 0.0);
  const Vec2 below = field_gradient(f, {0.03, -0.5});
  EXPECT_LT(below.y, 0.0);
}

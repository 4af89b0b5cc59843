#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "tsppp/search.hpp"

using namespace tsppp;

namespace {

double resum(const Roadmap& rm, const std::vector<int>& path) {
  double total = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    EXPECT_TRUE(rm.has_edge(path[k - 1], path[k]));
    total += distance(rm.node(path[k - 1]), rm.node(path[k]));
  }
  return total;
}

Roadmap with_destinations(Roadmap rm, std::initializer_list<int> dst) {
  for (int d : dst) rm.mark_destination(d);
  return rm;
}

}  // namespace

TEST(ShortestPath, SourceEqualsTarget) {
  const Roadmap rm = oracle::random_roadmap(5, 0.5, 1);
  const auto sp = shortest_path(rm, 3, 3);
  ASSERT_TRUE(sp);
  EXPECT_EQ(sp->cost, 0.0);
  EXPECT_EQ(sp->nodes, (std::vector<int>{3}));
}

TEST(ShortestPath, SingleEdge) {
  Roadmap rm;
  rm.add_node({0, 0});
  rm.add_node({0.3, 0.4});
  rm.add_edge(0, 1);
  const auto sp = shortest_path(rm, 0, 1);
  ASSERT_TRUE(sp);
  EXPECT_DOUBLE_EQ(sp->cost, 0.5);
  EXPECT_EQ(sp->nodes, (std::vector<int>{0, 1}));
}

TEST(ShortestPath, UnreachableIsExplicit) {
  Roadmap rm;
  rm.add_node({0, 0});
  rm.add_node({0.5, 0});
  rm.add_node({0.9, 0.9});
  rm.add_edge(0, 1);
  EXPECT_FALSE(shortest_path(rm, 0, 2).has_value());
  EXPECT_THROW(shortest_path(rm, 0, 7), std::out_of_range);
}

TEST(ShortestPath, EqualCostTieUsesSmallestSequence) {
  // square: 0-1-3 and 0-2-3 have identical cost
  Roadmap rm;
  rm.add_node({0, 0});
  rm.add_node({0.5, 0});
  rm.add_node({0, 0.5});
  rm.add_node({0.5, 0.5});
  rm.add_edge(0, 2);
  rm.add_edge(2, 3);
  rm.add_edge(0, 1);
  rm.add_edge(1, 3);
  EXPECT_EQ(shortest_path(rm, 0, 3)->nodes, (std::vector<int>{0, 1, 3}));
  EXPECT_EQ(shortest_path(rm, 3, 0)->nodes, (std::vector<int>{3, 1, 0}));
}

TEST(ShortestPath, MatchesFloydWarshall) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 20 + seed * 4;
    const Roadmap rm = oracle::random_roadmap(n, 4.0 / n, seed);
    const auto fw = oracle::floyd_warshall(rm);
    for (int s = 0; s < static_cast<int>(n); s += 3) {
      const SearchTree tree = dijkstra(rm, s);
      for (int t = 0; t < static_cast<int>(n); ++t) {
        const auto c = tree.cost(t);
        if (std::isinf(fw[s][t])) {
          EXPECT_FALSE(c.has_value());
          continue;
        }
        ASSERT_TRUE(c.has_value());
        EXPECT_NEAR(*c, fw[s][t], 1e-9 * std::max(1.0, fw[s][t]));
        const auto path = tree.path_to(t);
        EXPECT_EQ(path.front(), s);
        EXPECT_EQ(path.back(), t);
        EXPECT_NEAR(resum(rm, path), *c, 1e-9 * std::max(1.0, *c));
      }
    }
  }
}

TEST(CostMatrix, SingleDestinationIsZero) {
  const Roadmap rm = with_destinations(oracle::random_roadmap(4, 0.5, 2), {2});
  const CostMatrix m = destination_cost_matrix(rm);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.at(0, 0), 0.0);
  EXPECT_TRUE(m.all_finite());
}

TEST(CostMatrix, DisjointComponentsAreEmpty) {
  Roadmap rm;
  for (Vec2 p : {Vec2{0, 0}, Vec2{0.1, 0}, Vec2{0.8, 0.8}, Vec2{0.9, 0.8}}) rm.add_node(p);
  rm.add_edge(0, 1);
  rm.add_edge(2, 3);
  rm.mark_destination(0);
  rm.mark_destination(1);
  rm.mark_destination(3);
  const CostMatrix m = destination_cost_matrix(rm);
  EXPECT_TRUE(m.at(0, 1).has_value());
  EXPECT_FALSE(m.at(0, 2).has_value());
  EXPECT_FALSE(m.at(2, 1).has_value());
  EXPECT_FALSE(m.all_finite());
}

TEST(CostMatrix, MatchesPairwiseSearchesAndIsSymmetric) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Roadmap rm = oracle::random_roadmap(80, 0.05, 40 + seed);
    for (int d = 0; d < 80; d += 9) rm.mark_destination(d);
    const CostMatrix m = destination_cost_matrix(rm);
    const auto& dst = rm.destination_indices();
    for (std::size_t i = 0; i < dst.size(); ++i)
      for (std::size_t j = 0; j < dst.size(); ++j) {
        EXPECT_EQ(m.at(i, j), m.at(j, i));
        const auto sp = shortest_path(rm, dst[i], dst[j]);
        ASSERT_EQ(sp.has_value(), m.at(i, j).has_value());
        if (!sp) continue;
        EXPECT_NEAR(*m.at(i, j), sp->cost, 1e-9 * std::max(1.0, sp->cost));
        const auto& w = m.witness(i, j);
        EXPECT_EQ(w.front(), dst[i]);
        EXPECT_EQ(w.back(), dst[j]);
        EXPECT_NEAR(resum(rm, w), *m.at(i, j), 1e-9 * std::max(1.0, sp->cost));
      }
  }
}

TEST(CostMatrix, TriangleInequality) {
  Roadmap rm = oracle::random_roadmap(60, 0.1, 5);
  for (int d = 0; d < 60; d += 6) rm.mark_destination(d);
  const CostMatrix m = destination_cost_matrix(rm);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      for (std::size_t k = 0; k < m.size(); ++k)
        if (m.at(i, j) && m.at(j, k) && m.at(i, k)) { EXPECT_LE(m.value(i, k), m.value(i, j) + m.value(j, k) + 1e-12); }
}

TEST(CostMatrix, NoDestinationsIsAnError) {
  EXPECT_THROW(destination_cost_matrix(oracle::random_roadmap(3, 1.0, 1)), std::invalid_argument);
}

#include <gtest/gtest.h>

#include <cmath>

#include "tsppp/metrics.hpp"
#include "tsppp/pipeline.hpp"

using namespace tsppp;

namespace {

Instance open_triangle() {
  Instance inst;
  inst.grid = GridMap(64, 64);
  inst.destinations = {{-0.5, -0.5}, {0.5, -0.5}, {0.0, 0.5}};
  return inst;
}

void expect_valid_solution(const Instance& inst, const Solution& sol) {
  ASSERT_TRUE(sol.success);
  EXPECT_EQ(sol.path.front(), sol.path.back());
  for (const Vec2& d : inst.destinations) {
    double best = INFINITY;
    for (const Vec2& p : sol.path) best = std::min(best, distance(p, d));
    EXPECT_LE(best, 1e-9);
  }
  for (std::size_t k = 1; k < sol.path.size(); ++k)
    EXPECT_TRUE(is_valid_segment(sol.path[k - 1], sol.path[k], inst.grid));
  EXPECT_NEAR(sol.length, path_length(sol.path), 1e-9 * sol.length);
}

}  // namespace

TEST(MethodParsing, NamesAndParameters) {
  EXPECT_EQ(parse_method("prm:500").describe_params(), "n=500");
  EXPECT_EQ(parse_method("prm").describe_params(), "n=1000");
  EXPECT_EQ(parse_method("prm:n=200").name(), "prm");
  const Method d = parse_method("tspdiffuser:M=20,K=15,I=5,alpha=0.5,boundary=0,schedule=linear");
  EXPECT_EQ(d.name(), "tspdiffuser");
  const auto& p = std::get<DiffusionMethod>(d.params);
  EXPECT_EQ(p.paths, 20u);
  EXPECT_EQ(p.k_neighbors, 15u);
  EXPECT_EQ(p.alpha_scale, 0.5);
  EXPECT_FALSE(p.boundary_nodes);
  EXPECT_EQ(p.schedule, ScheduleKind::linear);
  EXPECT_EQ(parse_method("diffuser").name(), "diffuser");
  EXPECT_EQ(std::get<DiffusionMethod>(parse_method("diffuser:M=7").params).paths, 1u);
  EXPECT_EQ(Method::tspdiffuser().describe_params(), "M=10;K=5;I=5;alpha=1;T=256;schedule=cosine");
}

TEST(MethodParsing, RejectsBadInput) {
  for (const char* bad : {"astar", "prm:0", "prm:abc", "tspdiffuser:Q=1", "tspdiffuser:M", "tspdiffuser:K=0",
                          "tspdiffuser:M=x", "tspdiffuser:schedule=quadratic", "tspdiffuser:alpha=-1"})
    EXPECT_THROW(parse_method(bad), std::invalid_argument) << bad;
}

TEST(SolveTsppp, OpenMapTriangleWithPrm) {
  const Instance inst = open_triangle();
  const Solution sol = solve_tsppp(inst, Method::prm(200), 1);
  expect_valid_solution(inst, sol);
  const auto& d = inst.destinations;
  const double perimeter = distance(d[0], d[1]) + distance(d[1], d[2]) + distance(d[2], d[0]);
  EXPECT_GE(sol.length, perimeter - 1e-12);
  EXPECT_EQ(sol.roadmap_nodes, 203u);
  EXPECT_GE(sol.timings.roadmap, 0.0);
}

TEST(SolveTsppp, WalledOffDestinationIsUnreachable) {
  Instance inst = open_triangle();
  // box around the third destination (0, 0.5) -> cell (48, 32)
  for (int r = 44; r <= 52; ++r)
    for (int c = 28; c <= 36; ++c)
      if (r == 44 || r == 52 || c == 28 || c == 36) inst.grid.set_obstacle(r, c);
  for (const Method& m : {Method::prm(300), Method::tspdiffuser()}) {
    const Solution sol = solve_tsppp(inst, m, 2);
    EXPECT_FALSE(sol.success);
    EXPECT_EQ(sol.reason, FailureReason::unreachable_pair);
    EXPECT_TRUE(sol.path.empty());
  }
}

TEST(SolveTsppp, FullyBlockedMapIsDegenerate) {
  Instance inst = open_triangle();
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c) inst.grid.set_obstacle(r, c);
  const Solution sol = solve_tsppp(inst, Method::prm(10), 1);
  EXPECT_FALSE(sol.success);
  EXPECT_EQ(sol.reason, FailureReason::degenerate_map);
}

TEST(SolveTsppp, DeterministicForFixedSeed) {
  const Instance inst = make_synthetic_instance(EnvironmentSpec::of(EnvironmentKind::standard), 10, 31);
  for (const Method& m : {Method::prm(500), Method::tspdiffuser(), Method::diffuser()}) {
    const Solution a = solve_tsppp(inst, m, 8);
    const Solution b = solve_tsppp(inst, m, 8);
    EXPECT_EQ(a.success, b.success);
    EXPECT_EQ(a.path, b.path);
    EXPECT_EQ(a.length, b.length);
    EXPECT_EQ(a.roadmap_edges, b.roadmap_edges);
  }
}

TEST(SolveTsppp, SolutionsAreValidLoopsOnStandardMaps) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance inst = make_synthetic_instance(EnvironmentSpec::of(EnvironmentKind::standard), 10, 60 + seed);
    const Solution sol = solve_tsppp(inst, Method::tspdiffuser(), seed);
    if (sol.success) expect_valid_solution(inst, sol);
  }
}

TEST(SolveTsppp, NeverShorterThanOracleTour) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance inst = make_synthetic_instance(EnvironmentSpec::of(EnvironmentKind::standard), 10, 80 + seed);
    const auto oracle = oracle_solve(inst, 1);
    if (!oracle) continue;
    for (const Method& m : {Method::prm(1000), Method::tspdiffuser(), Method::diffuser()}) {
      const Solution sol = solve_tsppp(inst, m, 2);
      if (sol.success) {
        EXPECT_GE(sol.length, oracle->l_hat) << m.name() << " instance " << inst.seed;
      }
    }
  }
}

TEST(SolveTsppp, ManyDestinationsUseHeuristicTour) {
  const Instance inst = make_synthetic_instance(EnvironmentSpec::of(EnvironmentKind::standard), 20, 1);
  DiffusionMethod d;
  d.k_neighbors = 15;
  const Solution sol = solve_tsppp(inst, Method::tspdiffuser(d), 3);
  expect_valid_solution(inst, sol);
}

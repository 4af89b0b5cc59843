#pragma once

// Synthetic obstacle maps, free-space components and destination sampling.

#include <algorithm>
#include <cstdint>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tsppp/geometry.hpp"
#include "tsppp/random.hpp"

namespace tsppp {

/// Raised when a map cannot host the requested construction
/// (no free cells, component too small, sampling exhausted).
class DegenerateMapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EnvironmentKind { standard, more_obstacles, larger_obstacles };

struct EnvironmentSpec {
  EnvironmentKind kind = EnvironmentKind::standard;
  int obstacle_count = 20;
  int obstacle_side = 20;
  int map_size = 128;

  static EnvironmentSpec of(EnvironmentKind kind) {
    switch (kind) {
      case EnvironmentKind::standard: return {kind, 20, 20, 128};
      case EnvironmentKind::more_obstacles: return {kind, 40, 10, 128};
      case EnvironmentKind::larger_obstacles: return {kind, 10, 40, 128};
    }
    throw std::invalid_argument("unknown environment kind");
  }
};

inline std::string_view to_string(EnvironmentKind kind) {
  switch (kind) {
    case EnvironmentKind::standard: return "standard";
    case EnvironmentKind::more_obstacles: return "more_obstacles";
    case EnvironmentKind::larger_obstacles: return "larger_obstacles";
  }
  return "unknown";
}

inline EnvironmentKind parse_environment_kind(std::string_view name) {
  if (name == "standard") return EnvironmentKind::standard;
  if (name == "more_obstacles") return EnvironmentKind::more_obstacles;
  if (name == "larger_obstacles") return EnvironmentKind::larger_obstacles;
  throw std::invalid_argument("unknown environment kind: " + std::string(name));
}

struct Instance {
  GridMap grid;
  std::vector<Vec2> destinations;
  std::uint64_t seed = 0;
};

/// Places `obstacle_count` axis-aligned squares at uniform integer offsets
/// fully inside the map. Overlaps are allowed.
inline GridMap generate_synthetic(const EnvironmentSpec& spec, std::uint64_t seed) {
  if (spec.obstacle_side < 1 || spec.obstacle_side > spec.map_size || spec.obstacle_count < 0)
    throw std::invalid_argument("generate_synthetic: invalid environment spec");
  GridMap g(spec.map_size, spec.map_size);
  Rng rng(seed);
  std::uniform_int_distribution<int> offset(0, spec.map_size - spec.obstacle_side);
  for (int k = 0; k < spec.obstacle_count; ++k) {
    const int row = offset(rng);
    const int col = offset(rng);
    for (int r = row; r < row + spec.obstacle_side; ++r)
      for (int c = col; c < col + spec.obstacle_side; ++c) g.set_obstacle(r, c);
  }
  return g;
}

/// Labels 4-connected free components. Returns one label per cell (-1 for
/// obstacles); labels are assigned in row-major order of first cell.
inline std::vector<int> free_components(const GridMap& g, std::vector<std::size_t>* sizes = nullptr) {
  std::vector<int> label(g.size(), -1);
  if (sizes) sizes->clear();
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < g.size(); ++start) {
    const auto s = g.cell(start);
    if (label[start] != -1 || g.obstacle(s)) continue;
    std::size_t count = 0;
    label[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const auto cur = g.cell(stack.back());
      stack.pop_back();
      ++count;
      constexpr int dr[] = {-1, 1, 0, 0};
      constexpr int dc[] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        const int r = cur.row + dr[k];
        const int c = cur.col + dc[k];
        if (!g.contains(r, c) || g.obstacle(r, c)) continue;
        const auto idx = g.index(r, c);
        if (label[idx] != -1) continue;
        label[idx] = next;
        stack.push_back(idx);
      }
    }
    if (sizes) sizes->push_back(count);
    ++next;
  }
  return label;
}

/// Flat indices (row-major, ascending) of the largest 4-connected free
/// component. Ties go to the component whose first cell comes first.
inline std::vector<std::size_t> largest_free_component(const GridMap& g) {
  std::vector<std::size_t> sizes;
  const auto label = free_components(g, &sizes);
  if (sizes.empty()) throw DegenerateMapError("largest_free_component: map has no free cell");
  const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<std::size_t> cells;
  cells.reserve(sizes[static_cast<std::size_t>(best)]);
  for (std::size_t i = 0; i < label.size(); ++i)
    if (label[i] == best) cells.push_back(i);
  return cells;
}

/// `n` distinct cell centers drawn uniformly without replacement from the
/// largest free component.
inline std::vector<Vec2> sample_destinations(const GridMap& g, std::size_t n, std::uint64_t seed) {
  auto cells = largest_free_component(g);
  if (cells.size() < n)
    throw DegenerateMapError("sample_destinations: largest free component has " + std::to_string(cells.size()) +
                             " cells, need " + std::to_string(n));
  Rng rng(seed);
  std::vector<Vec2> out;
  out.reserve(n);
  // partial Fisher-Yates
  for (std::size_t k = 0; k < n; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, cells.size() - 1);
    std::swap(cells[k], cells[pick(rng)]);
    out.push_back(grid_to_world(g.cell(cells[k]), g));
  }
  return out;
}

inline Instance make_synthetic_instance(const EnvironmentSpec& spec, std::size_t destinations, std::uint64_t seed) {
  Instance inst;
  inst.seed = seed;
  inst.grid = generate_synthetic(spec, derive_seed(seed, 1));
  inst.destinations = sample_destinations(inst.grid, destinations, derive_seed(seed, 2));
  return inst;
}

/// Checks the per-destination invariants of an Instance: inside the domain,
/// in a free cell, pairwise distinct. Connectivity is not required here; a
/// disconnected instance is a planning failure, not an input error.
inline void validate_instance(const Instance& inst) {
  if (inst.destinations.empty()) throw std::invalid_argument("instance has no destinations");
  for (std::size_t i = 0; i < inst.destinations.size(); ++i) {
    const Vec2 d = inst.destinations[i];
    if (!in_domain(d)) throw std::invalid_argument("destination " + std::to_string(i) + " lies outside [-1,1]^2");
    if (!is_free_point(d, inst.grid))
      throw std::invalid_argument("destination " + std::to_string(i) + " lies in an obstacle cell");
    for (std::size_t j = 0; j < i; ++j)
      if (inst.destinations[j] == d)
        throw std::invalid_argument("destinations " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
  }
}

}  // namespace tsppp

#pragma once

// Roadmaps over free space: the graph type, classical PRM with an adaptive
// connection radius, and construction from sampled loop paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tsppp/environments.hpp"
#include "tsppp/geometry.hpp"
#include "tsppp/random.hpp"

namespace tsppp {

struct Edge {
  int u = 0;
  int v = 0;
  double cost = 0.0;
};

struct Neighbor {
  int node = 0;
  double cost = 0.0;
};

/// Undirected graph with Euclidean edge costs. Self-loops, duplicate edges
/// and zero-length edges between coincident nodes are rejected.
class Roadmap {
 public:
  int add_node(Vec2 p) {
    nodes_.push_back(p);
    adjacency_.emplace_back();
    return static_cast<int>(nodes_.size()) - 1;
  }

  /// Returns true when a new edge was inserted.
  bool add_edge(int u, int v) {
    if (u == v) return false;
    const double cost = distance(nodes_[static_cast<std::size_t>(u)], nodes_[static_cast<std::size_t>(v)]);
    if (cost == 0.0) return false;
    if (!edge_keys_.insert(key(u, v)).second) return false;
    edges_.push_back({std::min(u, v), std::max(u, v), cost});
    adjacency_[static_cast<std::size_t>(u)].push_back({v, cost});
    adjacency_[static_cast<std::size_t>(v)].push_back({u, cost});
    return true;
  }

  bool has_edge(int u, int v) const { return edge_keys_.contains(key(u, v)); }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Vec2>& nodes() const { return nodes_; }
  Vec2 node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const Neighbor> neighbors(int u) const { return adjacency_[static_cast<std::size_t>(u)]; }

  const std::vector<int>& destination_indices() const { return destinations_; }
  void mark_destination(int node) { destinations_.push_back(node); }

 private:
  static std::uint64_t key(int u, int v) {
    const auto a = static_cast<std::uint64_t>(static_cast<std::uint32_t>(std::min(u, v)));
    const auto b = static_cast<std::uint64_t>(static_cast<std::uint32_t>(std::max(u, v)));
    return (a << 32) | b;
  }

  std::vector<Vec2> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::unordered_set<std::uint64_t> edge_keys_;
  std::vector<int> destinations_;
};

/// PRM* connection radius gamma*sqrt(log n / n), with gamma 10% above the
/// asymptotic-optimality bound for the estimated free-space measure.
inline double adaptive_radius(std::size_t n, const GridMap& g) {
  const double free_measure = 4.0 * g.free_fraction();
  const double gamma = 1.1 * 2.0 * std::sqrt(1.5 * free_measure / std::numbers::pi);
  const double nn = static_cast<double>(std::max<std::size_t>(n, 2));
  return std::min(gamma * std::sqrt(std::log(nn) / nn), kDiagonal);
}

/// Uniform free-space samples plus the destinations, connected to every
/// neighbor within adaptive_radius when the segment is valid.
inline Roadmap build_prm(const GridMap& g, std::size_t n_nodes, std::span<const Vec2> destinations,
                         std::uint64_t seed) {
  Roadmap rm;
  Rng rng(seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  const std::size_t max_attempts = 1000 * std::max<std::size_t>(n_nodes, 1);
  std::size_t attempts = 0;
  while (rm.node_count() < n_nodes) {
    if (++attempts > max_attempts) throw DegenerateMapError("build_prm: rejection sampling exhausted");
    const double x = coord(rng);
    const double y = coord(rng);
    if (is_free_point({x, y}, g)) rm.add_node({x, y});
  }
  for (const Vec2& d : destinations) rm.mark_destination(rm.add_node(d));

  const int n = static_cast<int>(rm.node_count());
  const double r = adaptive_radius(rm.node_count(), g);
  const double r2 = r * r;
  // Bucket by radius so only adjacent buckets are scanned; edge order is
  // still ascending (i, j).
  const int buckets = std::max(1, static_cast<int>(std::floor(2.0 / r)));
  const auto bucket_of = [&](double v) { return std::clamp(static_cast<int>((v + 1.0) * 0.5 * buckets), 0, buckets - 1); };
  std::vector<std::vector<int>> grid(static_cast<std::size_t>(buckets) * static_cast<std::size_t>(buckets));
  for (int i = 0; i < n; ++i) {
    const Vec2 p = rm.node(i);
    grid[static_cast<std::size_t>(bucket_of(p.y)) * static_cast<std::size_t>(buckets) + static_cast<std::size_t>(bucket_of(p.x))]
        .push_back(i);
  }
  std::vector<int> candidates;
  for (int i = 0; i < n; ++i) {
    const Vec2 p = rm.node(i);
    const int bx = bucket_of(p.x);
    const int by = bucket_of(p.y);
    candidates.clear();
    for (int y = std::max(0, by - 1); y <= std::min(buckets - 1, by + 1); ++y)
      for (int x = std::max(0, bx - 1); x <= std::min(buckets - 1, bx + 1); ++x)
        for (int j : grid[static_cast<std::size_t>(y) * static_cast<std::size_t>(buckets) + static_cast<std::size_t>(x)])
          if (j > i && squared_distance(p, rm.node(j)) <= r2) candidates.push_back(j);
    std::sort(candidates.begin(), candidates.end());
    for (int j : candidates)
      if (is_valid_segment(p, rm.node(j), g)) rm.add_edge(i, j);
  }
  return rm;
}

/// Indices of the k nearest other nodes of `v` (Euclidean, ties by lower index).
inline std::vector<int> k_nearest(std::span<const Vec2> nodes, int v, std::size_t k) {
  std::vector<std::pair<double, int>> order;
  order.reserve(nodes.size());
  const Vec2 p = nodes[static_cast<std::size_t>(v)];
  for (int w = 0; w < static_cast<int>(nodes.size()); ++w)
    if (w != v) order.emplace_back(squared_distance(p, nodes[static_cast<std::size_t>(w)]), w);
  const std::size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end());
  std::vector<int> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(order[i].second);
  return out;
}

struct PathRoadmapOptions {
  std::size_t k_neighbors = 5;
  bool boundary_nodes = true;
  bool close_loops = true;
};

/// Roadmap from sampled paths: path points become nodes and consecutive
/// (and loop-closing) pairs are joined when valid; destinations and
/// obstacle-boundary nodes are added; finally every node is tried against
/// its K nearest neighbors.
///
/// Node layout: path points in (path, step) order, then destinations, then
/// boundary nodes. Points inside obstacles stay as isolated nodes.
template <typename PathRange>
Roadmap build_from_paths(const PathRange& paths, std::span<const Vec2> destinations, const GridMap& g,
                         const PathRoadmapOptions& opt = {}) {
  Roadmap rm;
  for (const auto& path : paths) {
    const auto& pts = path.points;
    if (pts.empty()) continue;
    const int first = static_cast<int>(rm.node_count());
    for (const Vec2& p : pts) rm.add_node(p);
    const int count = static_cast<int>(pts.size());
    for (int t = 0; t + 1 < count; ++t)
      if (is_valid_segment(pts[static_cast<std::size_t>(t)], pts[static_cast<std::size_t>(t) + 1], g))
        rm.add_edge(first + t, first + t + 1);
    if (opt.close_loops && count > 2 && is_valid_segment(pts.back(), pts.front(), g))
      rm.add_edge(first + count - 1, first);
  }
  for (const Vec2& d : destinations) rm.mark_destination(rm.add_node(d));
  if (opt.boundary_nodes)
    for (const Vec2& b : boundary_nodes(g)) rm.add_node(b);

  const int n = static_cast<int>(rm.node_count());
  for (int v = 0; v < n; ++v)
    for (int w : k_nearest(rm.nodes(), v, opt.k_neighbors))
      if (!rm.has_edge(v, w) && is_valid_segment(rm.node(v), rm.node(w), g)) rm.add_edge(v, w);
  return rm;
}

}  // namespace tsppp

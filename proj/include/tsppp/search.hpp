#pragma once

// Shortest paths on roadmaps and the destination-to-destination cost matrix.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tsppp/roadmap.hpp"

namespace tsppp {

struct ShortestPath {
  double cost = 0.0;
  std::vector<int> nodes;
};

/// Single-source search result. Unreached nodes have no predecessor and an
/// empty distance.
class SearchTree {
 public:
  SearchTree(int source, std::vector<double> dist, std::vector<int> pred)
      : source_(source), dist_(std::move(dist)), pred_(std::move(pred)) {}

  int source() const { return source_; }
  bool reached(int v) const { return v == source_ || pred_[static_cast<std::size_t>(v)] >= 0; }
  std::optional<double> cost(int v) const {
    if (!reached(v)) return std::nullopt;
    return dist_[static_cast<std::size_t>(v)];
  }
  std::vector<int> path_to(int v) const {
    std::vector<int> path;
    if (!reached(v)) return path;
    for (int cur = v; cur != source_; cur = pred_[static_cast<std::size_t>(cur)]) path.push_back(cur);
    path.push_back(source_);
    std::reverse(path.begin(), path.end());
    return path;
  }
  std::optional<ShortestPath> shortest_path(int v) const {
    if (!reached(v)) return std::nullopt;
    return ShortestPath{dist_[static_cast<std::size_t>(v)], path_to(v)};
  }

 private:
  int source_;
  std::vector<double> dist_;
  std::vector<int> pred_;
};

/// Label-setting search with a binary heap. Equal-cost alternatives are
/// resolved toward the lexicographically smallest node sequence.
inline SearchTree dijkstra(const Roadmap& rm, int source) {
  const std::size_t n = rm.node_count();
  if (source < 0 || static_cast<std::size_t>(source) >= n) throw std::out_of_range("dijkstra: bad source");
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<int> pred(n, -1);
  std::vector<char> settled(n, 0);

  const auto path_from_source = [&](int v) {
    std::vector<int> p;
    for (int cur = v; cur != source; cur = pred[static_cast<std::size_t>(cur)]) p.push_back(cur);
    p.push_back(source);
    std::reverse(p.begin(), p.end());
    return p;
  };

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[static_cast<std::size_t>(source)] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (settled[static_cast<std::size_t>(u)]) continue;
    settled[static_cast<std::size_t>(u)] = 1;
    for (const Neighbor& nb : rm.neighbors(u)) {
      const auto v = static_cast<std::size_t>(nb.node);
      if (settled[v]) continue;
      const double nd = d + nb.cost;
      if (nd < dist[v]) {
        dist[v] = nd;
        pred[v] = u;
        heap.emplace(nd, nb.node);
      } else if (nd == dist[v] && pred[v] != u) {
        // Both predecessors are settled, so their paths are final.
        auto candidate = path_from_source(u);
        auto incumbent = path_from_source(pred[v]);
        candidate.push_back(nb.node);
        incumbent.push_back(nb.node);
        if (std::lexicographical_compare(candidate.begin(), candidate.end(), incumbent.begin(), incumbent.end()))
          pred[v] = u;
      }
    }
  }
  return SearchTree(source, std::move(dist), std::move(pred));
}

/// Minimal-cost path from src to dst, or nullopt when unreachable.
inline std::optional<ShortestPath> shortest_path(const Roadmap& rm, int src, int dst) {
  if (dst < 0 || static_cast<std::size_t>(dst) >= rm.node_count()) throw std::out_of_range("shortest_path: bad target");
  return dijkstra(rm, src).shortest_path(dst);
}

/// Dense matrix of destination-to-destination costs; entries without a
/// connecting path are empty (never a large float).
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(std::size_t n) : n_(n), cost_(n * n), witness_(n * n) {
    for (std::size_t i = 0; i < n; ++i) cost_[i * n + i] = 0.0;
  }

  /// Builds a matrix from plain values (witnesses left empty).
  static CostMatrix from_values(const std::vector<std::vector<double>>& values) {
    CostMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
      for (std::size_t j = 0; j < values.size(); ++j)
        if (i != j) m.set(i, j, values[i][j]);
    return m;
  }

  std::size_t size() const { return n_; }
  std::optional<double> at(std::size_t i, std::size_t j) const { return cost_[i * n_ + j]; }
  double value(std::size_t i, std::size_t j) const { return *cost_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, std::optional<double> c) { cost_[i * n_ + j] = c; }

  bool all_finite() const {
    return std::all_of(cost_.begin(), cost_.end(), [](const auto& c) { return c.has_value(); });
  }

  bool symmetric() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if (cost_[i * n_ + j] != cost_[j * n_ + i]) return false;
    return true;
  }

  const std::vector<int>& witness(std::size_t i, std::size_t j) const { return witness_[i * n_ + j]; }
  void set_witness(std::size_t i, std::size_t j, std::vector<int> path) { witness_[i * n_ + j] = std::move(path); }

  CostMatrix scaled(double factor) const {
    CostMatrix m = *this;
    for (auto& c : m.cost_)
      if (c) *c *= factor;
    return m;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::optional<double>> cost_;
  std::vector<std::vector<int>> witness_;
};

/// One search per destination; the upper triangle is taken from the
/// lower-indexed source and mirrored, so the matrix is exactly symmetric and
/// witness(j, i) is witness(i, j) reversed.
inline CostMatrix destination_cost_matrix(const Roadmap& rm) {
  const auto& dst = rm.destination_indices();
  if (dst.empty()) throw std::invalid_argument("destination_cost_matrix: roadmap has no destinations");
  const std::size_t n = dst.size();
  CostMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.set_witness(i, i, {dst[i]});
    if (i + 1 == n) break;
    const SearchTree tree = dijkstra(rm, dst[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      auto sp = tree.shortest_path(dst[j]);
      if (!sp) {
        m.set(i, j, std::nullopt);
        m.set(j, i, std::nullopt);
        continue;
      }
      m.set(i, j, sp->cost);
      m.set(j, i, sp->cost);
      std::vector<int> back(sp->nodes.rbegin(), sp->nodes.rend());
      m.set_witness(i, j, std::move(sp->nodes));
      m.set_witness(j, i, std::move(back));
    }
  }
  return m;
}

}  // namespace tsppp

#pragma once

// Closed-tour TSP over destination cost matrices: exact Held-Karp for small
// instances, local search for larger ones, and path stitching.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tsppp/random.hpp"
#include "tsppp/search.hpp"

namespace tsppp {

/// Visiting order starting at destination 0, returning to it at the end.
struct Tour {
  std::vector<int> order;
  double total_cost = 0.0;
};

inline constexpr std::size_t kMaxExactDestinations = 15;

class TspCapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Closed-tour cost summed forward from order[0].
inline double tour_cost(const std::vector<int>& order, const CostMatrix& m) {
  if (order.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < order.size(); ++k)
    total += m.value(static_cast<std::size_t>(order[k]), static_cast<std::size_t>(order[k + 1]));
  return total + m.value(static_cast<std::size_t>(order.back()), static_cast<std::size_t>(order.front()));
}

namespace detail {

// A tour and its reverse differ only by summation rounding on symmetric
// matrices; keep the lexicographically smaller orientation.
inline void canonical_orientation(Tour& t, const CostMatrix& m) {
  if (t.order.size() < 3 || !m.symmetric()) return;
  std::vector<int> reversed{t.order.front()};
  reversed.insert(reversed.end(), t.order.rbegin(), t.order.rend() - 1);
  if (reversed < t.order) {
    t.order = std::move(reversed);
    t.total_cost = tour_cost(t.order, m);
  }
}

}  // namespace detail

/// Held-Karp dynamic program. Returns nullopt when any entry is unreachable;
/// throws TspCapacityError above kMaxExactDestinations. Among tours of equal
/// cost the lexicographically smallest order is returned; for symmetric
/// matrices a tour and its reverse count as the same tour.
inline std::optional<Tour> solve_exact(const CostMatrix& m) {
  const std::size_t n = m.size();
  if (n > kMaxExactDestinations)
    throw TspCapacityError("solve_exact: " + std::to_string(n) + " destinations exceed the exact limit of " +
                           std::to_string(kMaxExactDestinations) + "; use solve_heuristic");
  if (n == 0) throw std::invalid_argument("solve_exact: empty cost matrix");
  if (!m.all_finite()) return std::nullopt;
  if (n == 1) return Tour{{0}, 0.0};

  // Bit b of a mask stands for destination b+1.
  const std::size_t k = n - 1;
  const std::size_t full = (std::size_t{1} << k) - 1;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dp((full + 1) * k, inf);
  std::vector<std::int8_t> parent((full + 1) * k, -1);
  const auto at = [k](std::size_t mask, std::size_t j) { return mask * k + j; };
  const auto c = [&m](std::size_t a, std::size_t b) { return m.value(a, b); };

  const auto prefix = [&](std::size_t mask, std::size_t j) {
    std::vector<int> seq;
    while (true) {
      seq.push_back(static_cast<int>(j + 1));
      const int p = parent[at(mask, j)];
      mask &= ~(std::size_t{1} << j);
      if (p < 0) break;
      j = static_cast<std::size_t>(p);
    }
    seq.push_back(0);
    std::reverse(seq.begin(), seq.end());
    return seq;
  };

  for (std::size_t j = 0; j < k; ++j) dp[at(std::size_t{1} << j, j)] = c(0, j + 1);

  for (std::size_t mask = 1; mask <= full; ++mask) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!(mask & (std::size_t{1} << j))) continue;
      const double base = dp[at(mask, j)];
      if (base == inf) continue;
      for (std::size_t nxt = 0; nxt < k; ++nxt) {
        if (mask & (std::size_t{1} << nxt)) continue;
        const std::size_t next_mask = mask | (std::size_t{1} << nxt);
        const double cand = base + c(j + 1, nxt + 1);
        double& slot = dp[at(next_mask, nxt)];
        std::int8_t& par = parent[at(next_mask, nxt)];
        if (cand < slot) {
          slot = cand;
          par = static_cast<std::int8_t>(j);
        } else if (cand == slot && par != static_cast<std::int8_t>(j)) {
          if (prefix(mask, j) < prefix(mask, static_cast<std::size_t>(par))) par = static_cast<std::int8_t>(j);
        }
      }
    }
  }

  double best = inf;
  std::vector<int> best_order;
  for (std::size_t j = 0; j < k; ++j) {
    const double total = dp[at(full, j)] + c(j + 1, 0);
    if (total < best) {
      best = total;
      best_order = prefix(full, j);
    } else if (total == best) {
      auto order = prefix(full, j);
      if (order < best_order) best_order = std::move(order);
    }
  }
  Tour tour{std::move(best_order), best};
  detail::canonical_orientation(tour, m);
  return tour;
}

struct HeuristicOptions {
  /// Double-bridge perturbations applied after the first local optimum.
  int kicks = 50;
};

namespace detail {

class LocalSearch {
 public:
  explicit LocalSearch(const CostMatrix& m) : m_(m) {}

  double c(int a, int b) const { return m_.value(static_cast<std::size_t>(a), static_cast<std::size_t>(b)); }

  static bool improves(double delta, double scale) { return delta < -1e-12 * std::max(scale, 1e-300); }

  bool two_opt(std::vector<int>& t) const {
    const std::size_t n = t.size();
    bool any = false;
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t i = 0; i + 2 < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
          if (i == 0 && j == n - 1) continue;
          const int a = t[i], b = t[i + 1], cc = t[j], d = t[(j + 1) % n];
          const double removed = c(a, b) + c(cc, d);
          const double delta = c(a, cc) + c(b, d) - removed;
          if (improves(delta, removed)) {
            std::reverse(t.begin() + static_cast<std::ptrdiff_t>(i + 1), t.begin() + static_cast<std::ptrdiff_t>(j + 1));
            improved = any = true;
          }
        }
      }
    }
    return any;
  }

  // Relocates segments of 1-3 consecutive destinations (optionally
  // reversed) to the best improving position; position 0 stays fixed.
  bool or_opt(std::vector<int>& t) const {
    const std::size_t n = t.size();
    bool any = false;
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t len = 1; len <= 3 && !improved; ++len) {
        if (n < len + 3) break;
        for (std::size_t i = 1; i + len <= n && !improved; ++i) {
          const int prev = t[i - 1];
          const int first = t[i];
          const int last = t[i + len - 1];
          const int next = t[(i + len) % n];
          const double gain = c(prev, first) + c(last, next) - c(prev, next);
          for (std::size_t j = 0; j < n && !improved; ++j) {
            if (j + 1 >= i && j < i + len) continue;  // edge (t[j], t[j+1]) touches the segment
            const int x = t[j];
            const int y = t[(j + 1) % n];
            if (x == prev && y == next) continue;
            const double forward = c(x, first) + c(last, y) - c(x, y);
            const double backward = c(x, last) + c(first, y) - c(x, y);
            const bool reverse = backward < forward;
            const double delta = (reverse ? backward : forward) - gain;
            if (!improves(delta, gain + c(x, y))) continue;
            std::vector<int> seg(t.begin() + static_cast<std::ptrdiff_t>(i),
                                 t.begin() + static_cast<std::ptrdiff_t>(i + len));
            if (reverse) std::reverse(seg.begin(), seg.end());
            t.erase(t.begin() + static_cast<std::ptrdiff_t>(i), t.begin() + static_cast<std::ptrdiff_t>(i + len));
            const auto pos = std::find(t.begin(), t.end(), x) - t.begin();
            t.insert(t.begin() + pos + 1, seg.begin(), seg.end());
            improved = any = true;
          }
        }
      }
    }
    return any;
  }

  void optimize(std::vector<int>& t) const {
    while (true) {
      const bool a = two_opt(t);
      const bool b = or_opt(t);
      if (!a && !b) break;
    }
  }

 private:
  const CostMatrix& m_;
};

}  // namespace detail

/// Nearest-neighbor construction from destination 0, then 2-opt and or-opt
/// to a joint local optimum, then seeded double-bridge restarts keeping the
/// best. Assumes a symmetric matrix. Returns nullopt on unreachable entries.
inline std::optional<Tour> solve_heuristic(const CostMatrix& m, std::uint64_t seed, const HeuristicOptions& opt = {}) {
  const std::size_t n = m.size();
  if (n == 0) throw std::invalid_argument("solve_heuristic: empty cost matrix");
  if (!m.all_finite()) return std::nullopt;
  if (n <= 3) {
    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    const double cost = tour_cost(order, m);
    return Tour{std::move(order), cost};
  }

  std::vector<int> t{0};
  std::vector<char> used(n, 0);
  used[0] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    const auto cur = static_cast<std::size_t>(t.back());
    int best = -1;
    for (std::size_t j = 0; j < n; ++j)
      if (!used[j] && (best < 0 || m.value(cur, j) < m.value(cur, static_cast<std::size_t>(best))))
        best = static_cast<int>(j);
    used[static_cast<std::size_t>(best)] = 1;
    t.push_back(best);
  }

  const detail::LocalSearch ls(m);
  ls.optimize(t);
  double best_cost = tour_cost(t, m);

  if (n >= 8) {
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> cut(1, n - 1);
    for (int kick = 0; kick < opt.kicks; ++kick) {
      std::size_t p[3];
      do {
        for (auto& v : p) v = cut(rng);
        std::sort(std::begin(p), std::end(p));
      } while (p[0] == p[1] || p[1] == p[2]);
      std::vector<int> cand(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(p[0]));
      cand.insert(cand.end(), t.begin() + static_cast<std::ptrdiff_t>(p[1]), t.begin() + static_cast<std::ptrdiff_t>(p[2]));
      cand.insert(cand.end(), t.begin() + static_cast<std::ptrdiff_t>(p[0]), t.begin() + static_cast<std::ptrdiff_t>(p[1]));
      cand.insert(cand.end(), t.begin() + static_cast<std::ptrdiff_t>(p[2]), t.end());
      ls.optimize(cand);
      const double cost = tour_cost(cand, m);
      if (cost < best_cost) {
        best_cost = cost;
        t = std::move(cand);
      }
    }
  }
  Tour tour{std::move(t), best_cost};
  detail::canonical_orientation(tour, m);
  return tour;
}

/// Exact below the capacity limit, heuristic above it.
inline std::optional<Tour> solve_tour(const CostMatrix& m, std::uint64_t seed) {
  if (m.size() <= kMaxExactDestinations) return solve_exact(m);
  return solve_heuristic(m, seed);
}

/// Concatenates witness paths in tour order back to the first destination;
/// shared junction nodes appear once.
inline std::vector<Vec2> stitch_tour(const Tour& tour, const CostMatrix& m, const Roadmap& rm) {
  std::vector<Vec2> path;
  const std::size_t n = tour.order.size();
  if (n == 0) return path;
  for (std::size_t k = 0; k < n; ++k) {
    const auto a = static_cast<std::size_t>(tour.order[k]);
    const auto b = static_cast<std::size_t>(tour.order[(k + 1) % n]);
    const auto& leg = m.witness(a, b);
    if (leg.empty())
      throw std::logic_error("stitch_tour: missing witness path between destinations " + std::to_string(a) + " and " +
                             std::to_string(b));
    for (std::size_t s = (path.empty() ? 0 : 1); s < leg.size(); ++s) path.push_back(rm.node(leg[s]));
  }
  return path;
}

}  // namespace tsppp

#pragma once

// Occupancy grids over the square state space [-1,1]^2: coordinate mapping,
// segment validity, exact distance transforms, boundary extraction and
// gradients of bilinearly interpolated fields.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iterator>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace tsppp {

/// Largest distance achievable inside [-1,1]^2; also the empty-seed sentinel.
inline constexpr double kDiagonal = 2.0 * std::numbers::sqrt2;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline constexpr double squared_distance(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Sum of consecutive Euclidean distances; 0 for fewer than two points.
template <typename Range>
double path_length(const Range& points) {
  double total = 0.0;
  auto it = std::begin(points);
  const auto end = std::end(points);
  if (it == end) return 0.0;
  for (auto next = std::next(it); next != end; ++it, ++next) total += distance(*it, *next);
  return total;
}

inline constexpr Vec2 clamp_to_domain(Vec2 p) {
  return {std::clamp(p.x, -1.0, 1.0), std::clamp(p.y, -1.0, 1.0)};
}
inline constexpr bool in_domain(Vec2 p) {
  return p.x >= -1.0 && p.x <= 1.0 && p.y >= -1.0 && p.y <= 1.0;
}

struct GridIndex {
  int row = 0;
  int col = 0;
  friend constexpr bool operator==(GridIndex, GridIndex) = default;
};

/// Row-major boolean occupancy grid; `true` marks an obstacle cell.
/// Columns span x in [-1,1], rows span y in [-1,1].
class GridMap {
 public:
  GridMap() : GridMap(1, 1) {}
  GridMap(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw std::invalid_argument("GridMap: width and height must be >= 1");
    cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return cells_.size(); }

  bool contains(int row, int col) const { return row >= 0 && row < height_ && col >= 0 && col < width_; }
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
  }
  GridIndex cell(std::size_t flat) const {
    return {static_cast<int>(flat / static_cast<std::size_t>(width_)), static_cast<int>(flat % static_cast<std::size_t>(width_))};
  }

  bool obstacle(int row, int col) const { return cells_[index(row, col)] != 0; }
  bool obstacle(GridIndex g) const { return obstacle(g.row, g.col); }
  bool free(int row, int col) const { return !obstacle(row, col); }
  void set_obstacle(int row, int col, bool value = true) { cells_[index(row, col)] = value ? 1 : 0; }

  std::size_t obstacle_count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
  }
  double free_fraction() const {
    return 1.0 - static_cast<double>(obstacle_count()) / static_cast<double>(cells_.size());
  }

  /// Cell pitch in world units along x and y.
  double pitch_x() const { return 2.0 / width_; }
  double pitch_y() const { return 2.0 / height_; }

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> cells_;
};

/// Half-open cell lookup; coordinates on the upper boundary clamp into the last cell.
inline GridIndex world_to_grid(Vec2 p, const GridMap& g) {
  const int col = static_cast<int>(std::floor((p.x + 1.0) * 0.5 * g.width()));
  const int row = static_cast<int>(std::floor((p.y + 1.0) * 0.5 * g.height()));
  return {std::clamp(row, 0, g.height() - 1), std::clamp(col, 0, g.width() - 1)};
}

inline Vec2 grid_to_world(GridIndex c, const GridMap& g) {
  return {-1.0 + (c.col + 0.5) * g.pitch_x(), -1.0 + (c.row + 0.5) * g.pitch_y()};
}

inline bool is_free_point(Vec2 p, const GridMap& g) { return !g.obstacle(world_to_grid(p, g)); }

namespace detail {

// Slack applied to the swept interval so that float rounding at exact
// lattice crossings can only make the check stricter.
inline constexpr double kSupercoverSlack = 1e-9;

}  // namespace detail

/// Calls `visit(row, col)` for every cell whose closed square meets the
/// closed segment pq (supercover traversal, corner contacts included).
/// Stops early and returns false as soon as `visit` returns false.
template <typename Visitor>
bool for_each_supercover_cell(Vec2 p, Vec2 q, const GridMap& g, Visitor&& visit) {
  // Continuous grid coordinates: cell (r, c) occupies [c, c+1] x [r, r+1].
  const double u0 = (p.x + 1.0) * 0.5 * g.width();
  const double v0 = (p.y + 1.0) * 0.5 * g.height();
  const double u1 = (q.x + 1.0) * 0.5 * g.width();
  const double v1 = (q.y + 1.0) * 0.5 * g.height();
  constexpr double eps = detail::kSupercoverSlack;

  const auto rows_touching = [&](double lo, double hi, int col) {
    const int r_lo = std::max(0, static_cast<int>(std::ceil(lo - eps)) - 1);
    const int r_hi = std::min(g.height() - 1, static_cast<int>(std::floor(hi + eps)));
    for (int r = r_lo; r <= r_hi; ++r)
      if (!visit(r, col)) return false;
    return true;
  };

  const double umin = std::min(u0, u1);
  const double umax = std::max(u0, u1);
  const int c_lo = std::max(0, static_cast<int>(std::ceil(umin - eps)) - 1);
  const int c_hi = std::min(g.width() - 1, static_cast<int>(std::floor(umax + eps)));

  if (u0 == u1) {
    for (int c = c_lo; c <= c_hi; ++c)
      if (!rows_touching(std::min(v0, v1), std::max(v0, v1), c)) return false;
    return true;
  }

  const double slope = (v1 - v0) / (u1 - u0);
  for (int c = c_lo; c <= c_hi; ++c) {
    const double a = std::max(umin, static_cast<double>(c) - eps);
    const double b = std::min(umax, static_cast<double>(c + 1) + eps);
    if (a > b) continue;
    const double va = v0 + (a - u0) * slope;
    const double vb = v0 + (b - u0) * slope;
    if (!rows_touching(std::min(va, vb), std::max(va, vb), c)) return false;
  }
  return true;
}

/// True iff every grid cell touched by the closed segment pq is free.
inline bool is_valid_segment(Vec2 p, Vec2 q, const GridMap& g) {
  return for_each_supercover_cell(p, q, g, [&](int r, int c) { return g.free(r, c); });
}

/// Per-cell scalar field in world-length units, sampled at cell centers.
struct DistanceField {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)];
  }
};

namespace detail {

inline constexpr std::int64_t kEdtInfinity = std::int64_t{1} << 60;

// One-dimensional lower envelope of w*(x-i)^2 + f(i) over integer sites
// (Meijster et al.); exact in integer arithmetic.
inline void edt_1d(const std::vector<std::int64_t>& f, std::int64_t w, std::vector<std::int64_t>& out,
                   std::vector<int>& sites, std::vector<std::int64_t>& starts) {
  const int n = static_cast<int>(f.size());
  out.assign(static_cast<std::size_t>(n), kEdtInfinity);
  sites.assign(static_cast<std::size_t>(n), 0);
  starts.assign(static_cast<std::size_t>(n), 0);

  const auto eval = [&](std::int64_t x, int i) {
    if (f[static_cast<std::size_t>(i)] >= kEdtInfinity) return kEdtInfinity;
    const std::int64_t d = x - i;
    return w * d * d + f[static_cast<std::size_t>(i)];
  };
  // First x at which site u is at least as good as site i (i < u).
  const auto separation = [&](int i, int u) -> std::int64_t {
    const std::int64_t num = w * (static_cast<std::int64_t>(u) * u - static_cast<std::int64_t>(i) * i) +
                             f[static_cast<std::size_t>(u)] - f[static_cast<std::size_t>(i)];
    const std::int64_t den = 2 * w * (u - i);
    // floor division for possibly negative numerators
    std::int64_t q = num / den;
    if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
    return q;
  };

  int q = -1;
  for (int u = 0; u < n; ++u) {
    if (f[static_cast<std::size_t>(u)] >= kEdtInfinity) continue;
    while (q >= 0 && eval(starts[static_cast<std::size_t>(q)], sites[static_cast<std::size_t>(q)]) >
                         eval(starts[static_cast<std::size_t>(q)], u))
      --q;
    if (q < 0) {
      q = 0;
      sites[0] = u;
      starts[0] = 0;
    } else {
      const std::int64_t start = 1 + separation(sites[static_cast<std::size_t>(q)], u);
      if (start < n) {
        ++q;
        sites[static_cast<std::size_t>(q)] = u;
        starts[static_cast<std::size_t>(q)] = std::max<std::int64_t>(start, 0);
      }
    }
  }
  if (q < 0) return;
  for (int x = n - 1; x >= 0; --x) {
    out[static_cast<std::size_t>(x)] = eval(x, sites[static_cast<std::size_t>(q)]);
    if (x == starts[static_cast<std::size_t>(q)]) --q;
  }
}

}  // namespace detail

/// Exact squared distance from each cell center to the nearest seed center,
/// in the integer unit (dcol*H)^2 + (drow*W)^2. Cells with no seed anywhere
/// get kEdtInfinity.
inline std::vector<std::int64_t> squared_distance_transform(int width, int height,
                                                            const std::vector<bool>& seed) {
  const std::int64_t wx = static_cast<std::int64_t>(height) * height;
  const std::int64_t wy = static_cast<std::int64_t>(width) * width;
  std::vector<std::int64_t> grid(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  std::vector<std::int64_t> column(static_cast<std::size_t>(height)), line(static_cast<std::size_t>(width)), out;
  std::vector<int> sites;
  std::vector<std::int64_t> starts;

  for (int c = 0; c < width; ++c) {
    for (int r = 0; r < height; ++r)
      column[static_cast<std::size_t>(r)] =
          seed[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c)]
              ? 0
              : detail::kEdtInfinity;
    detail::edt_1d(column, wy, out, sites, starts);
    for (int r = 0; r < height; ++r)
      grid[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c)] =
          out[static_cast<std::size_t>(r)];
  }
  for (int r = 0; r < height; ++r) {
    const std::size_t base = static_cast<std::size_t>(r) * static_cast<std::size_t>(width);
    std::copy_n(grid.begin() + static_cast<std::ptrdiff_t>(base), width, line.begin());
    detail::edt_1d(line, wx, out, sites, starts);
    std::copy_n(out.begin(), width, grid.begin() + static_cast<std::ptrdiff_t>(base));
  }
  return grid;
}

/// Converts a squared distance in the integer unit of
/// squared_distance_transform into world length.
inline double world_length_from_squared(std::int64_t d2, int width, int height) {
  return std::sqrt(static_cast<double>(d2)) * 2.0 / (static_cast<double>(width) * static_cast<double>(height));
}

/// Exact Euclidean distance (world units) from every cell center to the
/// nearest seed cell center. Without seeds every value is kDiagonal.
template <typename SeedPredicate>
  requires std::predicate<SeedPredicate, int, int>
DistanceField distance_transform(const GridMap& g, SeedPredicate&& is_seed) {
  std::vector<bool> seed(g.size());
  bool any = false;
  for (int r = 0; r < g.height(); ++r)
    for (int c = 0; c < g.width(); ++c)
      if (is_seed(r, c)) {
        seed[g.index(r, c)] = true;
        any = true;
      }

  DistanceField field{g.width(), g.height(), std::vector<double>(g.size(), kDiagonal)};
  if (!any) return field;
  const auto d2 = squared_distance_transform(g.width(), g.height(), seed);
  for (std::size_t i = 0; i < d2.size(); ++i) field.values[i] = world_length_from_squared(d2[i], g.width(), g.height());
  return field;
}

inline DistanceField obstacle_distance(const GridMap& g) {
  return distance_transform(g, [&](int r, int c) { return g.obstacle(r, c); });
}

/// Centers of free cells with at least one obstacle among their 8 neighbors,
/// in row-major order.
inline std::vector<Vec2> boundary_nodes(const GridMap& g) {
  std::vector<Vec2> nodes;
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) {
      if (g.obstacle(r, c)) continue;
      bool touches = false;
      for (int dr = -1; dr <= 1 && !touches; ++dr)
        for (int dc = -1; dc <= 1 && !touches; ++dc)
          if ((dr != 0 || dc != 0) && g.contains(r + dr, c + dc) && g.obstacle(r + dr, c + dc)) touches = true;
      if (touches) nodes.push_back(grid_to_world({r, c}, g));
    }
  }
  return nodes;
}

/// Value of the bilinear interpolant through cell-center samples, with
/// clamped replication outside the center lattice.
inline double field_value(const DistanceField& f, Vec2 p) {
  const double a = (p.x + 1.0) * 0.5 * f.width - 0.5;
  const double b = (p.y + 1.0) * 0.5 * f.height - 0.5;
  const auto sample = [&](int r, int c) {
    return f.at(std::clamp(r, 0, f.height - 1), std::clamp(c, 0, f.width - 1));
  };
  const double ca = std::clamp(a, 0.0, static_cast<double>(f.width - 1));
  const double cb = std::clamp(b, 0.0, static_cast<double>(f.height - 1));
  const int c0 = static_cast<int>(std::floor(ca));
  const int r0 = static_cast<int>(std::floor(cb));
  const double ta = ca - c0;
  const double tb = cb - r0;
  const double bottom = (1.0 - ta) * sample(r0, c0) + ta * sample(r0, c0 + 1);
  const double top = (1.0 - ta) * sample(r0 + 1, c0) + ta * sample(r0 + 1, c0 + 1);
  return (1.0 - tb) * bottom + tb * top;
}

/// Gradient (per world unit) of the bilinear interpolant of `f` at p.
/// On lattice lines, where the interpolant has a kink, the two one-sided
/// slopes are averaged; at cell centers this is the central difference of
/// the neighboring cells.
inline Vec2 field_gradient(const DistanceField& f, Vec2 p) {
  const auto sample = [&](int r, int c) {
    return f.at(std::clamp(r, 0, f.height - 1), std::clamp(c, 0, f.width - 1));
  };
  // Slope per lattice step along one axis inside the piece starting at lo,
  // interpolated linearly along the other axis.
  const auto piece_slope_x = [&](int c_lo, double b) {
    const double cb = std::clamp(b, 0.0, static_cast<double>(f.height - 1));
    const int r0 = static_cast<int>(std::floor(cb));
    const double tb = cb - r0;
    const double s0 = sample(r0, c_lo + 1) - sample(r0, c_lo);
    const double s1 = sample(r0 + 1, c_lo + 1) - sample(r0 + 1, c_lo);
    return (1.0 - tb) * s0 + tb * s1;
  };
  const auto piece_slope_y = [&](int r_lo, double a) {
    const double ca = std::clamp(a, 0.0, static_cast<double>(f.width - 1));
    const int c0 = static_cast<int>(std::floor(ca));
    const double ta = ca - c0;
    const double s0 = sample(r_lo + 1, c0) - sample(r_lo, c0);
    const double s1 = sample(r_lo + 1, c0 + 1) - sample(r_lo, c0 + 1);
    return (1.0 - ta) * s0 + ta * s1;
  };
  // Derivative along an axis of extent n at continuous lattice coordinate t.
  const auto axis_derivative = [](double t, int n, auto&& slope_from) {
    if (n == 1 || t < 0.0 || t > static_cast<double>(n - 1)) return 0.0;
    const double fl = std::floor(t);
    const int lo = static_cast<int>(fl);
    if (t == fl) {
      const double left = lo > 0 ? slope_from(lo - 1) : 0.0;
      const double right = lo < n - 1 ? slope_from(lo) : 0.0;
      return 0.5 * (left + right);
    }
    return slope_from(lo);
  };

  const double a = (p.x + 1.0) * 0.5 * f.width - 0.5;
  const double b = (p.y + 1.0) * 0.5 * f.height - 0.5;
  const double da = axis_derivative(a, f.width, [&](int lo) { return piece_slope_x(lo, b); });
  const double db = axis_derivative(b, f.height, [&](int lo) { return piece_slope_y(lo, a); });
  return {da * 0.5 * f.width, db * 0.5 * f.height};
}

}  // namespace tsppp

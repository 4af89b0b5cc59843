#pragma once

// DDPM machinery over 2-D position sequences: noise schedules, forward
// perturbation, the reverse kernel and its reward-guided variant, noise
// estimators, and the loop-path sampler.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tsppp/environments.hpp"
#include "tsppp/geometry.hpp"
#include "tsppp/random.hpp"
#include "tsppp/tsp.hpp"

namespace tsppp {

/// Fixed-horizon sequence of positions p_1..p_T. Not constrained to the
/// domain while noisy.
struct PathSample {
  std::vector<Vec2> points;

  std::size_t size() const { return points.size(); }
  friend bool operator==(const PathSample&, const PathSample&) = default;
};

inline constexpr std::size_t kDefaultHorizon = 256;

enum class ScheduleKind { linear, cosine };

/// beta, alpha = 1 - beta, alpha_bar = prod alpha, and the per-step
/// posterior variance. Steps are indexed 1..I.
class NoiseSchedule {
 public:
  static NoiseSchedule from_betas(std::vector<double> betas) {
    if (betas.empty()) throw std::invalid_argument("NoiseSchedule: at least one step is required");
    NoiseSchedule s;
    double running = 1.0;
    for (double b : betas) {
      if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("NoiseSchedule: beta must lie in (0, 1)");
      const double a = 1.0 - b;
      const double prev = running;
      running *= a;
      s.beta_.push_back(b);
      s.alpha_.push_back(a);
      s.alpha_bar_.push_back(running);
      // beta_tilde = (1 - alpha_bar_{i-1}) / (1 - alpha_bar_i) * beta_i; zero at i = 1.
      s.posterior_var_.push_back(s.beta_.size() == 1 ? 0.0 : (1.0 - prev) / (1.0 - running) * b);
    }
    return s;
  }

  static NoiseSchedule linear(int steps, double beta_start = 1e-4, double beta_end = 0.02) {
    if (steps < 1) throw std::invalid_argument("NoiseSchedule: steps must be >= 1");
    std::vector<double> betas(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
      betas[static_cast<std::size_t>(i)] =
          steps == 1 ? beta_start : beta_start + (beta_end - beta_start) * i / static_cast<double>(steps - 1);
    return from_betas(std::move(betas));
  }

  /// Squared-cosine alpha_bar profile; betas from consecutive ratios,
  /// clipped to at most 0.999.
  static NoiseSchedule cosine(int steps, double offset = 0.008) {
    if (steps < 1) throw std::invalid_argument("NoiseSchedule: steps must be >= 1");
    const auto f = [&](double t) {
      const double c = std::cos((t / steps + offset) / (1.0 + offset) * std::numbers::pi / 2.0);
      return c * c;
    };
    std::vector<double> betas(static_cast<std::size_t>(steps));
    for (int i = 1; i <= steps; ++i)
      betas[static_cast<std::size_t>(i - 1)] = std::min(1.0 - f(i) / f(i - 1), 0.999);
    return from_betas(std::move(betas));
  }

  static NoiseSchedule make(int steps, ScheduleKind kind) {
    return kind == ScheduleKind::linear ? linear(steps) : cosine(steps);
  }

  int steps() const { return static_cast<int>(beta_.size()); }
  double beta(int i) const { return beta_.at(static_cast<std::size_t>(i - 1)); }
  double alpha(int i) const { return alpha_.at(static_cast<std::size_t>(i - 1)); }
  double alpha_bar(int i) const { return i == 0 ? 1.0 : alpha_bar_.at(static_cast<std::size_t>(i - 1)); }
  double posterior_var(int i) const { return posterior_var_.at(static_cast<std::size_t>(i - 1)); }

 private:
  std::vector<double> beta_, alpha_, alpha_bar_, posterior_var_;
};

inline ScheduleKind parse_schedule_kind(std::string_view name) {
  if (name == "linear") return ScheduleKind::linear;
  if (name == "cosine") return ScheduleKind::cosine;
  throw std::invalid_argument("unknown schedule kind: " + std::string(name));
}

namespace detail {

inline void check_step(int i, const NoiseSchedule& s) {
  if (i < 1 || i > s.steps())
    throw std::out_of_range("diffusion step " + std::to_string(i) + " outside 1.." + std::to_string(s.steps()));
}
inline void check_shapes(const PathSample& a, const PathSample& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("path shape mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
}

}  // namespace detail

/// tau_i = sqrt(alpha_bar_i) * tau_0 + sqrt(1 - alpha_bar_i) * eps.
inline PathSample forward_perturb(const PathSample& tau0, int i, const PathSample& eps, const NoiseSchedule& s) {
  detail::check_step(i, s);
  detail::check_shapes(tau0, eps);
  const double a = std::sqrt(s.alpha_bar(i));
  const double b = std::sqrt(1.0 - s.alpha_bar(i));
  PathSample out{std::vector<Vec2>(tau0.size())};
  for (std::size_t t = 0; t < tau0.size(); ++t) out.points[t] = a * tau0.points[t] + b * eps.points[t];
  return out;
}

/// Reverse-kernel mean (tau_i - beta_i / sqrt(1 - alpha_bar_i) * eps_hat) / sqrt(alpha_i).
inline PathSample posterior_mean(const PathSample& tau, int i, const PathSample& eps_hat, const NoiseSchedule& s) {
  detail::check_step(i, s);
  detail::check_shapes(tau, eps_hat);
  const double one_minus_bar = 1.0 - s.alpha_bar(i);
  if (!(one_minus_bar > 0.0)) throw std::domain_error("posterior_mean: alpha_bar must be < 1");
  const double k = s.beta(i) / std::sqrt(one_minus_bar);
  const double root_alpha = std::sqrt(s.alpha(i));
  PathSample mu{std::vector<Vec2>(tau.size())};
  for (std::size_t t = 0; t < tau.size(); ++t) {
    mu.points[t].x = (tau.points[t].x - k * eps_hat.points[t].x) / root_alpha;
    mu.points[t].y = (tau.points[t].y - k * eps_hat.points[t].y) / root_alpha;
  }
  return mu;
}

/// Reward J(p) = w_obs * d_obs(p) - w_dst * d_dst(p) stored as one field on
/// the grid; its gradient steers samples off obstacles and toward destinations.
struct RewardField {
  DistanceField field;
  double w_obs = 1.0;
  double w_dst = 1.0;

  double value(Vec2 p) const { return field_value(field, clamp_to_domain(p)); }
  /// Bilinear gradient, evaluated at the domain-clamped position.
  Vec2 gradient(Vec2 p) const { return field_gradient(field, clamp_to_domain(p)); }
};

inline RewardField make_reward_field(const Instance& inst, double w_obs = 1.0, double w_dst = 1.0) {
  const GridMap& g = inst.grid;
  const DistanceField d_obs = obstacle_distance(g);
  std::vector<char> is_dst(g.size(), 0);
  for (const Vec2& d : inst.destinations) {
    const GridIndex c = world_to_grid(d, g);
    is_dst[g.index(c.row, c.col)] = 1;
  }
  const DistanceField d_dst = distance_transform(g, [&](int r, int c) { return is_dst[g.index(r, c)] != 0; });
  RewardField reward{DistanceField{g.width(), g.height(), std::vector<double>(g.size())}, w_obs, w_dst};
  for (std::size_t i = 0; i < g.size(); ++i) reward.field.values[i] = w_obs * d_obs.values[i] - w_dst * d_dst.values[i];
  return reward;
}

/// Per-chain state an estimator prepares before the first denoising step.
struct ChainContext {
  std::vector<Vec2> reference;
};

/// Interface of the noise predictor eps_hat(tau_i, i). Implementations are
/// immutable after construction and safe to share across chains.
class NoiseEstimator {
 public:
  virtual ~NoiseEstimator() = default;
  virtual ChainContext prepare_chain(std::uint64_t /*chain_seed*/, std::size_t /*horizon*/) const { return {}; }
  virtual PathSample estimate(const PathSample& tau, int i, const NoiseSchedule& s, const ChainContext& chain) const = 0;
};

/// Always predicts zero noise.
class ZeroEstimator final : public NoiseEstimator {
 public:
  PathSample estimate(const PathSample& tau, int, const NoiseSchedule&, const ChainContext&) const override {
    return PathSample{std::vector<Vec2>(tau.size())};
  }
};

/// Bayes-optimal predictor when every coordinate of tau_0 is i.i.d.
/// N(mean, stddev^2).
class AnalyticGaussianEstimator final : public NoiseEstimator {
 public:
  AnalyticGaussianEstimator(double mean, double stddev) : mean_(mean), var_(stddev * stddev) {}

  double mean() const { return mean_; }
  double variance() const { return var_; }

  PathSample estimate(const PathSample& tau, int i, const NoiseSchedule& s, const ChainContext&) const override {
    detail::check_step(i, s);
    const double ab = s.alpha_bar(i);
    const double denom = ab * var_ + 1.0 - ab;
    if (!(denom > 0.0)) throw std::domain_error("AnalyticGaussianEstimator: degenerate marginal variance");
    const double scale = std::sqrt(1.0 - ab) / denom;
    const double shift = std::sqrt(ab) * mean_;
    PathSample out{std::vector<Vec2>(tau.size())};
    for (std::size_t t = 0; t < tau.size(); ++t)
      out.points[t] = {scale * (tau.points[t].x - shift), scale * (tau.points[t].y - shift)};
    return out;
  }

  /// Score of the noised marginal N(sqrt(ab) * mean, ab * var + 1 - ab), one coordinate.
  double score(double x, int i, const NoiseSchedule& s) const {
    const double ab = s.alpha_bar(i);
    return -(x - std::sqrt(ab) * mean_) / (ab * var_ + 1.0 - ab);
  }

 private:
  double mean_;
  double var_;
};

struct HeuristicTourOptions {
  /// Standard deviation of the per-chain jitter applied to tour vertices.
  double jitter = 0.05;
  /// Maximum spacing (world units) of intermediate vertices along a leg.
  double vertex_spacing = 0.2;
  /// Target clearance, in cells, when pushing points off obstacles.
  double clearance_cells = 1.0;
  int push_iterations = 40;
};

/// Stand-in for a trained predictor: denoises toward a reference loop built
/// from a straight-line tour over the destinations. Each chain jitters the
/// tour vertices with its own seed, resamples the loop to the horizon and
/// pushes points off obstacles along the clearance-field gradient.
class HeuristicTourEstimator final : public NoiseEstimator {
 public:
  HeuristicTourEstimator(const Instance& inst, std::uint64_t seed, HeuristicTourOptions opt = {})
      : grid_(inst.grid), destinations_(inst.destinations), opt_(opt) {
    const std::size_t n = destinations_.size();
    if (n == 0) throw std::invalid_argument("HeuristicTourEstimator: no destinations");
    std::vector<std::vector<double>> straight(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) straight[i][j] = distance(destinations_[i], destinations_[j]);
    order_ = solve_tour(CostMatrix::from_values(straight), seed)->order;

    // Signed clearance: distance to obstacles outside them, minus the
    // distance to free space inside them.
    const DistanceField d_obs = obstacle_distance(grid_);
    const DistanceField d_free = distance_transform(grid_, [&](int r, int c) { return grid_.free(r, c); });
    clearance_ = DistanceField{grid_.width(), grid_.height(), std::vector<double>(grid_.size())};
    for (std::size_t i = 0; i < grid_.size(); ++i) clearance_.values[i] = d_obs.values[i] - d_free.values[i];
  }

  const std::vector<int>& tour_order() const { return order_; }

  ChainContext prepare_chain(std::uint64_t chain_seed, std::size_t horizon) const override {
    return {reference_loop(chain_seed, horizon)};
  }

  PathSample estimate(const PathSample& tau, int i, const NoiseSchedule& s, const ChainContext& chain) const override {
    detail::check_step(i, s);
    if (chain.reference.size() != tau.size())
      throw std::invalid_argument("HeuristicTourEstimator: chain reference does not match path horizon");
    const double ab = s.alpha_bar(i);
    const double root_ab = std::sqrt(ab);
    const double root_one_minus = std::sqrt(1.0 - ab);
    PathSample out{std::vector<Vec2>(tau.size())};
    for (std::size_t t = 0; t < tau.size(); ++t) {
      out.points[t].x = (tau.points[t].x - root_ab * chain.reference[t].x) / root_one_minus;
      out.points[t].y = (tau.points[t].y - root_ab * chain.reference[t].y) / root_one_minus;
    }
    return out;
  }

  std::vector<Vec2> reference_loop(std::uint64_t chain_seed, std::size_t horizon) const {
    Rng rng(chain_seed);
    std::normal_distribution<double> jitter(0.0, opt_.jitter);

    std::vector<Vec2> vertices;
    const std::size_t n = order_.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Vec2 a = destinations_[static_cast<std::size_t>(order_[k])];
      const Vec2 b = destinations_[static_cast<std::size_t>(order_[(k + 1) % n])];
      const int pieces = std::max(1, static_cast<int>(std::ceil(distance(a, b) / opt_.vertex_spacing)));
      for (int s = 0; s < pieces; ++s) {
        const double u = static_cast<double>(s) / pieces;
        const Vec2 base = a + u * (b - a);
        const double jx = jitter(rng);
        const double jy = jitter(rng);
        vertices.push_back(clamp_to_domain({base.x + jx, base.y + jy}));
      }
    }

    std::vector<Vec2> loop = resample_closed(vertices, horizon);
    for (Vec2& p : loop) p = clamp_to_domain(push_off_obstacles(p));
    return loop;
  }

 private:
  // `count` points at equal arc-length spacing around the closed polygon,
  // starting at its first vertex.
  static std::vector<Vec2> resample_closed(const std::vector<Vec2>& poly, std::size_t count) {
    std::vector<Vec2> out;
    out.reserve(count);
    const std::size_t n = poly.size();
    std::vector<double> cumulative(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) cumulative[k + 1] = cumulative[k] + distance(poly[k], poly[(k + 1) % n]);
    const double total = cumulative[n];
    if (total == 0.0) return std::vector<Vec2>(count, poly.front());
    std::size_t seg = 0;
    for (std::size_t t = 0; t < count; ++t) {
      const double target = total * static_cast<double>(t) / static_cast<double>(count);
      while (seg + 1 < n && cumulative[seg + 1] <= target) ++seg;
      const double len = cumulative[seg + 1] - cumulative[seg];
      const double u = len > 0.0 ? (target - cumulative[seg]) / len : 0.0;
      out.push_back(poly[seg] + u * (poly[(seg + 1) % n] - poly[seg]));
    }
    return out;
  }

  Vec2 push_off_obstacles(Vec2 p) const {
    const double pitch = std::min(grid_.pitch_x(), grid_.pitch_y());
    const double target = opt_.clearance_cells * pitch;
    for (int it = 0; it < opt_.push_iterations; ++it) {
      const double v = field_value(clearance_, clamp_to_domain(p));
      if (v >= target && is_free_point(p, grid_)) break;
      const Vec2 g = field_gradient(clearance_, clamp_to_domain(p));
      const double len = norm(g);
      if (len < 1e-12) break;
      const double step = std::max(target - v, 0.25 * pitch);
      p = clamp_to_domain(p + (step / len) * g);
    }
    return p;
  }

  GridMap grid_;
  std::vector<Vec2> destinations_;
  HeuristicTourOptions opt_;
  std::vector<int> order_;
  DistanceField clearance_;
};

namespace detail {

inline void add_gaussian_noise(PathSample& mean, double variance, Rng& rng) {
  if (variance <= 0.0) return;
  std::normal_distribution<double> z(0.0, 1.0);
  const double sd = std::sqrt(variance);
  for (Vec2& p : mean.points) {
    p.x += sd * z(rng);
    p.y += sd * z(rng);
  }
}

}  // namespace detail

/// One reverse step: tau_{i-1} = mu + sqrt(Sigma_i) z; deterministic at i = 1.
inline PathSample denoise_step(const PathSample& tau, int i, const NoiseEstimator& estimator, const NoiseSchedule& s,
                               Rng& rng, const ChainContext& chain = {}) {
  PathSample out = posterior_mean(tau, i, estimator.estimate(tau, i, s, chain), s);
  detail::add_gaussian_noise(out, s.posterior_var(i), rng);
  return out;
}

/// mu + alpha_scale * Sigma_i * grad J(mu), the mean of the guided kernel.
inline PathSample guided_mean(const PathSample& mu, int i, const RewardField& reward, double alpha_scale,
                              const NoiseSchedule& s) {
  const double k = alpha_scale * s.posterior_var(i);
  PathSample out = mu;
  for (Vec2& p : out.points) {
    const Vec2 g = reward.gradient(p);
    p.x += k * g.x;
    p.y += k * g.y;
  }
  return out;
}

/// Reward-guided reverse step: the kernel mean is shifted by
/// alpha_scale * Sigma_i * grad J(mu) before noise is added.
inline PathSample guided_denoise_step(const PathSample& tau, int i, const NoiseEstimator& estimator,
                                      const RewardField& reward, double alpha_scale, const NoiseSchedule& s, Rng& rng,
                                      const ChainContext& chain = {}) {
  if (alpha_scale < 0.0) throw std::invalid_argument("guided_denoise_step: alpha_scale must be >= 0");
  const PathSample mu = posterior_mean(tau, i, estimator.estimate(tau, i, s, chain), s);
  PathSample out = guided_mean(mu, i, reward, alpha_scale, s);
  detail::add_gaussian_noise(out, s.posterior_var(i), rng);
  return out;
}

struct SamplingOptions {
  std::size_t paths = 10;
  std::size_t horizon = kDefaultHorizon;
  double alpha_scale = 1.0;
};

/// Runs `paths` independent chains from N(0, I) through steps I..1 and
/// clamps the final positions to the domain. Guidance is skipped when
/// `reward` is null. Chain m draws from streams derived from (seed, m).
inline std::vector<PathSample> sample_paths(const NoiseEstimator& estimator, const NoiseSchedule& s,
                                            const RewardField* reward, const SamplingOptions& opt,
                                            std::uint64_t seed) {
  if (opt.horizon < 2) throw std::invalid_argument("sample_paths: horizon must be >= 2");
  std::vector<PathSample> out;
  out.reserve(opt.paths);
  for (std::size_t m = 0; m < opt.paths; ++m) {
    const std::uint64_t chain_seed = derive_seed(seed, m);
    const ChainContext chain = estimator.prepare_chain(derive_seed(chain_seed, 1), opt.horizon);
    Rng rng(derive_seed(chain_seed, 2));
    std::normal_distribution<double> z(0.0, 1.0);
    PathSample tau{std::vector<Vec2>(opt.horizon)};
    for (Vec2& p : tau.points) {
      p.x = z(rng);
      p.y = z(rng);
    }
    for (int i = s.steps(); i >= 1; --i)
      tau = reward ? guided_denoise_step(tau, i, estimator, *reward, opt.alpha_scale, s, rng, chain)
                   : denoise_step(tau, i, estimator, s, rng, chain);
    for (Vec2& p : tau.points) p = clamp_to_domain(p);
    out.push_back(std::move(tau));
  }
  return out;
}

}  // namespace tsppp

#pragma once

// End-to-end solving: sample paths (diffusion methods), build a roadmap,
// compute destination costs, solve the tour and stitch the solution path.

#include <algorithm>
#include <chrono>
#include <iterator>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tsppp/diffusion.hpp"
#include "tsppp/environments.hpp"
#include "tsppp/roadmap.hpp"
#include "tsppp/search.hpp"
#include "tsppp/tsp.hpp"

namespace tsppp {

/// Roadmap from guided diffusion samples. With paths == 1 this is the
/// single-sample (Diffuser-style) baseline.
struct DiffusionMethod {
  std::size_t paths = 10;
  std::size_t k_neighbors = 5;
  int steps = 5;
  double alpha_scale = 1.0;
  std::size_t horizon = kDefaultHorizon;
  bool boundary_nodes = true;
  ScheduleKind schedule = ScheduleKind::cosine;
};

struct PrmMethod {
  std::size_t nodes = 1000;
};

struct Method {
  std::variant<DiffusionMethod, PrmMethod> params;

  static Method tspdiffuser(DiffusionMethod p = {}) { return {p}; }
  static Method diffuser(DiffusionMethod p = {}) {
    p.paths = 1;
    return {p};
  }
  static Method prm(std::size_t nodes) { return {PrmMethod{nodes}}; }

  std::string name() const {
    if (const auto* d = std::get_if<DiffusionMethod>(&params)) return d->paths == 1 ? "diffuser" : "tspdiffuser";
    return "prm";
  }

  /// Parameter string without commas, e.g. "M=10;K=5;I=5;alpha=1".
  std::string describe_params() const {
    std::ostringstream os;
    if (const auto* d = std::get_if<DiffusionMethod>(&params)) {
      os << "M=" << d->paths << ";K=" << d->k_neighbors << ";I=" << d->steps << ";alpha=" << d->alpha_scale
         << ";T=" << d->horizon << ";schedule=" << (d->schedule == ScheduleKind::linear ? "linear" : "cosine");
      if (!d->boundary_nodes) os << ";boundary=off";
    } else {
      os << "n=" << std::get<PrmMethod>(params).nodes;
    }
    return os.str();
  }
};

/// Parses "prm:1000", "diffuser", "tspdiffuser" or
/// "tspdiffuser:M=10,K=5,I=5,alpha=1,T=256,boundary=0,schedule=linear".
inline Method parse_method(std::string_view text) {
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  const std::string rest = colon == std::string_view::npos ? std::string() : std::string(text.substr(colon + 1));
  const auto bad = [&](const std::string& why) {
    return std::invalid_argument("method '" + std::string(text) + "': " + why);
  };
  if (name == "prm") {
    if (rest.empty()) return Method::prm(1000);
    std::string value = rest.starts_with("n=") ? rest.substr(2) : rest;
    try {
      std::size_t used = 0;
      const long long n = std::stoll(value, &used);
      if (used != value.size() || n < 1) throw bad("node count must be a positive integer");
      return Method::prm(static_cast<std::size_t>(n));
    } catch (const std::logic_error&) {
      throw bad("node count must be a positive integer");
    }
  }
  if (name != "tspdiffuser" && name != "diffuser") throw bad("unknown method name");
  DiffusionMethod d;
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw bad("expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    static constexpr std::string_view known[] = {"M", "K", "I", "alpha", "T", "boundary", "schedule"};
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw bad("unknown parameter '" + key + "'");
    try {
      if (key == "M") d.paths = std::stoul(value);
      else if (key == "K") d.k_neighbors = std::stoul(value);
      else if (key == "I") d.steps = std::stoi(value);
      else if (key == "alpha") d.alpha_scale = std::stod(value);
      else if (key == "T") d.horizon = std::stoul(value);
      else if (key == "boundary") d.boundary_nodes = value != "0" && value != "off" && value != "false";
      else d.schedule = parse_schedule_kind(value);
    } catch (const std::invalid_argument&) {
      throw bad("bad value for '" + key + "'");
    } catch (const std::out_of_range&) {
      throw bad("value out of range for '" + key + "'");
    }
  }
  if (d.k_neighbors < 1 || d.steps < 1 || d.horizon < 2 || d.alpha_scale < 0.0) throw bad("parameter out of range");
  if (name == "diffuser") return Method::diffuser(d);
  if (d.paths < 1) throw bad("M must be >= 1");
  return Method::tspdiffuser(d);
}

enum class FailureReason { none, unreachable_pair, degenerate_map };

inline std::string_view to_string(FailureReason r) {
  switch (r) {
    case FailureReason::none: return "none";
    case FailureReason::unreachable_pair: return "unreachable_pair";
    case FailureReason::degenerate_map: return "degenerate_map";
  }
  return "unknown";
}

/// Wall-clock seconds per phase.
struct PhaseTimings {
  double sampling = 0.0;
  double roadmap = 0.0;
  double search = 0.0;
  double tsp = 0.0;

  double total() const { return sampling + roadmap + search + tsp; }
};

struct Solution {
  bool success = false;
  FailureReason reason = FailureReason::none;
  std::vector<Vec2> path;
  double length = 0.0;
  std::size_t roadmap_nodes = 0;
  std::size_t roadmap_edges = 0;
  PhaseTimings timings;
};

namespace detail {

class PhaseClock {
 public:
  PhaseClock() : start_(std::chrono::steady_clock::now()) {}
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Samples the roadmap input of a diffusion method for `inst`.
inline std::vector<PathSample> sample_method_paths(const Instance& inst, const DiffusionMethod& d, std::uint64_t seed) {
  const HeuristicTourEstimator estimator(inst, derive_seed(seed, 11));
  const RewardField reward = make_reward_field(inst);
  const NoiseSchedule schedule = NoiseSchedule::make(d.steps, d.schedule);
  return sample_paths(estimator, schedule, &reward, {d.paths, d.horizon, d.alpha_scale}, derive_seed(seed, 12));
}

/// Builds the method's roadmap (used by solve_tsppp and the benchmarks).
inline Roadmap build_method_roadmap(const Instance& inst, const Method& method, std::uint64_t seed,
                                    PhaseTimings* timings = nullptr) {
  detail::PhaseClock clock;
  if (const auto* d = std::get_if<DiffusionMethod>(&method.params)) {
    const auto paths = sample_method_paths(inst, *d, seed);
    if (timings) timings->sampling = clock.lap();
    Roadmap rm = build_from_paths(paths, inst.destinations, inst.grid, {d->k_neighbors, d->boundary_nodes, true});
    if (timings) timings->roadmap = clock.lap();
    return rm;
  }
  Roadmap rm = build_prm(inst.grid, std::get<PrmMethod>(method.params).nodes, inst.destinations, derive_seed(seed, 13));
  if (timings) timings->roadmap = clock.lap();
  return rm;
}

/// Solves one instance. Failures are reported through `reason`, never thrown.
inline Solution solve_tsppp(const Instance& inst, const Method& method, std::uint64_t seed) {
  Solution sol;
  Roadmap rm;
  try {
    rm = build_method_roadmap(inst, method, seed, &sol.timings);
  } catch (const DegenerateMapError&) {
    sol.reason = FailureReason::degenerate_map;
    return sol;
  }
  sol.roadmap_nodes = rm.node_count();
  sol.roadmap_edges = rm.edge_count();

  detail::PhaseClock clock;
  const CostMatrix costs = destination_cost_matrix(rm);
  sol.timings.search = clock.lap();
  if (!costs.all_finite()) {
    sol.reason = FailureReason::unreachable_pair;
    return sol;
  }
  const std::optional<Tour> tour = solve_tour(costs, derive_seed(seed, 14));
  if (!tour) {
    sol.timings.tsp = clock.lap();
    sol.reason = FailureReason::unreachable_pair;
    return sol;
  }
  sol.path = stitch_tour(*tour, costs, rm);
  sol.timings.tsp = clock.lap();
  sol.length = path_length(sol.path);
  sol.success = true;
  return sol;
}

}  // namespace tsppp

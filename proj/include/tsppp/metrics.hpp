#pragma once

// Success weighted by path length, ground-truth solving and benchmark
// orchestration with CSV / JSON / SVG reports.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "tsppp/environments.hpp"
#include "tsppp/instance_io.hpp"
#include "tsppp/pipeline.hpp"

namespace tsppp {

struct BenchmarkRecord {
  std::uint64_t instance = 0;
  std::string method;
  std::string params;
  bool success = false;
  double length = std::numeric_limits<double>::infinity();
  double l_hat = 0.0;
  PhaseTimings timings;
  double total_time = 0.0;
  std::size_t roadmap_nodes = 0;

  double spl_term() const { return success ? l_hat / std::max(length, l_hat) : 0.0; }
};

/// Mean of S * l_hat / max(l, l_hat); 0 for an empty list.
inline double spl(const std::vector<BenchmarkRecord>& records) {
  if (records.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : records) {
    if (!(r.l_hat > 0.0)) throw std::invalid_argument("spl: ground-truth length must be positive");
    sum += r.spl_term();
  }
  return sum / static_cast<double>(records.size());
}

inline constexpr std::size_t kOracleRoadmapNodes = 3000;

struct OracleResult {
  double l_hat = 0.0;
  std::vector<Vec2> path;
};

/// Ground truth from a dense PRM plus the tour solver; nullopt if the PRM
/// leaves some destination pair disconnected.
inline std::optional<OracleResult> oracle_solve(const Instance& inst, std::uint64_t seed) {
  Solution s = solve_tsppp(inst, Method::prm(kOracleRoadmapNodes), seed);
  if (!s.success) return std::nullopt;
  return OracleResult{s.length, std::move(s.path)};
}

struct BenchmarkSuite {
  EnvironmentSpec environment = EnvironmentSpec::of(EnvironmentKind::standard);
  /// When set, instances are random crops of this map instead of synthetic maps.
  std::optional<GridMap> source_map;
  int crop_size = 128;
  std::size_t instances = 100;
  std::size_t destinations = 10;
  std::uint64_t seed = 0;
};

inline Instance make_suite_instance(const BenchmarkSuite& suite, std::size_t index) {
  const std::uint64_t seed = suite.seed + index;
  if (!suite.source_map) return make_synthetic_instance(suite.environment, suite.destinations, seed);
  Instance inst;
  inst.seed = seed;
  inst.grid = crop_grid(*suite.source_map, random_crop(*suite.source_map, suite.crop_size, derive_seed(seed, 1)));
  inst.destinations = sample_destinations(inst.grid, suite.destinations, derive_seed(seed, 2));
  return inst;
}

struct MethodSummary {
  std::string method;
  std::string params;
  double spl = 0.0;
  double success_rate = 0.0;
  double mean_time = 0.0;
  PhaseTimings phase_means;
  double mean_roadmap_nodes = 0.0;
  std::size_t instances = 0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRecord> records;
  std::vector<MethodSummary> summary;
  std::vector<std::uint64_t> excluded;
};

inline std::vector<MethodSummary> summarize(const std::vector<BenchmarkRecord>& records,
                                            const std::vector<Method>& methods) {
  std::vector<MethodSummary> out;
  for (const Method& m : methods) {
    MethodSummary s;
    s.method = m.name();
    s.params = m.describe_params();
    std::vector<BenchmarkRecord> mine;
    for (const auto& r : records)
      if (r.method == s.method && r.params == s.params) mine.push_back(r);
    s.instances = mine.size();
    if (!mine.empty()) {
      const double n = static_cast<double>(mine.size());
      s.spl = spl(mine);
      for (const auto& r : mine) {
        s.success_rate += r.success ? 1.0 : 0.0;
        s.mean_time += r.total_time;
        s.phase_means.sampling += r.timings.sampling;
        s.phase_means.roadmap += r.timings.roadmap;
        s.phase_means.search += r.timings.search;
        s.phase_means.tsp += r.timings.tsp;
        s.mean_roadmap_nodes += static_cast<double>(r.roadmap_nodes);
      }
      s.success_rate /= n;
      s.mean_time /= n;
      s.phase_means.sampling /= n;
      s.phase_means.roadmap /= n;
      s.phase_means.search /= n;
      s.phase_means.tsp /= n;
      s.mean_roadmap_nodes /= n;
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Generates the suite, solves each oracle once, then every method per
/// instance. Instances whose oracle fails are excluded (and logged).
/// Records are ordered by instance, then method, regardless of `workers`.
inline BenchmarkReport run_benchmark(const BenchmarkSuite& suite, const std::vector<Method>& methods,
                                     unsigned workers = 1, std::ostream* log = &std::cerr) {
  BenchmarkReport report;
  if (methods.empty()) return report;

  struct Slot {
    std::vector<BenchmarkRecord> records;
    bool excluded = false;
    std::uint64_t id = 0;
  };
  std::vector<Slot> slots(suite.instances);
  std::atomic<std::size_t> next{0};

  const auto work = [&] {
    for (std::size_t k = next++; k < suite.instances; k = next++) {
      const Instance inst = make_suite_instance(suite, k);
      Slot& slot = slots[k];
      slot.id = inst.seed;
      const auto oracle = oracle_solve(inst, derive_seed(inst.seed, 0x0a));
      if (!oracle) {
        slot.excluded = true;
        continue;
      }
      for (const Method& m : methods) {
        const auto start = std::chrono::steady_clock::now();
        const Solution sol = solve_tsppp(inst, m, derive_seed(inst.seed, 0x0b));
        const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        BenchmarkRecord r;
        r.instance = inst.seed;
        r.method = m.name();
        r.params = m.describe_params();
        r.success = sol.success;
        r.length = sol.success ? sol.length : std::numeric_limits<double>::infinity();
        r.l_hat = oracle->l_hat;
        r.timings = sol.timings;
        r.total_time = total;
        r.roadmap_nodes = sol.roadmap_nodes;
        slot.records.push_back(std::move(r));
      }
    }
  };

  const unsigned threads = std::max(1u, workers);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  for (const Slot& slot : slots) {
    if (slot.excluded) {
      report.excluded.push_back(slot.id);
      if (log) *log << "warning: oracle failed on instance " << slot.id << "; excluded from the suite\n";
      continue;
    }
    report.records.insert(report.records.end(), slot.records.begin(), slot.records.end());
  }
  report.summary = summarize(report.records, methods);
  return report;
}

inline constexpr const char* kCsvHeader =
    "instance,method,params,S,l,l_hat,spl_term,t_sampling,t_roadmap,t_search,t_tsp,t_total";

namespace detail {

inline std::string exact(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
inline std::string seconds(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace detail

/// One row per record. Lengths and SPL terms are written with round-trip
/// precision; times in seconds with six decimals.
inline void write_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.instance << ',' << r.method << ',' << r.params << ',' << (r.success ? 1 : 0) << ','
        << detail::exact(r.length) << ',' << detail::exact(r.l_hat) << ',' << detail::exact(r.spl_term()) << ','
        << detail::seconds(r.timings.sampling) << ',' << detail::seconds(r.timings.roadmap) << ','
        << detail::seconds(r.timings.search) << ',' << detail::seconds(r.timings.tsp) << ','
        << detail::seconds(r.total_time) << '\n';
  }
}

inline nlohmann::json summary_to_json(const std::vector<MethodSummary>& summary) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : summary) {
    arr.push_back({{"method", s.method},
                   {"params", s.params},
                   {"spl", s.spl},
                   {"success_rate", s.success_rate},
                   {"mean_time", s.mean_time},
                   {"mean_roadmap_nodes", s.mean_roadmap_nodes},
                   {"instances", s.instances},
                   {"phase_means",
                    {{"sampling", s.phase_means.sampling},
                     {"roadmap", s.phase_means.roadmap},
                     {"search", s.phase_means.search},
                     {"tsp", s.phase_means.tsp}}}});
  }
  return arr;
}

/// SPL against mean computation time, one labelled point per method.
inline void write_svg(std::ostream& out, const std::vector<MethodSummary>& summary) {
  constexpr double w = 640, h = 420, left = 70, right = 20, top = 20, bottom = 50;
  double tmax = 0.0;
  for (const auto& s : summary) tmax = std::max(tmax, s.mean_time);
  if (tmax <= 0.0) tmax = 1.0;
  const auto px = [&](double t) { return left + (w - left - right) * t / (tmax * 1.05); };
  const auto py = [&](double v) { return top + (h - top - bottom) * (1.0 - v); };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << w - right << "\" y2=\"" << py(0)
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << left << "\" y2=\"" << py(1)
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << (w / 2) << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">mean time [s] (max "
      << detail::seconds(tmax) << ")</text>\n"
      << "<text x=\"15\" y=\"" << h / 2 << "\" transform=\"rotate(-90 15 " << h / 2
      << ")\" text-anchor=\"middle\">SPL</text>\n";
  for (double v : {0.0, 0.25, 0.5, 0.75, 1.0})
    out << "<text x=\"" << left - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << v << "</text>\n";
  for (const auto& s : summary) {
    const double x = px(s.mean_time);
    const double y = py(std::clamp(s.spl, 0.0, 1.0));
    const std::string color = s.method == "prm" ? "#1f77b4" : s.method == "diffuser" ? "#2ca02c" : "#d62728";
    out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"" << color << "\"/>\n"
        << "<text x=\"" << x + 6 << "\" y=\"" << y - 6 << "\" font-size=\"10\">" << s.method << " " << s.params
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace tsppp

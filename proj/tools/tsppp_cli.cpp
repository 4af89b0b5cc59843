// Command-line front end: instance generation, single-instance solving and
// benchmark runs driven by a JSON config with flag overrides.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tsppp/tsppp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitPlanningFailure = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string environment = "standard";
  std::optional<std::string> map_path;
  std::optional<tsppp::GridCrop> crop;
  int crop_size = 128;
  std::size_t destinations = 10;
  std::size_t instances = 100;
  std::uint64_t seed = 0;
  std::vector<std::string> methods{"prm:200", "prm:500", "prm:1000", "prm:2000", "tspdiffuser"};
  std::string out = "results";
  unsigned workers = 1;
  bool svg = true;
};

tsppp::GridCrop parse_crop(const std::string& text) {
  std::stringstream ss(text);
  std::vector<int> v;
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw InputError("--crop expects R,C,S integers, got '" + text + "'");
    }
  }
  if (v.size() != 3 || v[0] < 0 || v[1] < 0 || v[2] < 1) throw InputError("--crop expects R,C,S with S >= 1");
  return {v[0], v[1], v[2]};
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
  if (!j.is_object()) throw InputError(path + ": config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "environment") c.environment = value.get<std::string>();
      else if (key == "map") c.map_path = value.get<std::string>();
      else if (key == "crop") c.crop = parse_crop(value.get<std::string>());
      else if (key == "crop_size") c.crop_size = value.get<int>();
      else if (key == "destinations") c.destinations = value.get<std::size_t>();
      else if (key == "instances") c.instances = value.get<std::size_t>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "methods") c.methods = value.get<std::vector<std::string>>();
      else if (key == "out") c.out = value.get<std::string>();
      else if (key == "workers") c.workers = value.get<unsigned>();
      else if (key == "svg") c.svg = value.get<bool>();
      else throw InputError(path + ": unknown config key '" + key + "'");
    }
  } catch (const json::type_error& e) {
    throw InputError(path + ": " + e.what());
  }
  return c;
}

/// Options shared by the subcommands; empty optionals fall back to the config.
struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> destinations;
  std::optional<std::size_t> instances;
  std::optional<std::string> env;
  std::optional<std::string> map;
  std::optional<std::string> crop;
  std::optional<std::string> out;
  std::optional<unsigned> workers;
  std::vector<std::string> methods;
  bool no_svg = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--destinations", o.destinations, "destinations per instance");
  cmd->add_option("--env", o.env, "environment")
      ->check(CLI::IsMember({"standard", "more_obstacles", "larger_obstacles", "mapfile"}));
  cmd->add_option("--map", o.map, "grid-map file (with --env mapfile)");
  cmd->add_option("--crop", o.crop, "fixed crop R,C,S of the map file");
  cmd->add_option("--out", o.out, "output directory");
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.destinations) c.destinations = *o.destinations;
  if (o.instances) c.instances = *o.instances;
  if (o.env) c.environment = *o.env;
  if (o.map) c.map_path = *o.map;
  if (o.crop) c.crop = parse_crop(*o.crop);
  if (o.out) c.out = *o.out;
  if (o.workers) c.workers = *o.workers;
  if (!o.methods.empty()) c.methods = o.methods;
  if (o.no_svg) c.svg = false;
  if (c.destinations < 1) throw InputError("destinations must be >= 1");
  if (c.environment == "mapfile" && !c.map_path) throw InputError("--env mapfile requires --map");
  if (c.map_path && c.environment != "mapfile") c.environment = "mapfile";
  return c;
}

tsppp::BenchmarkSuite make_suite(const RunConfig& c) {
  tsppp::BenchmarkSuite suite;
  suite.instances = c.instances;
  suite.destinations = c.destinations;
  suite.seed = c.seed;
  suite.crop_size = c.crop_size;
  try {
    if (c.environment == "mapfile") {
      if (c.crop) {
        suite.source_map = tsppp::load_grid_map(*c.map_path, *c.crop);
        suite.crop_size = c.crop->size;
      } else {
        suite.source_map = tsppp::load_grid_map(*c.map_path, std::nullopt, 0, 0);
      }
    } else {
      suite.environment = tsppp::EnvironmentSpec::of(tsppp::parse_environment_kind(c.environment));
    }
  } catch (const tsppp::MapFormatError& e) {
    throw InputError(e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return suite;
}

std::vector<tsppp::Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<tsppp::Method> out;
  for (const auto& n : names) {
    try {
      out.push_back(tsppp::parse_method(n));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());
}

int cmd_gen(const Overrides& o) {
  const RunConfig c = resolve(o);
  const tsppp::BenchmarkSuite suite = make_suite(c);
  ensure_dir(c.out);
  for (std::size_t k = 0; k < suite.instances; ++k) {
    tsppp::Instance inst;
    try {
      inst = tsppp::make_suite_instance(suite, k);
    } catch (const tsppp::DegenerateMapError& e) {
      throw InputError("instance " + std::to_string(suite.seed + k) + ": " + e.what());
    } catch (const tsppp::MapFormatError& e) {
      throw InputError(e.what());
    }
    const fs::path path = fs::path(c.out) / ("inst_" + std::to_string(inst.seed) + ".json");
    try {
      tsppp::save_instance(path, inst);
    } catch (const std::runtime_error& e) {
      throw InputError(e.what());
    }
    std::cout << path.string() << '\n';
  }
  return kExitOk;
}

int cmd_solve(const std::string& instance_path, const std::string& method_name, std::uint64_t seed) {
  tsppp::Instance inst;
  try {
    inst = tsppp::load_instance(instance_path);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const auto methods = parse_methods({method_name});
  const tsppp::Solution sol = tsppp::solve_tsppp(inst, methods.front(), seed);
  json out = {{"success", sol.success},
              {"length", sol.success ? json(sol.length) : json(nullptr)},
              {"method", methods.front().name()},
              {"params", methods.front().describe_params()},
              {"roadmap", {{"nodes", sol.roadmap_nodes}, {"edges", sol.roadmap_edges}}},
              {"timings",
               {{"sampling", sol.timings.sampling},
                {"roadmap", sol.timings.roadmap},
                {"search", sol.timings.search},
                {"tsp", sol.timings.tsp}}}};
  if (!sol.success) out["reason"] = std::string(tsppp::to_string(sol.reason));
  json path = json::array();
  for (const auto& p : sol.path) path.push_back({p.x, p.y});
  out["path"] = std::move(path);
  std::cout << out.dump() << '\n';
  return sol.success ? kExitOk : kExitPlanningFailure;
}

int cmd_bench(const Overrides& o) {
  const RunConfig c = resolve(o);
  const auto methods = parse_methods(c.methods);
  const tsppp::BenchmarkSuite suite = make_suite(c);
  ensure_dir(c.out);
  tsppp::BenchmarkReport report;
  try {
    report = tsppp::run_benchmark(suite, methods, c.workers, &std::cerr);
  } catch (const tsppp::DegenerateMapError& e) {
    throw InputError(e.what());
  }
  const fs::path dir(c.out);
  {
    std::ofstream csv(dir / "results.csv", std::ios::binary);
    if (!csv) throw InputError("cannot write " + (dir / "results.csv").string());
    tsppp::write_csv(csv, report.records);
  }
  {
    json summary = {{"methods", tsppp::summary_to_json(report.summary)},
                    {"instances", suite.instances},
                    {"excluded", report.excluded},
                    {"destinations", suite.destinations},
                    {"seed", suite.seed}};
    std::ofstream js(dir / "summary.json", std::ios::binary);
    if (!js) throw InputError("cannot write " + (dir / "summary.json").string());
    js << summary.dump(2) << '\n';
  }
  if (c.svg) {
    std::ofstream svg(dir / "spl_vs_time.svg", std::ios::binary);
    if (!svg) throw InputError("cannot write " + (dir / "spl_vs_time.svg").string());
    tsppp::write_svg(svg, report.summary);
  }
  for (const auto& s : report.summary)
    std::cout << s.method << ' ' << s.params << " SPL=" << s.spl << " success=" << s.success_rate
              << " time=" << s.mean_time << "s\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traveling-salesperson path planning on grid maps"};
  app.require_subcommand(1);

  Overrides gen_opt;
  auto* gen = app.add_subcommand("gen", "write instance files inst_<seed>.json");
  add_common(gen, gen_opt);
  gen->add_option("--instances", gen_opt.instances, "number of instances");

  std::string instance_path;
  std::string method = "tspdiffuser";
  std::uint64_t solve_seed = 0;
  auto* solve = app.add_subcommand("solve", "solve one instance file and print the solution as JSON");
  solve->add_option("instance", instance_path, "instance JSON file")->required();
  solve->add_option("--method", method, "method, e.g. prm:1000 or tspdiffuser:M=10,K=5");
  solve->add_option("--seed", solve_seed, "solver seed");

  Overrides bench_opt;
  auto* bench = app.add_subcommand("bench", "run a benchmark suite and write CSV/JSON/SVG reports");
  add_common(bench, bench_opt);
  bench->add_option("--instances", bench_opt.instances, "number of instances");
  bench->add_option("--method", bench_opt.methods, "method (repeatable); replaces the config list");
  bench->add_option("--workers", bench_opt.workers, "parallel instance workers")->check(CLI::PositiveNumber);
  bench->add_flag("--no-svg", bench_opt.no_svg, "skip the SVG plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*gen) return cmd_gen(gen_opt);
    if (*solve) return cmd_solve(instance_path, method, solve_seed);
    return cmd_bench(bench_opt);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

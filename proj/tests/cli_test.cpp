#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"
#include "tsppp/tsppp.hpp"

namespace fs = std::filesystem;
using namespace tsppp;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(TSPPP_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tsppp_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Drops the timing columns (t_*) from every CSV row.
std::string without_timings(const std::string& csv) {
  std::stringstream in(csv), out;
  std::string line;
  while (std::getline(in, line)) {
    std::stringstream cells(line);
    std::string cell;
    for (int k = 0; k < 7 && std::getline(cells, cell, ','); ++k) out << cell << ',';
    out << '\n';
  }
  return out.str();
}

}  // namespace

TEST(CliGen, WritesOneFilePerSeedDeterministically) {
  const fs::path a = scratch("gen_a"), b = scratch("gen_b");
  ASSERT_EQ(run("gen --seed 5 --instances 3 --out " + a.string()).status, 0);
  ASSERT_EQ(run("gen --seed 5 --instances 3 --out " + b.string()).status, 0);
  for (int s : {5, 6, 7}) {
    const std::string name = "inst_" + std::to_string(s) + ".json";
    ASSERT_TRUE(fs::exists(a / name));
    EXPECT_EQ(slurp(a / name), slurp(b / name));
    const Instance inst = load_instance(a / name);
    EXPECT_NO_THROW(validate_instance(inst));
    EXPECT_EQ(inst.destinations.size(), 10u);
    EXPECT_EQ(inst.grid.width(), 128);
  }
  EXPECT_EQ(std::distance(fs::directory_iterator(a), fs::directory_iterator{}), 3);
}

TEST(CliGen, MapFileWithCrop) {
  const fs::path dir = scratch("gen_map");
  std::ofstream(dir / "city.map") << "type octile\nheight 4\nwidth 5\nmap\n.....\n.@@..\n.....\n..T..\n";
  const auto r = run("gen --env mapfile --map " + (dir / "city.map").string() +
                     " --crop 0,0,4 --instances 1 --destinations 3 --out " + dir.string());
  ASSERT_EQ(r.status, 0);
  const Instance inst = load_instance(dir / "inst_0.json");
  EXPECT_EQ(inst.grid.width(), 4);
  EXPECT_TRUE(inst.grid.obstacle(1, 1));
  EXPECT_EQ(run("gen --env mapfile --map " + (dir / "city.map").string() + " --crop 2,2,4 --out " + dir.string()).status, 1);
}

TEST(CliSolve, OpenMapSucceedsWithClosedLoop) {
  const fs::path dir = scratch("solve_ok");
  Instance inst;
  inst.grid = GridMap(32, 32);
  inst.destinations = {{-0.5, -0.5}, {0.5, -0.5}, {0.0, 0.5}};
  save_instance(dir / "open.json", inst);
  const auto r = run("solve " + (dir / "open.json").string() + " --method prm:200 --seed 3");
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["success"].get<bool>());
  std::vector<Vec2> path;
  for (const auto& p : j["path"]) path.push_back({p[0].get<double>(), p[1].get<double>()});
  ASSERT_GE(path.size(), 4u);
  EXPECT_EQ(path.front(), path.back());
  EXPECT_NEAR(j["length"].get<double>(), path_length(path), 1e-9);
  EXPECT_TRUE(j["timings"].contains("sampling"));
}

TEST(CliSolve, WalledOffDestinationExitsTwo) {
  const fs::path dir = scratch("solve_fail");
  Instance inst;
  inst.grid = GridMap(16, 16);
  for (int k = 0; k < 16; ++k) inst.grid.set_obstacle(8, k);
  inst.destinations = {{-0.5, -0.5}, {0.5, -0.5}, {0.0, 0.5}};
  save_instance(dir / "walled.json", inst);
  const auto r = run("solve " + (dir / "walled.json").string() + " --method prm:200");
  EXPECT_EQ(r.status, 2);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j["success"].get<bool>());
  EXPECT_EQ(j["reason"], "unreachable_pair");
}

TEST(CliSolve, InputErrorsExitOne) {
  const fs::path dir = scratch("solve_bad");
  std::ofstream(dir / "broken.json") << "{\"width\": 2";
  EXPECT_EQ(run("solve " + (dir / "broken.json").string()).status, 1);
  EXPECT_EQ(run("solve " + (dir / "missing.json").string()).status, 1);
  Instance inst;
  inst.grid = GridMap(4, 4);
  inst.destinations = {{0.1, 0.1}, {-0.6, 0.6}};
  save_instance(dir / "ok.json", inst);
  EXPECT_EQ(run("solve " + (dir / "ok.json").string() + " --method teleport").status, 1);
  EXPECT_EQ(run("frobnicate").status, 1);
}

TEST(CliBench, MinimalConfigAndRerunStability) {
  const fs::path dir = scratch("bench");
  const fs::path out1 = dir / "run1", out2 = dir / "run2";
  std::ofstream(dir / "config.json") << R"({"instances": 2, "destinations": 5, "seed": 11, "methods": ["prm:300"]})";
  ASSERT_EQ(run("bench --config " + (dir / "config.json").string() + " --out " + out1.string()).status, 0);
  ASSERT_EQ(run("bench --config " + (dir / "config.json").string() + " --out " + out2.string() + " --workers 2").status, 0);
  const std::string csv = slurp(out1 / "results.csv");
  std::stringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  EXPECT_EQ(header, kCsvHeader);
  int rows = 0;
  while (std::getline(lines, row)) ++rows;
  const auto summary = nlohmann::json::parse(slurp(out1 / "summary.json"));
  EXPECT_EQ(rows + 0, 2 - static_cast<int>(summary["excluded"].size()));
  EXPECT_EQ(without_timings(csv), without_timings(slurp(out2 / "results.csv")));
  EXPECT_TRUE(fs::exists(out1 / "spl_vs_time.svg"));
  EXPECT_EQ(summary["methods"][0]["params"], "n=300");
}

TEST(CliBench, FlagsOverrideConfigAndBadConfigExitsOne) {
  const fs::path dir = scratch("bench_override");
  std::ofstream(dir / "config.json") << R"({"instances": 5, "methods": ["prm:100"], "svg": false})";
  ASSERT_EQ(run("bench --config " + (dir / "config.json").string() + " --instances 1 --destinations 3 --out " +
                dir.string())
                .status,
            0);
  std::stringstream lines(slurp(dir / "results.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(lines, line)) ++rows;
  EXPECT_LE(rows, 1);
  EXPECT_FALSE(fs::exists(dir / "spl_vs_time.svg"));
  std::ofstream(dir / "bad.json") << R"({"instancez": 5})";
  EXPECT_EQ(run("bench --config " + (dir / "bad.json").string() + " --out " + dir.string()).status, 1);
  EXPECT_EQ(run("bench --method prm:zero --instances 1 --out " + dir.string()).status, 1);
}

#pragma once

// Benchmark grid-map text files and the Instance JSON interchange format.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tsppp/environments.hpp"
#include "tsppp/geometry.hpp"
#include "tsppp/random.hpp"

namespace tsppp {

class MapFormatError : public std::runtime_error {
 public:
  enum class Kind { malformed_header, inconsistent_rows, bad_character, crop_out_of_bounds, io };

  MapFormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct GridCrop {
  int row = 0;
  int col = 0;
  int size = 128;
};

/// Parses the `type / height H / width W / map` text layout. `.` and `G`
/// are free; `@`, `O` and `T` are obstacles.
inline GridMap parse_grid_map(std::istream& in) {
  using Kind = MapFormatError::Kind;
  std::string line;
  int height = -1;
  int width = -1;
  bool saw_type = false;
  bool saw_map = false;
  while (!saw_map && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    if (key == "type") {
      saw_type = true;
    } else if (key == "height" || key == "width") {
      int value = -1;
      if (!(fields >> value) || value < 1) throw MapFormatError(Kind::malformed_header, "bad header line: " + line);
      (key == "height" ? height : width) = value;
    } else if (key == "map") {
      saw_map = true;
    } else {
      throw MapFormatError(Kind::malformed_header, "unexpected header line: " + line);
    }
  }
  if (!saw_type || !saw_map || height < 1 || width < 1)
    throw MapFormatError(Kind::malformed_header, "header must contain type, height, width and map");

  GridMap g(width, height);
  for (int r = 0; r < height; ++r) {
    if (!std::getline(in, line))
      throw MapFormatError(Kind::inconsistent_rows,
                           "expected " + std::to_string(height) + " rows, got " + std::to_string(r));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (static_cast<int>(line.size()) != width)
      throw MapFormatError(Kind::inconsistent_rows, "row " + std::to_string(r) + " has length " +
                                                        std::to_string(line.size()) + ", expected " +
                                                        std::to_string(width));
    for (int c = 0; c < width; ++c) {
      switch (line[static_cast<std::size_t>(c)]) {
        case '.':
        case 'G': break;
        case '@':
        case 'O':
        case 'T': g.set_obstacle(r, c); break;
        default:
          throw MapFormatError(Kind::bad_character, "unknown map character '" +
                                                        std::string(1, line[static_cast<std::size_t>(c)]) +
                                                        "' at row " + std::to_string(r));
      }
    }
  }
  return g;
}

inline GridMap crop_grid(const GridMap& g, const GridCrop& crop) {
  if (crop.size < 1 || crop.row < 0 || crop.col < 0 || crop.row + crop.size > g.height() ||
      crop.col + crop.size > g.width())
    throw MapFormatError(MapFormatError::Kind::crop_out_of_bounds,
                         "crop (" + std::to_string(crop.row) + "," + std::to_string(crop.col) + "," +
                             std::to_string(crop.size) + ") exceeds " + std::to_string(g.height()) + "x" +
                             std::to_string(g.width()) + " map");
  GridMap out(crop.size, crop.size);
  for (int r = 0; r < crop.size; ++r)
    for (int c = 0; c < crop.size; ++c) out.set_obstacle(r, c, g.obstacle(crop.row + r, crop.col + c));
  return out;
}

/// Uniformly random crop offset of the given size.
inline GridCrop random_crop(const GridMap& g, int size, std::uint64_t seed) {
  if (size > g.width() || size > g.height())
    throw MapFormatError(MapFormatError::Kind::crop_out_of_bounds, "crop size exceeds map");
  Rng rng(seed);
  std::uniform_int_distribution<int> row(0, g.height() - size);
  std::uniform_int_distribution<int> col(0, g.width() - size);
  const int r = row(rng);
  return {r, col(rng), size};
}

/// Loads a grid-map file. Without an explicit crop a random `crop_size`
/// window is taken (seeded); pass crop_size <= 0 to keep the whole map.
inline GridMap load_grid_map(const std::filesystem::path& path, std::optional<GridCrop> crop = std::nullopt,
                             std::uint64_t seed = 0, int crop_size = 128) {
  std::ifstream in(path);
  if (!in) throw MapFormatError(MapFormatError::Kind::io, "cannot open map file " + path.string());
  const GridMap full = parse_grid_map(in);
  if (crop) return crop_grid(full, *crop);
  if (crop_size <= 0) return full;
  return crop_grid(full, random_crop(full, crop_size, seed));
}

inline void write_grid_map(std::ostream& out, const GridMap& g) {
  out << "type octile\nheight " << g.height() << "\nwidth " << g.width() << "\nmap\n";
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) out << (g.obstacle(r, c) ? '@' : '.');
    out << '\n';
  }
}

// Instance JSON: {"width","height","rows":["..#.",...],"destinations":[[x,y],...],"seed"}

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < inst.grid.height(); ++r) {
    std::string row(static_cast<std::size_t>(inst.grid.width()), '.');
    for (int c = 0; c < inst.grid.width(); ++c)
      if (inst.grid.obstacle(r, c)) row[static_cast<std::size_t>(c)] = '#';
    rows.push_back(std::move(row));
  }
  nlohmann::json dst = nlohmann::json::array();
  for (const auto& d : inst.destinations) dst.push_back({d.x, d.y});
  return {{"width", inst.grid.width()},
          {"height", inst.grid.height()},
          {"rows", std::move(rows)},
          {"destinations", std::move(dst)},
          {"seed", inst.seed}};
}

/// Parses and validates an Instance; throws std::invalid_argument with a
/// diagnostic on any structural problem.
inline Instance instance_from_json(const nlohmann::json& j) {
  const auto fail = [](const std::string& msg) -> void { throw std::invalid_argument("instance JSON: " + msg); };
  if (!j.is_object()) fail("top level must be an object");
  for (const char* key : {"width", "height", "rows", "destinations"})
    if (!j.contains(key)) fail(std::string("missing field '") + key + "'");
  if (!j["width"].is_number_integer() || !j["height"].is_number_integer()) fail("width/height must be integers");
  const int width = j["width"].get<int>();
  const int height = j["height"].get<int>();
  if (width < 1 || height < 1) fail("width/height must be >= 1");
  const auto& rows = j["rows"];
  if (!rows.is_array() || static_cast<int>(rows.size()) != height) fail("rows must be an array of length height");

  Instance inst;
  inst.grid = GridMap(width, height);
  for (int r = 0; r < height; ++r) {
    if (!rows[static_cast<std::size_t>(r)].is_string()) fail("row " + std::to_string(r) + " is not a string");
    const auto row = rows[static_cast<std::size_t>(r)].get<std::string>();
    if (static_cast<int>(row.size()) != width) fail("row " + std::to_string(r) + " has wrong length");
    for (int c = 0; c < width; ++c) {
      const char ch = row[static_cast<std::size_t>(c)];
      if (ch == '#') inst.grid.set_obstacle(r, c);
      else if (ch != '.') fail("row " + std::to_string(r) + " contains '" + std::string(1, ch) + "'");
    }
  }
  const auto& dst = j["destinations"];
  if (!dst.is_array()) fail("destinations must be an array");
  for (const auto& d : dst) {
    if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number())
      fail("each destination must be [x, y]");
    inst.destinations.push_back({d[0].get<double>(), d[1].get<double>()});
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) fail("seed must be an integer");
    inst.seed = j["seed"].get<std::uint64_t>();
  }
  validate_instance(inst);
  return inst;
}

inline void save_instance(const std::filesystem::path& path, const Instance& inst) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << instance_to_json(inst).dump(1) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return instance_from_json(j);
}

}  // namespace tsppp

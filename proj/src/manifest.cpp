#include "skel/manifest.hpp"

#include <fstream>

#include "skel/matrix_market.hpp"

namespace skel {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string file_name(const char* stem, std::size_t l) {
  return std::string(stem) + "_" + std::to_string(l) + ".mtx";
}

std::vector<std::string> string_list(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  if (!j.at(key).is_array()) throw FormatError(std::string("manifest: '") + key + "' is not a list");
  return j.at(key).get<std::vector<std::string>>();
}

}  // namespace

void write_lineage(const fs::path& dir, const GradedGraph& gg) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError("cannot create " + dir.string() + ": " + ec.message());

  json m;
  m["name"] = gg.name;
  m["numLevels"] = gg.num_levels();
  bool undirected = true;
  std::vector<std::string> levels, inter, prolong;
  for (std::size_t l = 0; l < gg.levels.size(); ++l) {
    const auto& g = gg.levels[l];
    undirected = undirected && g.undirected();
    levels.push_back(file_name("level", l));
    write_matrix_market(dir / levels.back(), g.adj(), g.undirected());
  }
  for (std::size_t l = 0; l < gg.inter.size(); ++l) {
    inter.push_back(file_name("inter", l));
    write_matrix_market(dir / inter.back(), gg.inter[l]);
  }
  for (std::size_t l = 0; l < gg.prolong.size(); ++l) {
    prolong.push_back(file_name("prolong", l));
    write_matrix_market(dir / prolong.back(), gg.prolong[l]);
  }
  m["undirected"] = undirected;
  m["levelFiles"] = levels;
  m["interFiles"] = inter;
  m["prolongFiles"] = prolong;
  m["metadata"] = gg.metadata;

  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw FormatError("cannot write " + (dir / "manifest.json").string());
  out << m.dump(2) << '\n';
}

GradedGraph read_lineage(const fs::path& dir) {
  const auto path = dir / "manifest.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("no manifest at " + path.string());
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("manifest " + path.string() + ": " + e.what());
  }
  if (!m.is_object()) throw FormatError("manifest " + path.string() + " is not an object");

  GradedGraph gg;
  try {
    gg.name = m.value("name", std::string{});
    const bool undirected = m.value("undirected", true);
    const auto levels = string_list(m, "levelFiles");
    if (m.contains("numLevels") && m.at("numLevels").get<Index>() != static_cast<Index>(levels.size())) {
      throw FormatError("manifest: numLevels does not match levelFiles");
    }
    for (const auto& f : levels) gg.levels.emplace_back(read_matrix_market(dir / f), undirected);
    for (const auto& f : string_list(m, "interFiles")) gg.inter.push_back(read_matrix_market(dir / f));
    for (const auto& f : string_list(m, "prolongFiles")) {
      gg.prolong.push_back(read_matrix_market(dir / f));
    }
    if (m.contains("metadata")) gg.metadata = m.at("metadata");
  } catch (const json::exception& e) {
    throw FormatError("manifest " + path.string() + ": " + e.what());
  } catch (const GraphError& e) {
    throw FormatError("manifest " + path.string() + ": " + e.what());
  }
  return gg;
}

}  // namespace skel

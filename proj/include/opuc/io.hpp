#pragma once

// Measure files: {"grid_size", "weight", "atoms": [{"angle", "mass"}], "family"}.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "opuc/error.hpp"
#include "opuc/measure.hpp"

namespace opuc {

inline nlohmann::json measure_to_json(const CircleMeasure& mu) {
  nlohmann::json j;
  j["grid_size"] = mu.grid_size();
  j["weight"] = std::vector<double>(mu.weight().begin(), mu.weight().end());
  j["atoms"] = nlohmann::json::array();
  for (const auto& a : mu.atoms()) j["atoms"].push_back({{"angle", a.angle}, {"mass", a.mass}});
  if (mu.family()) j["family"] = *mu.family();
  return j;
}

/// Parses and validates a measure; `normalize` rescales to unit mass instead of checking it.
inline CircleMeasure measure_from_json(const nlohmann::json& j, bool normalize = false) {
  try {
    const auto weight = j.at("weight").get<std::vector<double>>();
    if (j.contains("grid_size") && j.at("grid_size").get<std::size_t>() != weight.size()) {
      fail(ErrorKind::GridMismatch, "grid_size does not match the number of weight samples");
    }
    std::vector<Atom> atoms;
    if (j.contains("atoms")) {
      for (const auto& a : j.at("atoms")) atoms.push_back({a.at("angle").get<double>(), a.at("mass").get<double>()});
    }
    MeasureOptions options;
    if (j.contains("family") && !j.at("family").is_null()) options.family = j.at("family").get<std::string>();
    return build_measure(weight, atoms, normalize, options);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed measure file: ") + e.what());
  }
}

inline CircleMeasure load_measure(const std::string& path, bool normalize = false) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, path + ": " + e.what());
  }
  return measure_from_json(j, normalize);
}

inline void save_measure(const CircleMeasure& mu, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << measure_to_json(mu).dump(2) << '\n';
}

}  // namespace opuc

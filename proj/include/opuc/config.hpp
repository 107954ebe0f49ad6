#pragma once

// Experiment configuration: JSON parsing, validation, family construction, and
// the seeded generator behind randomized sweeps.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "opuc/error.hpp"
#include "opuc/families.hpp"
#include "opuc/io.hpp"

namespace opuc {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"mnt", "entropy", "schur_identities", "summability", "scattering"};
  return names;
}

struct ExperimentConfig {
  FamilySpec family;
  std::optional<std::string> measure_path;  // family {"name": "file", "path": ...}
  std::size_t grid_size = kDefaultGridSize;
  std::vector<std::size_t> n_list{16, 32, 64, 128, 256};
  std::vector<double> test_points{0.0};
  std::string experiment = "all";
  std::string output_path = "opuclab-out";
  std::size_t delta_grid_size = kDefaultDeltaGridSize;
  std::uint64_t seed = 0;
};

/// x <- 6364136223846793005 x + 1442695040888963407 (mod 2^64); uniform() returns
/// the top 53 bits divided by 2^53.
class Lcg64 {
 public:
  explicit Lcg64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ = 6364136223846793005ULL * state_ + 1442695040888963407ULL;
    return state_;
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Integer in [0, bound).
  std::size_t below(std::size_t bound) {
    return std::min(bound - 1, static_cast<std::size_t>(uniform() * static_cast<double>(bound)));
  }

  /// Point in the disk |z| <= radius, uniform in area.
  cplx disk(double radius) {
    const double r = radius * std::sqrt(uniform());
    return std::polar(r, kTwoPi * uniform());
  }

  cplx circle() { return unit(kTwoPi * uniform()); }

 private:
  std::uint64_t state_;
};

/// Independent stream for sweep number `index` under one seed.
inline Lcg64 stream(std::uint64_t seed, std::uint64_t index) {
  Lcg64 g(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
  g.next();
  return g;
}

namespace detail {

inline double parse_number(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(ErrorKind::Config, "bad number '" + std::string(text) + "'");
  return v;
}

inline FamilyKind kind_from_name(const std::string& name) {
  if (name == "lebesgue") return FamilyKind::Lebesgue;
  if (name == "bernstein_szego") return FamilyKind::BernsteinSzego;
  if (name == "geronimus") return FamilyKind::Geronimus;
  if (name == "ell2") return FamilyKind::Ell2;
  if (name == "mixed") return FamilyKind::Mixed;
  fail(ErrorKind::Config, "unknown family '" + name + "'");
}

// "x", "x+yi" or "x-yi".
inline cplx parse_complex_text(const std::string& text) {
  static const std::regex form(R"(^([-+]?[0-9.eE]+?)(?:([-+][0-9.eE]+)i)?$)");
  std::smatch m;
  if (!std::regex_match(text, m, form)) fail(ErrorKind::Config, "bad complex number '" + text + "'");
  const double im = m[2].matched ? parse_number(m[2].str()[0] == '+' ? m[2].str().substr(1) : m[2].str()) : 0.0;
  const std::string re = m[1].str()[0] == '+' ? m[1].str().substr(1) : m[1].str();
  return {parse_number(re), im};
}

inline cplx parse_complex(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_object()) return {j.value("re", 0.0), j.value("im", 0.0)};
  if (j.is_string()) return parse_complex_text(j.get<std::string>());
  fail(ErrorKind::Config, "complex values are numbers, [re, im] pairs or {\"re\", \"im\"} objects");
}

inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) fail(ErrorKind::Config, "unknown key '" + item.key() + "' in " + where);
  }
}

// Label form: lebesgue, bernstein_szego(r), geronimus(a), ell2(c,p).
inline FamilySpec parse_family_text(const std::string& text) {
  static const std::regex form(R"(^\s*([a-z_0-9]+)\s*(?:\((.*)\))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, form)) fail(ErrorKind::Config, "bad family '" + text + "'");
  std::vector<std::string> args;
  if (m[2].matched) {
    std::string arg;
    for (char ch : m[2].str()) {
      if (ch == ',') {
        args.push_back(arg);
        arg.clear();
      } else if (ch != ' ') {
        arg += ch;
      }
    }
    args.push_back(arg);
  }
  auto need = [&](std::size_t count) {
    if (args.size() != count) fail(ErrorKind::Config, "family '" + text + "' takes " + std::to_string(count) + " argument(s)");
  };
  switch (kind_from_name(m[1].str())) {
    case FamilyKind::Lebesgue:
      if (m[2].matched) fail(ErrorKind::Config, "lebesgue takes no arguments");
      return lebesgue_spec();
    case FamilyKind::BernsteinSzego: need(1); return bernstein_szego_spec(parse_number(args[0]));
    case FamilyKind::Geronimus: need(1); return geronimus_spec(parse_complex_text(args[0]));
    case FamilyKind::Ell2: need(2); return ell2_spec(parse_number(args[0]), parse_number(args[1]));
    case FamilyKind::Mixed: break;
  }
  fail(ErrorKind::Config, "mixed families need the object form with base and atoms");
}

inline FamilySpec parse_base(const nlohmann::json& j, FamilySpec spec) {
  if (j.is_string()) {
    const auto base = parse_family_text(j.get<std::string>());
    spec.base = base.kind;
    spec.r = base.r;
  } else {
    check_keys(j, {"name", "r"}, "mixed base");
    spec.base = kind_from_name(j.at("name").get<std::string>());
    spec.r = j.value("r", 0.0);
  }
  return spec;
}

}  // namespace detail

/// Family from a label string or an object {"name", "r", "a", "c", "p", "truncation", "base", "atoms", "path"}.
inline void parse_family(const nlohmann::json& j, ExperimentConfig& cfg) {
  cfg.measure_path.reset();
  if (j.is_string()) {
    cfg.family = detail::parse_family_text(j.get<std::string>());
    return;
  }
  if (!j.is_object()) fail(ErrorKind::Config, "family must be a string or an object");
  const std::string name = j.at("name").get<std::string>();
  if (name == "file") {
    detail::check_keys(j, {"name", "path"}, "family");
    cfg.measure_path = j.at("path").get<std::string>();
    cfg.family = FamilySpec{};
    return;
  }
  FamilySpec spec;
  spec.kind = detail::kind_from_name(name);
  switch (spec.kind) {
    case FamilyKind::Lebesgue: detail::check_keys(j, {"name"}, "family"); break;
    case FamilyKind::BernsteinSzego:
      detail::check_keys(j, {"name", "r"}, "family");
      spec.r = j.at("r").get<double>();
      break;
    case FamilyKind::Geronimus:
      detail::check_keys(j, {"name", "a"}, "family");
      spec.a = detail::parse_complex(j.at("a"));
      break;
    case FamilyKind::Ell2:
      detail::check_keys(j, {"name", "c", "p", "truncation"}, "family");
      spec.c = j.at("c").get<double>();
      spec.p = j.value("p", 1.0);
      spec.truncation = j.value("truncation", std::size_t{0});
      break;
    case FamilyKind::Mixed:
      detail::check_keys(j, {"name", "base", "atoms"}, "family");
      spec = detail::parse_base(j.value("base", nlohmann::json("lebesgue")), spec);
      for (const auto& a : j.at("atoms")) {
        detail::check_keys(a, {"angle", "mass"}, "atom");
        spec.atoms.push_back({wrap_angle(a.at("angle").get<double>()), a.at("mass").get<double>()});
      }
      break;
  }
  validate(spec);
  cfg.family = spec;
}

inline nlohmann::json family_to_json(const ExperimentConfig& cfg) {
  if (cfg.measure_path) return {{"name", "file"}, {"path", *cfg.measure_path}};
  const auto& s = cfg.family;
  nlohmann::json j{{"name", to_string(s.kind)}};
  switch (s.kind) {
    case FamilyKind::Lebesgue: break;
    case FamilyKind::BernsteinSzego: j["r"] = s.r; break;
    case FamilyKind::Geronimus: j["a"] = {s.a.real(), s.a.imag()}; break;
    case FamilyKind::Ell2:
      j["c"] = s.c;
      j["p"] = s.p;
      j["truncation"] = s.truncation;
      break;
    case FamilyKind::Mixed: {
      j["base"] = {{"name", to_string(s.base)}, {"r", s.r}};
      j["atoms"] = nlohmann::json::array();
      for (const auto& a : s.atoms) j["atoms"].push_back({{"angle", a.angle}, {"mass", a.mass}});
      break;
    }
  }
  return j;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  return {{"family", family_to_json(cfg)},         {"grid_size", cfg.grid_size},
          {"n_list", cfg.n_list},                  {"test_points", cfg.test_points},
          {"experiment", cfg.experiment},          {"output_path", cfg.output_path},
          {"delta_grid_size", cfg.delta_grid_size}, {"seed", cfg.seed}};
}

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.grid_size < 256 || (cfg.grid_size & (cfg.grid_size - 1)) != 0) {
    fail(ErrorKind::Config, "grid_size must be a power of two >= 256");
  }
  if (cfg.n_list.empty()) fail(ErrorKind::Config, "n_list must not be empty");
  const std::size_t limit = parameter_count(cfg.grid_size) - 1;
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    if (cfg.n_list[i] == 0) fail(ErrorKind::Config, "n_list entries must be positive");
    if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1]) fail(ErrorKind::Config, "n_list must be strictly increasing");
    if (cfg.n_list[i] > limit) {
      fail(ErrorKind::Config, "n_list entries must not exceed " + std::to_string(limit) + " for this grid_size");
    }
  }
  if (cfg.test_points.empty()) fail(ErrorKind::Config, "test_points must not be empty");
  for (double t : cfg.test_points) {
    if (!std::isfinite(t)) fail(ErrorKind::Config, "test_points must be finite angles");
  }
  if (cfg.experiment != "all" &&
      std::find(experiment_names().begin(), experiment_names().end(), cfg.experiment) == experiment_names().end()) {
    fail(ErrorKind::Config, "unknown experiment '" + cfg.experiment + "'");
  }
  if (cfg.delta_grid_size < 2) fail(ErrorKind::Config, "delta_grid_size must be at least 2");
  if (!cfg.measure_path) validate(cfg.family);
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::Config, "config must be a JSON object");
  ExperimentConfig cfg;
  try {
    detail::check_keys(j, {"family", "grid_size", "n_list", "test_points", "experiment", "output_path",
                           "delta_grid_size", "seed"},
                       "config");
    if (j.contains("family")) parse_family(j.at("family"), cfg);
    cfg.grid_size = j.value("grid_size", cfg.grid_size);
    if (j.contains("n_list")) cfg.n_list = j.at("n_list").get<std::vector<std::size_t>>();
    if (j.contains("test_points")) cfg.test_points = j.at("test_points").get<std::vector<double>>();
    cfg.experiment = j.value("experiment", cfg.experiment);
    cfg.output_path = j.value("output_path", cfg.output_path);
    cfg.delta_grid_size = j.value("delta_grid_size", cfg.delta_grid_size);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, e.what());
  }
  for (double& t : cfg.test_points) {
    if (std::isfinite(t)) t = wrap_angle(t);
  }
  validate(cfg);
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, path + ": " + e.what());
  }
  return parse_config(j);
}

/// The configured family; measure files are measure-first with parameters extracted.
inline Family build_family(const ExperimentConfig& cfg) {
  if (!cfg.measure_path) return build_family(cfg.family, cfg.grid_size);
  const auto mu = load_measure(*cfg.measure_path, true);
  Family fam{FamilySpec{}, "file:" + mu.family().value_or(*cfg.measure_path), false, mu, {}, std::nullopt, 0.0,
             std::nullopt};
  detail::extract_parameters(fam);
  return fam;
}

}  // namespace opuc

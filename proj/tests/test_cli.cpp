#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "opuc/config.hpp"
#include "opuc/experiment.hpp"
#include "opuc/io.hpp"
#include "oracles.hpp"

using nlohmann::json;
using opuc::cplx;
using opuc::ErrorKind;

namespace {

ErrorKind config_error(const json& j) {
  try {
    opuc::parse_config(j);
  } catch (const opuc::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "accepted " << j.dump();
  return ErrorKind::Io;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("opuclab-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

opuc::ExperimentConfig small_config(const json& family, const std::string& experiment = "all") {
  return opuc::parse_config(
      {{"family", family}, {"grid_size", 1024}, {"n_list", {8, 16, 32, 64}}, {"test_points", {1.0, 2.5}},
       {"experiment", experiment}, {"delta_grid_size", 16}});
}

}  // namespace

TEST(Lcg64, ReferenceSequence) {
  opuc::Lcg64 g(0);
  EXPECT_EQ(g.next(), 1442695040888963407ULL);
  EXPECT_EQ(g.next(), 1876011003808476466ULL);
  opuc::Lcg64 h(0);
  EXPECT_DOUBLE_EQ(h.uniform(), 0.07820865487829387);
  EXPECT_DOUBLE_EQ(h.uniform(), 0.10169876029679303);
  EXPECT_DOUBLE_EQ(h.uniform(), 0.6053233226252335);
  EXPECT_EQ(opuc::stream(42, 1).next(), 1966087269465466162ULL);
}

TEST(Lcg64, SamplersStayInRange) {
  opuc::Lcg64 g(99);
  for (int i = 0; i < 1000; ++i) {
    const double u = g.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LE(std::abs(g.disk(0.7)), 0.7);
    EXPECT_NEAR(std::abs(g.circle()), 1.0, 1e-15);
    EXPECT_LT(g.below(5), 5u);
  }
}

TEST(Config, DefaultsAndFamilyForms) {
  const auto d = opuc::parse_config(json::object());
  EXPECT_EQ(d.grid_size, 4096u);
  EXPECT_EQ(d.n_list, (std::vector<std::size_t>{16, 32, 64, 128, 256}));
  EXPECT_EQ(d.experiment, "all");
  EXPECT_EQ(d.family.kind, opuc::FamilyKind::Lebesgue);

  const auto bs = opuc::parse_config({{"family", "bernstein_szego(0.5)"}});
  EXPECT_EQ(bs.family.kind, opuc::FamilyKind::BernsteinSzego);
  EXPECT_EQ(bs.family.r, 0.5);
  const auto g1 = opuc::parse_config({{"family", "geronimus(0.1+0.2i)"}});
  EXPECT_EQ(g1.family.a, cplx(0.1, 0.2));
  const auto g2 = opuc::parse_config({{"family", {{"name", "geronimus"}, {"a", {0.1, -0.2}}}}});
  EXPECT_EQ(g2.family.a, cplx(0.1, -0.2));
  const auto e = opuc::parse_config({{"family", "ell2(0.5, 1)"}});
  EXPECT_EQ(e.family.c, 0.5);
  EXPECT_EQ(e.family.p, 1.0);
  const auto m = opuc::parse_config(
      {{"family", {{"name", "mixed"}, {"base", "bernstein_szego(0.5)"}, {"atoms", {{{"angle", 7.0}, {"mass", 0.2}}}}}}});
  EXPECT_EQ(m.family.base, opuc::FamilyKind::BernsteinSzego);
  ASSERT_EQ(m.family.atoms.size(), 1u);
  EXPECT_NEAR(m.family.atoms[0].angle, 7.0 - opuc::kTwoPi, 1e-15);
  const auto wrapped = opuc::parse_config({{"test_points", {-1.0}}});
  EXPECT_NEAR(wrapped.test_points[0], opuc::kTwoPi - 1.0, 1e-15);
}

TEST(Config, RoundTripThroughJson) {
  const auto cfg = small_config({{"name", "ell2"}, {"c", 0.4}, {"p", 0.9}, {"truncation", 16}});
  const auto back = opuc::parse_config(opuc::config_to_json(cfg));
  EXPECT_EQ(opuc::config_to_json(back), opuc::config_to_json(cfg));
}

TEST(Config, Errors) {
  EXPECT_EQ(config_error({{"grid_size", 1000}}), ErrorKind::Config);
  EXPECT_EQ(config_error({{"grid_size", 128}}), ErrorKind::Config);
  EXPECT_EQ(config_error({{"n_list", json::array()}}), ErrorKind::Config);
  EXPECT_EQ(config_error({{"n_list", {16, 8}}}), ErrorKind::Config);
  EXPECT_EQ(config_error({{"grid_size", 1024}, {"n_list", {200}}}), ErrorKind::Config);
  EXPECT_EQ(config_error({{"experiment", "nope"}}), ErrorKind::Config);
  EXPECT_EQ(config_error({{"delta_grid_size", 1}}), ErrorKind::Config);
  EXPECT_EQ(config_error({{"unknown_key", 1}}), ErrorKind::Config);
  EXPECT_EQ(config_error({{"family", "bernstein_szego(1.5)"}}), ErrorKind::Config);
  EXPECT_EQ(config_error({{"family", "bernstein_szego(0.5, 2)"}}), ErrorKind::Config);
  EXPECT_EQ(config_error({{"family", "cauchy(1)"}}), ErrorKind::Config);
  EXPECT_EQ(config_error({{"family", {{"name", "bernstein_szego"}, {"radius", 0.5}}}}), ErrorKind::Config);
  EXPECT_EQ(config_error({{"seed", "x"}}), ErrorKind::Config);
  EXPECT_THROW(opuc::load_config("/nonexistent/config.json"), opuc::Error);
}

TEST(Report, EveryInvariantAppearsOnceInAll) {
  const auto result = opuc::execute(small_config("bernstein_szego(0.5)"), true);
  std::multiset<std::string> ids;
  for (const auto& v : result.verdicts) ids.insert(v.id);
  for (const auto& inv : opuc::invariant_registry()) EXPECT_EQ(ids.count(inv.id), 1u) << inv.id;
  EXPECT_EQ(result.verdicts.size(), opuc::invariant_registry().size());
  const auto& r = result.report;
  for (const char* key : {"schema", "config", "family", "experiments", "tables", "verdicts", "summary", "runtime_seconds"}) {
    EXPECT_TRUE(r.contains(key)) << key;
  }
  EXPECT_EQ(r.at("tables").size(), opuc::experiment_names().size());
  for (const auto& name : opuc::experiment_names()) EXPECT_GT(r.at("tables").at(name).at("rows").get<std::size_t>(), 0u) << name;
  EXPECT_TRUE(result.ok);
}

TEST(Report, SingleExperimentSelectsItsInvariants) {
  const auto result = opuc::execute(small_config("lebesgue", "scattering"), true);
  ASSERT_EQ(result.tables.size(), 1u);
  EXPECT_EQ(result.tables[0].name, "scattering");
  for (const auto& v : result.verdicts) {
    EXPECT_TRUE(v.module == "scattering" || v.module == "cli") << v.id;
  }
}

TEST(Report, LebesgueVerifyPassesTightly) {
  const auto result = opuc::verify(opuc::parse_config({{"grid_size", 1024}, {"n_list", {16, 32, 64}}}));
  EXPECT_TRUE(result.ok);
  for (const auto& v : result.verdicts) {
    EXPECT_EQ(v.status, opuc::Status::Pass) << v.id << ": " << v.detail;
    EXPECT_LE(v.residual, 1e-10) << v.id;
  }
  EXPECT_TRUE(result.tables.empty());
}

TEST(Report, RunsAreDeterministic) {
  const auto cfg = small_config({{"name", "mixed"}, {"base", "lebesgue"}, {"atoms", {{{"angle", 0.0}, {"mass", 0.3}}}}});
  const auto a = scratch("det-a");
  const auto b = scratch("det-b");
  opuc::run(cfg, a);
  opuc::run(cfg, b);
  for (const auto& name : opuc::experiment_names()) {
    const auto fa = slurp(a / (name + ".csv"));
    EXPECT_FALSE(fa.empty()) << name;
    EXPECT_EQ(fa, slurp(b / (name + ".csv"))) << name;
  }
  const auto report = json::parse(slurp(a / "report.json"));
  EXPECT_EQ(report.at("schema"), opuc::kReportSchema);
}

TEST(Report, CsvHeadersAndRowCounts) {
  const auto cfg = small_config("bernstein_szego(0.5)");
  const auto dir = scratch("csv");
  opuc::run(cfg, dir);
  std::ifstream in(dir / "mnt.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "angle,n,cesaro,target,lower,upper,K_n,P_n,F_n");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, cfg.test_points.size() * cfg.n_list.size());
}

TEST(Report, FileFamily) {
  const auto dir = scratch("file");
  const auto mu = opuc::build_measure(oracle::bs_samples(0.5, 1024), {}, false, {opuc::kDefaultWeightFloor, "poisson", {}});
  opuc::save_measure(mu, (dir / "m.json").string());
  const auto cfg = small_config({{"name", "file"}, {"path", (dir / "m.json").string()}}, "mnt");
  const auto fam = opuc::build_family(cfg);
  EXPECT_EQ(fam.label, "file:poisson");
  EXPECT_NEAR(std::abs(fam.params[0] - 0.5), 0.0, 1e-12);
  const auto result = opuc::execute(cfg, true);
  EXPECT_TRUE(result.ok);
}

TEST(Report, GeronimusQuadratureLimitFailsHonestly) {
  // Grid moments of the gapped weight carry ~h^1.5 error, above the 1e-6 reconstruction bound.
  const auto result = opuc::verify(opuc::parse_config({{"family", "geronimus(0.1+0.1i)"}, {"grid_size", 1024},
                                                       {"n_list", {16, 32, 64}}}));
  bool found = false;
  for (const auto& v : result.verdicts) {
    if (v.id == "cli.family_cross_validation") {
      found = true;
      EXPECT_EQ(v.status, opuc::Status::Fail);
    }
  }
  EXPECT_TRUE(found);
  EXPECT_FALSE(result.ok);
}

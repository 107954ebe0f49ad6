// opuclab: config-driven experiments over measures on the unit circle.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "opuc/experiment.hpp"

namespace {

void print_verdicts(const opuc::RunResult& result) {
  for (const auto& v : result.verdicts) {
    std::cout << opuc::to_string(v.status) << ' ' << v.id << " residual=" << opuc::format_number(v.residual);
    if (!v.detail.empty()) std::cout << " (" << v.detail << ')';
    std::cout << '\n';
  }
  const auto& s = result.report.at("summary");
  std::cout << "pass " << s.at("pass") << ", fail " << s.at("fail") << ", not applicable " << s.at("not_applicable") << '\n';
}

void print_families() {
  std::cout << "lebesgue                      unit weight, all parameters zero\n"
               "bernstein_szego(r)            w = (1 - r^2)/|1 - r xi|^2, a = (r, 0, 0, ...), 0 <= r < 1\n"
               "geronimus(a)                  constant parameters a_n = a, |a| < 1; object form {\"a\": [re, im]}\n"
               "ell2(c, p)                    a_n = c/(n+1)^p for n < truncation (default N/128), 0 <= c < 1, p > 1/2\n"
               "mixed(base, atoms)            lebesgue or bernstein_szego(r) weight plus point masses;\n"
               "                              {\"name\": \"mixed\", \"base\": \"bernstein_szego(0.5)\", \"atoms\": [{\"angle\": 0, \"mass\": 0.3}]}\n"
               "file                          measure JSON {\"grid_size\", \"weight\", \"atoms\"}; {\"name\": \"file\", \"path\": ...}\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on orthogonal polynomials on the unit circle"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "run the configured experiment and write CSV tables plus report.json");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory (defaults to output_path from the config)");

  app.add_subcommand("families", "list builtin measure families");

  auto* verify = app.add_subcommand("verify", "run the invariant suite only");
  verify->add_option("--config", config_path, "experiment config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("families")) {
      print_families();
      return 0;
    }
    const auto cfg = opuc::load_config(config_path);
    if (app.got_subcommand("run")) {
      const auto result = opuc::run(cfg, out_dir.empty() ? cfg.output_path : out_dir);
      print_verdicts(result);
      return result.ok ? 0 : 1;
    }
    const auto result = opuc::verify(cfg);
    print_verdicts(result);
    return result.ok ? 0 : 1;
  } catch (const opuc::Error& e) {
    std::cerr << "opuclab: " << e.what() << '\n';
    return 2;
  }
}

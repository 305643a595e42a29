#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "contmeas/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Continuous-measurement simulations: classical, trajectory and master-equation runs"};
  std::string scenario, config_path, out_dir;
  std::uint64_t seed = 0;
  bool strict = false, dissipationless = false;
  app.add_option("scenario", scenario,
                 "langevin | fp | sse | lindblad | coherent | meter | cat | correspondence")
      ->required();
  app.add_option("--config", config_path, "JSON config file; omitted keys take defaults");
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  auto* out_opt = app.add_option("--out", out_dir, "output root (a run directory is created inside)");
  app.add_flag("--strict", strict, "treat regime warnings as errors");
  app.add_flag("--dissipationless", dissipationless, "drop friction and momentum noise (sse, lindblad)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    contmeas::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = contmeas::load_config(config_path);
    cfg.scenario = scenario;
    if (*seed_opt) cfg.seed = seed;
    if (*out_opt) cfg.output_dir = out_dir;
    cfg.strict = cfg.strict || strict;
    cfg.dissipationless = cfg.dissipationless || dissipationless;

    const contmeas::ScenarioResult res = contmeas::run_scenario(cfg);
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << res.run_dir.string() << "\n";
    if (res.comparison) {
      for (const auto& r : res.comparison->rows)
        std::printf("%-10s %s  max|dev| %.3e  max z %.2f  (%s)\n", r.name.c_str(),
                    r.pass ? "PASS" : "FAIL", r.max_abs_deviation, r.max_z, r.tolerance.c_str());
    }
    return res.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

// ricciot --config <path> --experiment <name> --out <dir> [--seed S] [--resolution N]

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ricciot/errors.hpp"
#include "ricciot/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Monotonicity experiments for optimal transport under evolving metrics"};
  std::string config_path, experiment, out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> resolution;
  bool study_only = false;
  app.add_option("--config", config_path, "YAML experiment configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--experiment", experiment, "experiment name (overrides the config)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--resolution", resolution, "cloud size N (overrides the config)");
  app.add_flag("--resolution-study", study_only, "print the convergence table only");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ricciot::kExitConfigError;
  }

  ricciot::ExperimentConfig config;
  try {
    config = ricciot::load_config(config_path);
    if (!experiment.empty()) config.experiment = ricciot::experiment_from_string(experiment);
    if (seed) config.seed = *seed;
    if (resolution) config.N = *resolution;
    if (study_only) {
      const auto table = ricciot::resolution_study(config);
      std::cout << "N";
      for (std::size_t s = 0; s < table.increment_error.size(); ++s) std::cout << ",final_value_" << s;
      std::cout << '\n';
      for (std::size_t r = 0; r < table.resolutions.size(); ++r) {
        std::cout << table.resolutions[r];
        for (const auto& series : table.series[r]) std::cout << ',' << series.back();
        std::cout << '\n';
      }
      for (std::size_t s = 0; s < table.tol_mono.size(); ++s) {
        std::cout << "series " << s << ": tol_mono " << table.tol_mono[s] << " order "
                  << table.observed_order[s] << '\n';
      }
      return 0;
    }
  } catch (const ricciot::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ricciot::kExitConfigError;
  }

  const ricciot::RunResult result = ricciot::run(config, out_dir);
  std::cout << result.summary << '\n';
  return result.exit_code;
}

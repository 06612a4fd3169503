#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gltforge/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Run a gltforge experiment described by a JSON config"};
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  bool validate_only = false;
  app.add_option("config", config, "Experiment config (JSON)")->required();
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--threads", threads, "Worker threads for sweeps (default: GLTFORGE_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", out, "Override the output path");
  app.add_flag("--validate", validate_only, "Only validate the config");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gltforge::kExitConfigError;
  }

  if (validate_only) {
    std::ifstream in(config);
    try {
      gltforge::validate_experiment(gltforge::Json::parse(in));
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return gltforge::kExitConfigError;
    }
    std::cerr << config << ": valid\n";
    return gltforge::kExitOk;
  }
  return gltforge::run_experiment_file(config, {seed, threads, out}, std::cout, std::cerr);
}

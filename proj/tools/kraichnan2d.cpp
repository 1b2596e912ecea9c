// Experiment runner for the stochastic 2D Euler / Kraichnan-noise laboratory.
//
//   kraichnan2d --experiment NAME [--config file.json] [--seed U64]
//               [--realizations INT] [--out DIR] [--threads INT]
//               [--key=value ...]
//
// Any --key=value pair overrides the corresponding config-file field.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "kraichnan/cli.hpp"

namespace {

nlohmann::json parse_override(const std::string& val) {
  // numeric if it parses fully, boolean for true/false, string otherwise
  if (val == "true") return true;
  if (val == "false") return false;
  try {
    std::size_t used = 0;
    const double d = std::stod(val, &used);
    if (used == val.size()) {
      if (d == static_cast<long long>(d) && val.find_first_of(".eE") == std::string::npos)
        return static_cast<long long>(d);
      return d;
    }
  } catch (...) {
  }
  return val;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic 2D Euler with Kraichnan transport noise"};
  app.allow_extras();

  std::string config_path, experiment, out_dir = "out";
  std::uint64_t seed = 0;
  int realizations = 0, threads = 2;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--experiment", experiment, "experiment name");
  app.add_option("--seed", seed, "64-bit seed");
  app.add_option("--realizations", realizations, "Monte Carlo realizations");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads");

  CLI11_PARSE(app, argc, argv);

  nlohmann::json params = nlohmann::json::object();
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "error: cannot read config " << config_path << "\n";
        return 2;
      }
      in >> params;
    }
    if (!experiment.empty()) params["experiment"] = experiment;
    if (seed != 0) params["seed"] = seed;
    if (realizations != 0) params["realizations"] = realizations;

    // --key=value overrides
    for (const std::string& extra : app.remaining()) {
      if (extra.rfind("--", 0) != 0) {
        std::cerr << "usage error: unrecognized argument '" << extra << "'\n";
        return 2;
      }
      const auto eq = extra.find('=');
      if (eq == std::string::npos) {
        std::cerr << "usage error: override '" << extra
                  << "' must have the form --key=value\n";
        return 2;
      }
      params[extra.substr(2, eq - 2)] = parse_override(extra.substr(eq + 1));
    }

    if (!params.contains("experiment")) {
      std::cerr << "usage error: missing required field 'experiment'\n";
      return 2;
    }
    kraichnan::ExperimentConfig cfg;
    cfg.experiment = params["experiment"].get<std::string>();
    cfg.params = params;
    cfg.out_dir = out_dir;
    return kraichnan::run_experiment(cfg, threads);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error (" << (params.contains("experiment")
                                   ? params["experiment"].get<std::string>()
                                   : "unknown")
              << "): " << e.what() << "\n";
    return 1;
  }
}

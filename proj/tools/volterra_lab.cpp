#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "vlab/config.hpp"
#include "vlab/error.hpp"
#include "vlab/experiments.hpp"
#include "vlab/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Path-dependent stochastic control experiments"};
  app.set_version_flag("--version", std::string(vlab::version()));
  std::string experiment, config_path, out_dir = ".";
  app.add_option("experiment", experiment, "experiment name")->required();
  app.add_option("--config", config_path, "TOML configuration file")->required();
  app.add_option("--out", out_dir, "output directory");

  // Optional overrides, applied on top of the file.
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string seed, n_list, phi, horizon, n_grid, n_paths, preset, reg_degree;
  const std::vector<std::pair<std::string, std::string*>> flags = {
      {"seed", &seed},       {"n-list", &n_list},   {"phi", &phi},
      {"horizon", &horizon}, {"n-grid", &n_grid},   {"n-paths", &n_paths},
      {"preset", &preset},   {"reg-degree", &reg_degree}};
  for (const auto& [name, dest] : flags) app.add_option("--" + name, *dest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : vlab::exit_validation;
  }

  try {
    vlab::apply_thread_env();
    const std::string exp = vlab::canonical_experiment(experiment);
    auto cfg = vlab::load_config(config_path, exp);
    for (const auto& [name, dest] : flags) {
      if (dest->empty()) continue;
      std::string key = name;
      for (auto& ch : key) if (ch == '-') ch = '_';
      vlab::override_value(cfg, key, *dest);
    }
    return vlab::run_experiment(cfg, out_dir, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return vlab::exit_validation;
  }
}

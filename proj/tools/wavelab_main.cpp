#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "runner/runner.hpp"
#include "wavelab/error.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw wavelab::runner::ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace wavelab::runner;

  CLI::App app{"wavelab: spectral solver and estimate checks for semilinear waves on the torus"};
  std::string mode_name;
  std::string config_path;
  std::vector<std::string> overrides;
  std::int64_t seed = -1;
  int threads = -1;
  app.add_option("mode", mode_name, "simulate | remainder | ensemble | inequalities | tails | report")->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--set", overrides, "Override a config leaf, e.g. --set galerkin.dt=5e-4");
  app.add_option("--seed", seed, "Master seed (overrides the config)")->check(CLI::NonNegativeNumber);
  app.add_option("--threads", threads, "Worker thread cap (0 = all cores)")->check(CLI::NonNegativeNumber);
  CLI11_PARSE(app, argc, argv);

  RunConfig config;
  try {
    config = load_config(read_file(config_path), parse_mode(mode_name), overrides);
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    if (threads >= 0) config.threads = static_cast<unsigned>(threads);
    validate(config);
  } catch (const ConfigError& e) {
    std::cerr << "wavelab: invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  }

  try {
    const RunOutcome out = run(config, std::cerr);
    if (out.exit_code == kExitBlowup) std::cerr << "wavelab: solver blowup: " << out.diagnostic << "\n";
    std::cout << out.manifest.string() << "\n";
    return out.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "wavelab: invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "wavelab: " << e.what() << "\n";
    return kExitFailure;
  }
}

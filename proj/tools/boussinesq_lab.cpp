#include "boussinesq/cli_runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

std::vector<int> parse_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument(item);
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = boussinesq::cli;
  CLI::App app{"Numerical experiments for the Boussinesq propagator acting on orthonormal systems"};
  app.set_version_flag("--version", cli::kToolVersion);

  cli::RunOptions options;
  std::string config;
  std::string out_dir = "boussinesq_out";
  std::uint64_t seed = 0;
  std::uint64_t seed2 = 0;
  int threads = 0;
  std::string N_list;

  app.add_option("subcommand", options.subcommand, "expsum, kernel, strichartz, maximal, converge, randomize, duality or all")
      ->required();
  auto* config_opt = app.add_option("--config", config, "JSON config file");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "seed for function randomization (ω)");
  auto* seed2_opt = app.add_option("--seed2", seed2, "seed for eigenvalue randomization (ω̃)");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (overrides BOUSSINESQ_THREADS)")
                          ->check(CLI::PositiveNumber);
  app.add_option("--override", options.overrides, "section.key=value, repeatable")->take_all();
  auto* N_opt = app.add_option("--N", N_list, "comma-separated N list for expsum and strichartz");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitBadConfig;
  }

  if (*config_opt) options.config_path = config;
  options.out_dir = out_dir;
  if (*seed_opt) options.seed = seed;
  if (*seed2_opt) options.seed2 = seed2;
  if (*threads_opt) options.threads = threads;
  if (*N_opt) {
    try {
      options.N_list = parse_list(N_list);
    } catch (const std::exception&) {
      std::cerr << "config error: --N expects a comma-separated list of integers\n";
      return cli::kExitBadConfig;
    }
  }
  return cli::run(options, std::cout, std::cerr);
}

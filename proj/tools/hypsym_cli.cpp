#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "hypsym/experiment.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

const char* describe(const std::string& name) {
  if (name == "decompose") return "Littlewood-Paley blocks and Besov norm of one coefficient";
  if (name == "zygmund") return "second-difference seminorm, Besov comparison and mollifier rates";
  if (name == "paradiff") return "Bony decomposition and paraproduct bounds for a pair of functions";
  if (name == "symmetrize") return "build the symmetrizer along a frequency ladder and check its invariants";
  if (name == "energy") return "integrate Fourier modes, track the energy and fit the loss of derivatives";
  if (name == "wave") return "compare the generic construction with the closed forms of the wave system";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on hyperbolic systems with (log-)Zygmund coefficients"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  for (const std::string& name : hypsym::subcommands()) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    sub->add_option("--config", config_path, "key = value configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (created if missing)");
    sub->add_option("--seed", seed, "overrides the seed of the configuration");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    hypsym::ExperimentConfig config = hypsym::load_config(config_path);
    if (seed) config.seed = *seed;
    const hypsym::RunResult result = hypsym::run_experiment(name, config, out_dir);
    for (const std::string& line : result.summary) std::cout << name << ": " << line << '\n';
    for (const auto& file : result.files) std::cout << "wrote " << file.string() << '\n';
    for (const std::string& line : result.failures) std::cerr << name << ": FAIL " << line << '\n';
    return result.ok() ? 0 : kExitFailure;
  } catch (const hypsym::ConfigError& e) {
    std::cerr << name << ": configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << name << ": " << e.what() << '\n';
    return kExitFailure;
  }
}

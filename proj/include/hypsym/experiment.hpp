#pragma once

// Batch experiments behind the command-line tool. A run reads one key-value
// configuration, writes versioned CSV files plus a gnuplot script into an
// output directory, and collects the in-run assertions that failed.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hypsym/mode_energy.hpp"
#include "hypsym/zygmund.hpp"

namespace hypsym {

struct CoefficientSpec {
  RoughKind kind = RoughKind::weierstrass;
  RoughParams params;
};

struct ExperimentConfig {
  std::string system = "wave";  ///< wave | block3
  CoefficientSpec coefficient;  ///< alpha for the wave system, d for block3, u for paradiff
  CoefficientSpec second;       ///< phi for block3, v for paradiff
  RegularityClass regularity;

  Index n = 1 << 12;
  double period = kTwoPi;
  double interval = 0.0;  ///< > 0: function on [0, interval], reflected grid

  std::vector<int> ladder{6, 7, 8, 9, 10, 11, 12, 13};
  std::vector<int> eps_levels{3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> p_values{1.0, 2.0, kInfinity};

  IntegratorOptions integrator;
  int mu = -1;
  int fit_samples = 5;
  Index trace_rows = 512;

  double beta_max = -1.0;       ///< negative: chosen from the coefficient
  bool expect_loss = false;     ///< require beta(t) to grow
  double gronwall_max = 64.0;
  double sup_r_ratio = 10.0;
  double norm_band = 16.0;
  double rate_factor = 32.0;

  std::uint64_t seed = 0;

  Grid grid() const;
  RealFunction primary() const;
  RealFunction secondary() const;
  CoefficientMatrices system_matrices() const;
  /// Throws ConfigError on inconsistent values (ladder not resolvable, ...).
  void validate(const std::string& subcommand) const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys, malformed
/// values and duplicates are ConfigErrors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunResult {
  std::vector<std::string> failures;  ///< one line per violated invariant
  std::vector<std::string> summary;   ///< human-readable findings
  std::vector<std::filesystem::path> files;
  bool ok() const { return failures.empty(); }
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand. ConfigError propagates; other library errors are
/// recorded as failures.
RunResult run_experiment(const std::string& subcommand, const ExperimentConfig& config,
                         const std::filesystem::path& out_dir);

}  // namespace hypsym

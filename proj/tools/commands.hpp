#pragma once

#include "run_spec.hpp"

#include <filesystem>
#include <iosfwd>
#include <string_view>

namespace nmt::cli {

/// Process exit codes shared by all subcommands.
enum ExitCode : int {
  kOk = 0,
  /// A validation threshold or a published-claim check failed.
  kCheckFailed = 1,
  kNotConverged = 2,
  kConfigError = 3,
  /// Numerical breakdown (step-size underflow) or an I/O failure.
  kRuntimeError = 4,
};

/// Integrates one chain, writes `<out>/<name>_trajectory.csv` and prints
/// eta with its uncertainty.
int cmd_simulate(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// Runs a named preset and writes summary.csv, claims.txt and (for fig2)
/// one trajectory file per cell into out_dir.
int cmd_preset(std::string_view name, unsigned workers, const std::filesystem::path& out_dir,
               const Overrides& overrides, std::ostream& out, std::ostream& err);

/// Runs the `sweep` section of a configuration.
int cmd_sweep(const RunSpec& spec, unsigned workers, std::ostream& out, std::ostream& err);

enum class ValidationLevel { Fast, Full };

/// Compares the block integrator against closed forms and the full-space
/// oracle and prints one line per check.
int cmd_validate(ValidationLevel level, std::ostream& out, std::ostream& err);

}  // namespace nmt::cli

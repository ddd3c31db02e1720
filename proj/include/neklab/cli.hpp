#pragma once

#include <ostream>
#include <string>

#include "neklab/config.hpp"

namespace neklab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBoundFailed = 1;
inline constexpr int kExitConfig = 2;

/// Maps a command name ("small-kappa", "check-conditions", ...) to its experiment type.
std::optional<ExperimentType> command_experiment(const std::string& command);

/// Runs one experiment, prints a table to `out` and writes the CSV/JSON artifacts into
/// cfg.output.directory. Returns 0 when every asserted bound holds and 1 otherwise.
/// Library errors caused by the inputs propagate as exceptions.
int run_experiment(const RunConfig& cfg, std::ostream& out);

/// Full command-line entry point, including argument parsing and error reporting.
int cli_main(int argc, char** argv);

}  // namespace neklab

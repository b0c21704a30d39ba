#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rcef/energy.hpp"
#include "rcef/simulator.hpp"

namespace rcef {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInternal = 3 };

/// Maps an exception escaping a subcommand to an exit code: malformed input
/// and missing data give kExitData, anything else kExitInternal.
int exit_code_for(const std::exception& error);

/// Deterministic identifier `<seed>-<16 hex digits>` built from the seed and
/// a hash of the normalized configuration.
std::string run_id(const ExperimentConfig& config);

/// Splits off the holdout, encodes it, learns a Chow-Liu tree and writes the
/// encoder as comment lines followed by the tree.
void cmd_structure(const ExperimentConfig& config, std::istream& csv, std::ostream& out);

/// Encodes the non-holdout rows with the encoder stored in the structure
/// file, runs the simulation and writes the results CSV.
std::vector<RoundRecord> cmd_run(const ExperimentConfig& config, std::istream& csv, std::istream& structure,
                                 std::ostream& out);

/// Whitespace separated integers; `#` starts a comment.
std::vector<std::int64_t> read_theta(std::istream& in);

/// Samples n rows from the model on `structure` and writes them as CSV
/// with the variable names as header.
void cmd_synth(std::istream& structure, std::istream& theta, int k, std::size_t n, std::uint64_t seed,
               std::ostream& out);

/// Scaling table for learner counts m_values, written as CSV.
std::vector<ScalingRow> cmd_energy(const EnergyParams& params, std::span<const double> m_values, std::ostream& out);

}  // namespace rcef

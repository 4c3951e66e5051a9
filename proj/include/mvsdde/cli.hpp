#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mvsdde/config.hpp"

namespace mvsdde::cli {

/// Process exit codes.
enum ExitCode : int { kSuccess = 0, kVerificationFailed = 1, kUsageError = 2, kNumericFailure = 3 };

/// Interacting-particle run: paths.csv, measure_t<time>.csv, moment.csv.
int cmd_simulate(const Config& config, std::uint64_t seed, const std::filesystem::path& out_dir);

/// Picard iteration: picard.csv, summary.json, final_flow_t<time>.csv.
int cmd_fixpoint(const Config& config, std::uint64_t seed, const std::filesystem::path& out_dir);

/// Assumption probes, moment bound and radial inequality: lyapunov.csv,
/// lipschitz.csv, moment.csv, radial.csv, summary.json. Returns 1 if a
/// declared constant is violated.
int cmd_verify(const Config& config, std::uint64_t seed, const std::filesystem::path& out_dir);

/// Prints W_{psi,V} between two measure files with 12 significant digits.
int cmd_transport(const std::string& file_a, const std::string& file_b, const std::string& psi_name,
                  const std::string& v_name, std::ostream& out);

/// Error-versus-parameter tables: convergence_h.csv or convergence_N.csv.
int cmd_convergence(const Config& config, std::uint64_t seed, const std::filesystem::path& out_dir);

/// Full command line: `<command> [--config PATH] [--seed U64] [--out DIR] [--threads N]`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mvsdde::cli

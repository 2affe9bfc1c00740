#pragma once

#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "rlos/config.hpp"

namespace rlos {

struct FomRow {
    double ies_m = 0.0;
    double length_m = 0.0;
    double d_m = 0.0;
    FomReport report;
};

struct ToleranceRow {
    double ies_m = 0.0;
    double length_m = 0.0;
    double d_m = 0.0;
    ToleranceResult result;
};

/// "# rlos <version> config_hash=<hex> seed=<n>"; first line of every CSV artifact.
std::string csv_preamble(const RunConfig& config);

// CSV bodies use '\n' line endings and '.' decimals regardless of locale.
std::string fom_csv(const RunConfig& config, std::span<const FomRow> rows);
std::string sweep_csv(const RunConfig& config, const ComplianceMap& map);
std::string tolerance_csv(const RunConfig& config, std::span<const ToleranceRow> rows);
std::string precode_csv(const RunConfig& config, const SumRateSurface& surface);

enum class ExitCode : int { success = 0, validation_error = 1, numerical_failure = 2 };

/// Runs one of fom, sweep, tolerance, precode and returns the CSV text.
std::string run_subcommand(std::string_view subcommand, const RunConfig& config, unsigned threads = 0);

/// run_subcommand, then writes <output_dir>/<subcommand>.csv (or `output_path`
/// when non-empty). Errors are reported on `log` and mapped to exit codes.
ExitCode dispatch(std::string_view subcommand, const RunConfig& config, const std::string& output_path,
                  std::ostream& log, unsigned threads = 0);

}  // namespace rlos

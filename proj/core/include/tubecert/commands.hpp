#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "tubecert/config.hpp"
#include "tubecert/strobo.hpp"

namespace tubecert::cli {

/// Process exit codes.
enum ExitCode : int { kProven = 0, kNotProven = 1, kFailure = 2 };

int exit_code(Conclusion c);

/// Writes verdict.txt, tube.csv and tube_x<j>.svg into cfg.out_dir.
/// Without `T` the period is chosen by scanning `T_scan`.
int cmd_analyze(const AnalysisConfig& cfg, std::ostream& log);

/// Oracle battery against the stored tube (cfg.tube_path, or
/// out_dir/tube.csv; built and stored first if absent). 0 iff every
/// simulated solution stays inside.
int cmd_simulate(const AnalysisConfig& cfg, std::size_t count, std::ostream& log);

/// Ranked period table on stdout and in out_dir/periods.csv.
int cmd_find_period(const AnalysisConfig& cfg, std::ostream& log);

/// Per-dimension SVGs of a stored tube with window i marked. The period comes
/// from `period` or, if absent, from verdict.txt beside the tube file.
int cmd_plot(const std::filesystem::path& tube_csv, std::size_t window, std::optional<double> period,
             const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace tubecert::cli

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tubecert/battery.hpp"
#include "tubecert/strobo.hpp"
#include "tubecert/system.hpp"

namespace tubecert {

struct PeriodScan {
  double t_min = 0.0;
  double t_max = 0.0;
  double t_step = 0.0;
};

/// Settings for one analysis run, read from a `key = value` file.
///
/// Required: x0, eps, tau, and either `system` (a built-in name) or `rhs`
/// (comma-separated expressions over x1..xn and p). One of `T` and `T_scan`
/// is needed by `analyze` and `find-period`.
struct AnalysisConfig {
  std::string name;
  std::string system;             // built-in: "vdp"
  std::vector<std::string> rhs;   // inline alternative
  std::size_t dimension = 0;
  State x0;
  double eps = 0.0;
  double tau = 0.0;
  double p0 = 0.0;
  double w_radius = 0.0;
  std::optional<double> period;
  std::optional<PeriodScan> scan;
  std::size_t i_max = 8;
  std::size_t grid = 9;
  double inflation = 0.1;
  double safety = 1.05;
  double margin = 0.0;
  std::optional<std::size_t> horizon;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  std::size_t battery_count = 500;
  std::size_t substeps = 10;
  std::size_t switch_steps = 10;
  std::optional<std::filesystem::path> tube_path;
  // Published values to print next to ours; not used by the analysis.
  std::optional<std::size_t> reference_inclusion_index;
  std::vector<double> reference_radii;

  [[nodiscard]] bool scan_mode() const { return !period.has_value() && scan.has_value(); }
};

/// Parses and validates. Errors name the offending key.
AnalysisConfig parse_config(std::string_view text);
AnalysisConfig load_config(const std::filesystem::path& path);

ParametricSystem build_family(const AnalysisConfig& cfg);
PropagationOptions propagation_options(const AnalysisConfig& cfg);
BatteryOptions battery_options(const AnalysisConfig& cfg);

}  // namespace tubecert

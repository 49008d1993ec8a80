#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tubecert/config.hpp"
#include "tubecert/strobo.hpp"

namespace tubecert {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_exact(double v);

/// Columns: step, t, center_1..center_n, radius, lambda, C, gamma.
/// Row 0 leaves the constant columns empty; row m+1 carries the constants
/// used for the step m -> m+1.
void write_tube_csv(std::ostream& out, const Tube& tube);

/// Centers and radii come back bit-exact. Only lambda, C and gamma of the
/// constants log are stored. tau is recovered from the t column of row 1.
Tube read_tube_csv(std::istream& in);

/// `key: value` lines.
void write_verdict(std::ostream& out, const Verdict& v, const AnalysisConfig* cfg = nullptr);

/// Reads back the `key: value` pairs of a verdict file.
std::map<std::string, std::string> read_key_values(std::istream& in);

struct PlotWindow {
  std::size_t index = 0;  // i: the window is [i k, (i+1) k]
  std::size_t k = 0;
};

/// SVG 1.1 time series of coordinate `dim` (0-based): the center curve, the
/// two borders center +- radius, the window delimiters and the extrema
/// markers m_plus / M_minus.
void write_tube_svg(std::ostream& out, const Tube& tube, std::size_t dim, const std::optional<PlotWindow>& window);

}  // namespace tubecert

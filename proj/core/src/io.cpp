#include "tubecert/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "tubecert/error.hpp"

namespace tubecert {

std::string format_exact(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_tube_csv(std::ostream& out, const Tube& tube) {
  if (tube.size() == 0) {
    throw Error("cannot write an empty tube");
  }
  const std::size_t n = tube.centers.front().size();
  out << "step,t";
  for (std::size_t j = 1; j <= n; ++j) {
    out << ",center_" << j;
  }
  out << ",radius,lambda,C,gamma\n";
  for (std::size_t m = 0; m < tube.size(); ++m) {
    out << m << ',' << format_exact(static_cast<double>(m) * tube.tau);
    for (double c : tube.centers[m]) {
      out << ',' << format_exact(c);
    }
    out << ',' << format_exact(tube.radii[m]);
    if (m > 0 && m - 1 < tube.constants_log.size()) {
      const BoundConstants& k = tube.constants_log[m - 1];
      out << ',' << format_exact(k.lambda) << ',' << format_exact(k.c) << ',' << format_exact(k.gamma);
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) {
      return out;
    }
    start = comma + 1;
  }
}

double parse_field(const std::string& s, std::size_t row) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw Error("tube CSV: bad number '" + s + "' in row " + std::to_string(row));
  }
  return v;
}

}  // namespace

Tube read_tube_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error("tube CSV: empty file");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  const auto header = split_csv(line);
  if (header.size() < 7 || header[0] != "step" || header[1] != "t") {
    throw Error("tube CSV: unexpected header");
  }
  const std::size_t n = header.size() - 6;
  Tube tube;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != header.size()) {
      throw Error("tube CSV: wrong column count in row " + std::to_string(row));
    }
    if (row == 1) {
      tube.tau = parse_field(f[1], row);
    }
    State c(n);
    for (std::size_t j = 0; j < n; ++j) {
      c[j] = parse_field(f[2 + j], row);
    }
    tube.centers.push_back(std::move(c));
    tube.radii.push_back(parse_field(f[2 + n], row));
    if (row > 0) {
      BoundConstants k;
      k.lambda = parse_field(f[3 + n], row);
      k.c = parse_field(f[4 + n], row);
      k.gamma = parse_field(f[5 + n], row);
      tube.constants_log.push_back(std::move(k));
    }
    ++row;
  }
  if (tube.size() == 0) {
    throw Error("tube CSV: no rows");
  }
  return tube;
}

void write_verdict(std::ostream& out, const Verdict& v, const AnalysisConfig* cfg) {
  out << "status: ok\n";
  if (cfg != nullptr && !cfg->name.empty()) {
    out << "name: " << cfg->name << '\n';
  }
  out << "conclusion: " << to_string(v.conclusion) << '\n';
  out << "period: " << format_exact(v.period) << '\n';
  out << "steps_per_period: " << v.steps_per_period << '\n';
  out << "inclusion_index: " << (v.inclusion_index ? std::to_string(*v.inclusion_index) : "none") << '\n';
  out << "exclusion_dim: " << (v.exclusion_dim ? std::to_string(*v.exclusion_dim) : "none") << '\n';
  out << "parameter_interval: [" << format_exact(v.parameter_interval.lo) << ", "
      << format_exact(v.parameter_interval.hi) << "]\n";
  out << "limit_cycle_note: " << (v.limit_cycle_note ? "true" : "false") << '\n';
  if (v.limit_cycle_note) {
    out << "limit_cycle: every solution converges to a limit cycle (Poincare-Bendixson, n = 2)\n";
  }
  for (std::size_t j = 0; j < v.extrema.size(); ++j) {
    out << "m_plus_" << j + 1 << ": " << format_exact(v.extrema[j].m_plus) << '\n';
    out << "M_minus_" << j + 1 << ": " << format_exact(v.extrema[j].M_minus) << '\n';
  }
  for (const Snapshot& s : v.snapshots) {
    out << "snapshot_" << s.index << ": center=(";
    for (std::size_t j = 0; j < s.ball.center.size(); ++j) {
      out << (j != 0 ? ", " : "") << format_exact(s.ball.center[j]);
    }
    out << ") radius=" << format_exact(s.ball.radius) << '\n';
  }
  out << "clamped_radicands: " << v.clamped << '\n';
  if (cfg != nullptr) {
    if (cfg->reference_inclusion_index) {
      out << "reference_inclusion_index: " << *cfg->reference_inclusion_index << '\n';
    }
    if (!cfg->reference_radii.empty()) {
      out << "reference_radii:";
      for (std::size_t j = 0; j < cfg->reference_radii.size(); ++j) {
        out << (j != 0 ? ", " : " ") << format_exact(cfg->reference_radii[j]);
      }
      out << '\n';
    }
  }
}

std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      continue;
    }
    std::string value = line.substr(colon + 1);
    value.erase(0, std::min(value.find_first_not_of(' '), value.size()));
    kv[line.substr(0, colon)] = value;
  }
  return kv;
}

namespace {

std::string fixed(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string fixed6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void write_tube_svg(std::ostream& out, const Tube& tube, std::size_t dim, const std::optional<PlotWindow>& window) {
  if (tube.size() == 0) {
    throw Error("cannot plot an empty tube");
  }
  if (dim >= tube.centers.front().size()) {
    throw Error("plot dimension out of range");
  }
  std::optional<CoordinateExtrema> ext;
  if (window) {
    ext = equilibrium_extrema(tube, window->index, window->k).at(dim);
  }

  constexpr double kWidth = 900.0;
  constexpr double kHeight = 420.0;
  constexpr double kLeft = 70.0;
  constexpr double kRight = 20.0;
  constexpr double kTop = 30.0;
  constexpr double kBottom = 45.0;
  constexpr std::size_t kMaxPoints = 3000;

  const double t_end = std::max(static_cast<double>(tube.size() - 1) * tube.tau, tube.tau);
  double lo = tube.centers[0][dim] - tube.radii[0];
  double hi = tube.centers[0][dim] + tube.radii[0];
  for (std::size_t m = 0; m < tube.size(); ++m) {
    lo = std::min(lo, tube.centers[m][dim] - tube.radii[m]);
    hi = std::max(hi, tube.centers[m][dim] + tube.radii[m]);
  }
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  auto px = [&](double t) { return kLeft + (kWidth - kLeft - kRight) * t / t_end; };
  auto py = [&](double y) { return kTop + (kHeight - kTop - kBottom) * (hi - y) / (hi - lo); };
  const std::size_t stride = std::max<std::size_t>(1, (tube.size() + kMaxPoints - 1) / kMaxPoints);

  auto polyline = [&](const char* color, double sign) {
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t m = 0; m < tube.size(); m += stride) {
      const double t = static_cast<double>(m) * tube.tau;
      out << fixed(px(t)) << ',' << fixed(py(tube.centers[m][dim] + sign * tube.radii[m])) << ' ';
    }
    const std::size_t last = tube.size() - 1;
    if (last % stride != 0) {
      out << fixed(px(static_cast<double>(last) * tube.tau)) << ','
          << fixed(py(tube.centers[last][dim] + sign * tube.radii[last]));
    }
    out << "\"/>\n";
  };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  // Axes.
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight << "\" y2=\""
      << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kHeight - kBottom
      << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 5; ++tick) {
    const double t = t_end * tick / 5.0;
    const double y = lo + (hi - lo) * tick / 5.0;
    out << "<text x=\"" << fixed(px(t)) << "\" y=\"" << kHeight - kBottom + 18 << "\" font-size=\"11\" "
        << "text-anchor=\"middle\">" << fixed6(t) << "</text>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(py(y) + 4) << "\" font-size=\"11\" "
        << "text-anchor=\"end\">" << fixed6(y) << "</text>\n";
  }
  out << "<text x=\"" << (kWidth + kLeft) / 2 << "\" y=\"" << kHeight - 6 << "\" font-size=\"12\" "
      << "text-anchor=\"middle\">t</text>\n";
  out << "<text x=\"14\" y=\"" << kTop - 10 << "\" font-size=\"12\">x" << dim + 1 << "</text>\n";

  polyline("green", 1.0);
  polyline("green", -1.0);
  polyline("red", 0.0);

  if (window && ext) {
    for (std::size_t m : {window->index * window->k, (window->index + 1) * window->k}) {
      const double x = px(static_cast<double>(m) * tube.tau);
      out << "<line x1=\"" << fixed(x) << "\" y1=\"" << kTop << "\" x2=\"" << fixed(x) << "\" y2=\""
          << kHeight - kBottom << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    }
    out << "<circle cx=\"" << fixed(px(static_cast<double>(ext->m_plus_step) * tube.tau)) << "\" cy=\""
        << fixed(py(ext->m_plus)) << "\" r=\"4\" fill=\"cyan\" stroke=\"black\"/>\n";
    out << "<circle cx=\"" << fixed(px(static_cast<double>(ext->M_minus_step) * tube.tau)) << "\" cy=\""
        << fixed(py(ext->M_minus)) << "\" r=\"4\" fill=\"gray\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop - 10 << "\" font-size=\"12\">m+ = " << fixed6(ext->m_plus)
        << ", M- = " << fixed6(ext->M_minus) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace tubecert

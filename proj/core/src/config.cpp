#include "tubecert/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "tubecert/error.hpp"
#include "tubecert/expr.hpp"

namespace tubecert {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    out.push_back(trim(std::string_view(s).substr(start, comma - start)));
    if (comma == std::string::npos) {
      break;
    }
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
    throw ConfigError(key, "expected a number, got '" + s + "'");
  }
  return v;
}

std::size_t to_count(const std::string& key, const std::string& s) {
  std::size_t v = 0;
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError(key, "expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

std::vector<double> to_doubles(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const std::string& item : split_list(s)) {
    out.push_back(to_double(key, item));
  }
  return out;
}

}  // namespace

AnalysisConfig parse_config(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const std::string body = trim(line);
    if (body.empty()) {
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(lineno), "empty key");
    }
    if (!kv.emplace(key, value).second) {
      throw ConfigError(key, "given twice");
    }
  }

  AnalysisConfig cfg;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) {
      return std::nullopt;
    }
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto require = [&](const std::string& key) {
    auto v = take(key);
    if (!v) {
      throw ConfigError(key, "missing required key");
    }
    return *v;
  };

  if (auto v = take("name")) {
    cfg.name = *v;
  }
  if (auto v = take("system")) {
    cfg.system = *v;
  }
  if (auto v = take("rhs")) {
    cfg.rhs = split_list(*v);
  }
  if (auto v = take("dimension")) {
    cfg.dimension = to_count("dimension", *v);
  }
  cfg.x0 = to_doubles("x0", require("x0"));
  cfg.eps = to_double("eps", require("eps"));
  cfg.tau = to_double("tau", require("tau"));
  if (auto v = take("p0")) {
    cfg.p0 = to_double("p0", *v);
  }
  if (auto v = take("w_radius")) {
    cfg.w_radius = to_double("w_radius", *v);
  }
  if (auto v = take("T")) {
    cfg.period = to_double("T", *v);
  }
  if (auto v = take("T_scan")) {
    const auto r = to_doubles("T_scan", *v);
    if (r.size() != 3) {
      throw ConfigError("T_scan", "expected 'min, max, step'");
    }
    cfg.scan = PeriodScan{r[0], r[1], r[2]};
  }
  if (auto v = take("i_max")) {
    cfg.i_max = to_count("i_max", *v);
  }
  if (auto v = take("grid")) {
    cfg.grid = to_count("grid", *v);
  }
  if (auto v = take("inflation")) {
    cfg.inflation = to_double("inflation", *v);
  }
  if (auto v = take("safety")) {
    cfg.safety = to_double("safety", *v);
  }
  if (auto v = take("margin")) {
    cfg.margin = to_double("margin", *v);
  }
  if (auto v = take("horizon")) {
    cfg.horizon = to_count("horizon", *v);
  }
  if (auto v = take("out")) {
    cfg.out_dir = *v;
  }
  if (auto v = take("seed")) {
    cfg.seed = to_count("seed", *v);
  }
  if (auto v = take("count")) {
    cfg.battery_count = to_count("count", *v);
  }
  if (auto v = take("substeps")) {
    cfg.substeps = to_count("substeps", *v);
  }
  if (auto v = take("switch_steps")) {
    cfg.switch_steps = to_count("switch_steps", *v);
  }
  if (auto v = take("tube")) {
    cfg.tube_path = *v;
  }
  if (auto v = take("reference_inclusion_index")) {
    cfg.reference_inclusion_index = to_count("reference_inclusion_index", *v);
  }
  if (auto v = take("reference_radii")) {
    cfg.reference_radii = to_doubles("reference_radii", *v);
  }
  if (!kv.empty()) {
    throw ConfigError(kv.begin()->first, "unknown key");
  }

  if (cfg.system.empty() == cfg.rhs.empty()) {
    throw ConfigError("system", "give exactly one of 'system' and 'rhs'");
  }
  if (!cfg.system.empty()) {
    if (cfg.system != "vdp") {
      throw ConfigError("system", "unknown built-in system '" + cfg.system + "'");
    }
    if (cfg.dimension != 0 && cfg.dimension != 2) {
      throw ConfigError("dimension", "vdp has dimension 2");
    }
    cfg.dimension = 2;
  } else if (cfg.dimension == 0) {
    cfg.dimension = cfg.rhs.size();
  } else if (cfg.dimension != cfg.rhs.size()) {
    throw ConfigError("dimension", "does not match the number of rhs expressions");
  }
  for (const std::string& e : cfg.rhs) {
    try {
      (void)Expr::parse(e, cfg.dimension);
    } catch (const ParseError& err) {
      throw ConfigError("rhs", "'" + e + "': " + err.what());
    }
  }
  if (cfg.x0.size() != cfg.dimension) {
    throw ConfigError("x0", "expected " + std::to_string(cfg.dimension) + " components");
  }
  if (!(cfg.tau > 0.0)) {
    throw ConfigError("tau", "must be positive");
  }
  if (!(cfg.eps >= 0.0)) {
    throw ConfigError("eps", "must be non-negative");
  }
  if (!(cfg.w_radius >= 0.0)) {
    throw ConfigError("w_radius", "must be non-negative");
  }
  if (cfg.period) {
    const double ratio = *cfg.period / cfg.tau;
    if (!(*cfg.period > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, std::round(ratio))) {
      throw ConfigError("T", "must be a positive integer multiple of tau");
    }
  }
  if (cfg.scan && (!(cfg.scan->t_min > 0.0) || cfg.scan->t_max < cfg.scan->t_min || !(cfg.scan->t_step > 0.0))) {
    throw ConfigError("T_scan", "needs 0 < min <= max and step > 0");
  }
  if (cfg.grid < 2) {
    throw ConfigError("grid", "needs at least 2 samples");
  }
  if (!(cfg.inflation >= 0.0)) {
    throw ConfigError("inflation", "must be non-negative");
  }
  if (!(cfg.safety >= 1.0)) {
    throw ConfigError("safety", "must be at least 1");
  }
  if (!(cfg.margin >= 0.0)) {
    throw ConfigError("margin", "must be non-negative");
  }
  if (cfg.substeps == 0) {
    throw ConfigError("substeps", "must be positive");
  }
  if (cfg.switch_steps == 0) {
    throw ConfigError("switch_steps", "must be positive");
  }
  return cfg;
}

AnalysisConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open config " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ParametricSystem build_family(const AnalysisConfig& cfg) {
  if (cfg.system == "vdp") {
    return van_der_pol();
  }
  return ParametricSystem::from_strings(cfg.name.empty() ? "inline" : cfg.name, cfg.rhs);
}

PropagationOptions propagation_options(const AnalysisConfig& cfg) {
  PropagationOptions opts;
  opts.estimation.grid = cfg.grid;
  opts.estimation.safety = cfg.safety;
  opts.inflation = cfg.inflation;
  return opts;
}

BatteryOptions battery_options(const AnalysisConfig& cfg) {
  BatteryOptions opts;
  opts.count = cfg.battery_count;
  opts.seed = cfg.seed;
  opts.substeps = cfg.substeps;
  opts.switch_steps = cfg.switch_steps;
  return opts;
}

}  // namespace tubecert

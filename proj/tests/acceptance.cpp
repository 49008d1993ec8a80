// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if
// all eight pass. Extra "info" lines carry the numbers behind each verdict.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tubecert/battery.hpp"
#include "tubecert/bounds.hpp"
#include "tubecert/commands.hpp"
#include "tubecert/config.hpp"
#include "tubecert/integrate.hpp"
#include "tubecert/io.hpp"
#include "tubecert/strobo.hpp"
#include "vdp_reference.hpp"

using namespace tubecert;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs{TUBECERT_CONFIG_DIR};
const char* const kVdpConfigs[] = {"vdp_p11.cfg", "vdp_p04.cfg", "vdp_p19.cfg"};

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
  std::cout << "criterion " << id << " [" << title << "] " << (pass ? "PASS" : "FAIL") << ": " << detail << std::endl;
  if (!pass) {
    ++failures;
  }
}

void info(const std::string& line) { std::cout << "  info: " << line << std::endl; }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tubecert_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string fmt(double v) { return format_exact(v); }

void euler_centers() {
  double worst = 0.0;
  for (const auto& c : vdp_reference::kCases) {
    const auto sys = lift(van_der_pol(), c.p0, 0.0);
    const auto k = steps_per_period(c.period, 1e-3);
    const auto tr = euler_trajectory(sys, {vdp_reference::kX0[0], vdp_reference::kX0[1]}, 1e-3, 5 * k);
    for (std::size_t j = 1; j <= 5; ++j) {
      for (std::size_t d = 0; d < 2; ++d) {
        worst = std::max(worst, std::abs(tr.states[j * k][d] - c.centers[j - 1][d]));
      }
    }
  }
  report(1, "euler-centers", worst <= 1e-6, "15 published centers, max coordinate error " + fmt(worst) + " (tol 1e-6)");
}

void radius_property() {
  bool all = true;
  std::ostringstream detail;
  for (const char* name : kVdpConfigs) {
    const auto cfg = load_config(kConfigs / name);
    const auto sys = lift(build_family(cfg), cfg.p0, cfg.w_radius);
    const std::size_t k = steps_per_period(*cfg.period, cfg.tau);
    const std::size_t horizon = (cfg.i_max + 2) * k;
    std::string ref = "published i=" + std::to_string(cfg.reference_inclusion_index.value_or(0)) + " radii";
    for (double r : cfg.reference_radii) {
      ref += " " + fmt(r);
    }
    try {
      const Tube t = build_tube(sys, cfg.x0, cfg.eps, cfg.tau, horizon, propagation_options(cfg));
      const Verdict v = assess(t, k, cfg.i_max, sys.parameter_interval(), cfg.margin);
      const bool ok = v.inclusion_index && *v.inclusion_index <= 8;
      all = all && ok;
      std::string radii;
      for (const auto& s : v.snapshots) {
        radii += " " + fmt(s.ball.radius);
      }
      info(std::string(name) + ": finite radii, inclusion index " +
           (v.inclusion_index ? std::to_string(*v.inclusion_index) : "none") + ", radii at jT" + radii + "; " + ref);
      detail << name << (ok ? " ok; " : " no inclusion; ");
    } catch (const TubeBlowUp& e) {
      all = false;
      const Tube& p = e.partial();
      double lam_min = p.constants_log.empty() ? 0.0 : p.constants_log.front().lambda;
      for (const auto& kc : p.constants_log) {
        lam_min = std::min(lam_min, kc.lambda);
      }
      info(std::string(name) + ": radius overflow at step " + std::to_string(e.step()) + " (t = " +
           fmt(static_cast<double>(e.step()) * cfg.tau) + "), last finite radius " + fmt(p.radii.back()) +
           ", smallest sampled lambda " + fmt(lam_min) + "; " + ref);
      detail << name << " blow-up at step " << e.step() << "; ";
    }
  }
  report(2, "radius-property", all, detail.str() + "need finite radii over (i_max+2)T and i <= 8");
}

struct Analyzed {
  std::string name;
  int code = -1;
  double seconds = 0.0;
  fs::path out;
};

std::vector<Analyzed> verdicts() {
  std::vector<Analyzed> out;
  bool all = true;
  const Interval expect[] = {{0.6, 1.6}, {0.2, 0.6}, {1.6, 2.2}};
  std::ostringstream detail;
  for (std::size_t c = 0; c < 3; ++c) {
    auto cfg = load_config(kConfigs / kVdpConfigs[c]);
    cfg.out_dir = scratch(cfg.name);
    std::ostringstream log;
    const auto t0 = std::chrono::steady_clock::now();
    const int code = cli::cmd_analyze(cfg, log);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back({cfg.name, code, secs, cfg.out_dir});

    std::ifstream vin(cfg.out_dir / "verdict.txt");
    const auto kv = read_key_values(vin);
    bool ok = code == 0 && secs <= 120.0;
    if (ok) {
      std::ostringstream want;
      want << "[" << fmt(expect[c].lo) << ", " << fmt(expect[c].hi) << "]";
      ok = kv.count("parameter_interval") && kv.at("parameter_interval") == want.str() &&
           kv.count("limit_cycle_note") && kv.at("limit_cycle_note") == "true";
    }
    all = all && ok;
    std::string what = log.str();
    while (!what.empty() && what.back() == '\n') {
      what.pop_back();
    }
    info(std::string(kVdpConfigs[c]) + ": exit " + std::to_string(code) + " in " + fmt(std::round(secs * 100) / 100) +
         " s; " + what);
    detail << kVdpConfigs[c] << " exit " << code << "; ";
  }
  report(3, "verdicts", all, detail.str() + "need exit 0, certified interval and limit_cycle_note=true");
  return out;
}

void soundness(const std::vector<Analyzed>& runs) {
  std::size_t proven = 0;
  bool all = true;
  for (const auto& r : runs) {
    if (r.code != 0) {
      continue;
    }
    ++proven;
    auto cfg = load_config(kConfigs / (r.name + ".cfg"));
    const auto sys = lift(build_family(cfg), cfg.p0, cfg.w_radius);
    std::ifstream in(r.out / "tube.csv");
    const Tube t = read_tube_csv(in);
    BatteryOptions opts = battery_options(cfg);
    opts.count = 500;
    const auto rep = run_oracle_battery(sys, t, opts);
    all = all && rep.passed();
    info(r.name + ": " + std::to_string(rep.violations) + " violations over 500 simulations");
  }

  // the battery itself, on tubes that do exist
  {
    const auto cfg = load_config(kConfigs / "contraction.cfg");
    const auto sys = lift(build_family(cfg), cfg.p0, cfg.w_radius);
    const Tube t = build_tube(sys, cfg.x0, cfg.eps, cfg.tau, 4000, propagation_options(cfg));
    BatteryOptions opts;
    opts.count = 500;
    const auto rep = run_oracle_battery(sys, t, opts);
    info("contraction tube (4000 steps): " + std::to_string(rep.violations) + " violations over 500 simulations");
  }
  for (const char* name : kVdpConfigs) {
    const auto cfg = load_config(kConfigs / name);
    const auto sys = lift(build_family(cfg), cfg.p0, cfg.w_radius);
    const Tube t = build_tube(sys, cfg.x0, cfg.eps, cfg.tau, 250, propagation_options(cfg));
    BatteryOptions opts = battery_options(cfg);
    opts.count = 500;
    const auto rep = run_oracle_battery(sys, t, opts);
    info(std::string(name) + " tube prefix (250 steps, radius " + fmt(t.radii.back()) + "): " +
         std::to_string(rep.violations) + " violations over 500 simulations");
  }
  const bool pass = proven == runs.size() && all;
  report(4, "soundness", pass,
         std::to_string(proven) + " of " + std::to_string(runs.size()) +
             " configurations have a proven verdict to check; every proven tube needs zero violations");
}

void extrema(const std::vector<Analyzed>& runs) {
  const auto& ref = vdp_reference::kCases[0];
  const Analyzed& r = runs.front();
  std::ifstream vin(r.out / "verdict.txt");
  const auto kv = read_key_values(vin);
  if (!kv.count("m_plus_1") || !kv.count("M_minus_1")) {
    report(5, "exclusion-margin", false,
           r.name + " produced no extrema (status " + (kv.count("status") ? kv.at("status") : "?") +
               "); published m+ = " + fmt(ref.m_plus) + ", M- = " + fmt(ref.M_minus));
    return;
  }
  const double mp = std::stod(kv.at("m_plus_1"));
  const double mm = std::stod(kv.at("M_minus_1"));
  const bool ok = mp < mm && std::abs(mp - ref.m_plus) <= 0.05 && std::abs(mm - ref.M_minus) <= 0.05;
  report(5, "exclusion-margin", ok,
         "m+ = " + fmt(mp) + ", M- = " + fmt(mm) + " vs published " + fmt(ref.m_plus) + " / " + fmt(ref.M_minus));
}

RadiusParams params(double eps, double w_extent, double c, double lambda, double gamma) {
  RadiusParams p;
  p.eps = eps;
  p.w_extent = w_extent;
  p.constants.c = c;
  p.constants.lambda = lambda;
  p.constants.gamma = gamma;
  return p;
}

void formula_suite() {
  std::size_t bad = 0;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  for (double lam : {-2.0, 0.0, 2.0}) {
    for (double eps : {0.0, 0.2, 3.0}) {
      const auto p = params(eps, 0.4, 1.3, lam, 0.7);
      bad += std::abs(delta_no_uncertainty(p, 0.0) - eps) > 1e-12 * std::max(1.0, eps);
      bad += std::abs(delta_with_uncertainty(p, 0.0) - eps) > 1e-12 * std::max(1.0, eps);
    }
  }
  const std::size_t after_zero = bad;

  for (int k = 0; k < 1000; ++k) {
    const double lam = (u(rng) - 0.5) * 6.0;
    const double C = 3.0 * u(rng);
    const double g = 2.0 * u(rng);
    const double t = 0.1 * u(rng);
    const double e1 = u(rng);
    const double e2 = e1 + u(rng);
    const double W1 = u(rng);
    const double W2 = W1 + u(rng);
    bad += delta_with_uncertainty(params(e1, W1, C, lam, g), t) > delta_with_uncertainty(params(e2, W1, C, lam, g), t);
    bad += delta_with_uncertainty(params(e1, W1, C, lam, g), t) > delta_with_uncertainty(params(e1, W2, C, lam, g), t);
  }
  const std::size_t after_mono = bad;

  for (int k = 0; k < 20; ++k) {
    const auto p = params(u(rng), 0.0, 3.0 * u(rng), -(0.01 + 3.0 * u(rng)), 2.0 * u(rng));
    const double t = 1e-3 + 0.5 * u(rng);
    const double a = delta_with_uncertainty(p, t);
    const double b = delta_no_uncertainty(p, t);
    bad += std::abs(a - b) > 1e-12 * std::max(a, b);
  }
  const std::size_t after_reduce = bad;

  // dx/dt = -x + w, w in [-0.1, 0.1], eps = 0.1: exact error against the Euler step
  const auto sys = UncertainSystem::from_strings({"-x1 + w"}, 0.1);
  double tightest = 1e300;
  for (double x0 : {-2.0, -0.3, 0.0, 0.05, 1.0, 3.0}) {
    const std::vector<double> xs{x0};
    RadiusParams p;
    p.eps = 0.1;
    p.w_extent = 0.2;
    p.constants = estimate_constants(sys, Box::point(xs));
    for (double t : {0.0025, 0.005, 0.01}) {
      double worst = 0.0;
      for (int k = 0; k <= 200; ++k) {
        const double w = -0.1 + 0.2 * k / 200.0;
        for (double y0 : {x0 - 0.1, x0 + 0.1}) {
          worst = std::max(worst, std::abs(w + (y0 - w) * std::exp(-t) - (x0 - t * x0)));
        }
      }
      const double d = delta_with_uncertainty(p, t);
      bad += d < worst;
      tightest = std::min(tightest, d - worst);
    }
  }
  std::ostringstream detail;
  detail << "t=0 failures " << after_zero << ", monotonicity failures " << after_mono - after_zero
         << " of 2000, zero-extent reduction failures " << after_reduce - after_mono
         << " of 20, domination failures " << bad - after_reduce << " of 18 (smallest margin " << fmt(tightest) << ")";
  report(6, "formula-suite", bad == 0, detail.str());
}

void derivatives() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  std::size_t systems = 0;
  for (const char* name : {"vdp_p11.cfg", "vdp_p04.cfg", "vdp_p19.cfg", "contraction.cfg", "harmonic.cfg"}) {
    const auto cfg = load_config(kConfigs / name);
    const auto sys = lift(build_family(cfg), cfg.p0, cfg.w_radius);
    const std::size_t n = sys.dimension();
    ++systems;
    for (int s = 0; s < 100; ++s) {
      State x(n);
      for (std::size_t d = 0; d < n; ++d) {
        x[d] = cfg.x0[d] + u(rng);
      }
      const double w = cfg.w_radius * u(rng) / 2.0;
      const Matrix J = sys.jacobian(x, w);
      const auto g = sys.dw_gradient(x, w);
      auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); };
      for (std::size_t c = 0; c <= n; ++c) {
        State xp = x;
        State xm = x;
        double wp = w;
        double wm = w;
        const double h = 1e-6;
        if (c < n) {
          xp[c] += h;
          xm[c] -= h;
        } else {
          wp += h;
          wm -= h;
        }
        const State fp = sys.eval(xp, wp);
        const State fm = sys.eval(xm, wm);
        for (std::size_t r = 0; r < n; ++r) {
          const double fd = (fp[r] - fm[r]) / (2.0 * h);
          worst = std::max(worst, rel(c < n ? J(r, c) : g[r], fd));
        }
      }
    }
  }
  report(7, "derivatives", worst <= 1e-5,
         std::to_string(systems) + " bundled systems x 100 points, max relative disagreement " + fmt(worst) +
             " (tol 1e-5)");
}

void negative_control() {
  auto cfg = load_config(kConfigs / "contraction.cfg");
  cfg.out_dir = scratch("contraction");
  std::ostringstream log;
  const int code = cli::cmd_analyze(cfg, log);
  std::ifstream vin(cfg.out_dir / "verdict.txt");
  const auto kv = read_key_values(vin);
  const std::string concl = kv.count("conclusion") ? kv.at("conclusion") : "?";
  const std::string idx = kv.count("inclusion_index") ? kv.at("inclusion_index") : "?";
  report(8, "negative-control", code == 1 && concl == "INVARIANT_ONLY",
         "dx/dt = -x gives " + concl + " with inclusion index " + idx + ", exit " + std::to_string(code));
}

}  // namespace

int main() {
  euler_centers();
  radius_property();
  const auto runs = verdicts();
  soundness(runs);
  extrema(runs);
  formula_suite();
  derivatives();
  negative_control();
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}

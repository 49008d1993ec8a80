#include <benchmark/benchmark.h>

#include "tubecert/battery.hpp"
#include "tubecert/bounds.hpp"
#include "tubecert/strobo.hpp"

using namespace tubecert;

namespace {

const State kX0{1.70177925, -0.12841500};

UncertainSystem vdp() { return lift(van_der_pol(), 1.1, 0.5); }

void BM_Eval(benchmark::State& state) {
  const auto sys = vdp();
  State out(2);
  for (auto _ : state) {
    sys.eval_into(kX0, 0.1, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Eval);

void BM_Jacobian(benchmark::State& state) {
  const auto sys = vdp();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sys.jacobian(kX0, 0.1));
  }
}
BENCHMARK(BM_Jacobian);

void BM_EstimateConstants(benchmark::State& state) {
  const auto sys = vdp();
  const Box box = ball_enclosing_box(Ball(kX0, 0.2), 0.1);
  const EstimationOptions opts{static_cast<std::size_t>(state.range(0)), 1.05};
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_constants(sys, box, opts));
  }
}
BENCHMARK(BM_EstimateConstants)->Arg(5)->Arg(9)->Arg(17);

void BM_BuildTube(benchmark::State& state) {
  const auto sys = UncertainSystem::from_strings({"-x1", "-x2"}, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_tube(sys, {1.0, 0.0}, 0.5, 1e-3, 1000));
  }
}
BENCHMARK(BM_BuildTube)->Unit(benchmark::kMillisecond);

void BM_OracleBattery(benchmark::State& state) {
  const auto sys = vdp();
  const Tube tube = build_tube(sys, kX0, 0.2, 1e-3, 200);
  BatteryOptions opts;
  opts.count = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_oracle_battery(sys, tube, opts));
  }
}
BENCHMARK(BM_OracleBattery)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

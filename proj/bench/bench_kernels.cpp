#include <benchmark/benchmark.h>

#include "qmem/counting.hpp"
#include "qmem/eit.hpp"

namespace {

using namespace qmem;

ExecutionPolicy policy_of(const benchmark::State& state) {
  return state.range(1) ? ExecutionPolicy::Parallel : ExecutionPolicy::Serial;
}

void set_labels(benchmark::State& state) {
  state.SetLabel(state.range(1) ? "parallel" : "serial");
}

void BM_KernelL(benchmark::State& state) {
  const auto grid = FrequencyGrid::from_time_window(static_cast<std::size_t>(state.range(0)), -0.6e-6, 1.6e-6);
  const auto sc = LevelScheme::rb85_d1();
  const auto control = ControlProfile::step_off_on(3 * sc.Gamma_c, 10e-9, 510e-9, 30e-9, 1);
  const ComplexVector om = control.sample_time(grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel_L(grid, om, 0.5, 0.0, 1e-4 * sc.Gamma_cb(), policy_of(state)));
  }
  set_labels(state);
}
BENCHMARK(BM_KernelL)->ArgsProduct({{256, 512}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_ToFrequencyOperator(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto grid = FrequencyGrid::from_time_window(static_cast<std::size_t>(n), -0.6e-6, 1.6e-6);
  const ComplexMatrix a = ComplexMatrix::Random(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(to_frequency_operator(a, grid, policy_of(state)));
  set_labels(state);
}
BENCHMARK(BM_ToFrequencyOperator)->ArgsProduct({{256, 512}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Matvec(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const ComplexMatrix a = ComplexMatrix::Random(n, n);
  const ComplexVector x = ComplexVector::Random(n);
  for (auto _ : state) benchmark::DoNotOptimize(matvec(a, x, policy_of(state)));
  set_labels(state);
}
BENCHMARK(BM_Matvec)->ArgsProduct({{512, 1024}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_CountingTrials(benchmark::State& state) {
  CountingConfig c;
  c.s = 0.12;
  c.epsilon_1 = 0.039;
  c.epsilon_2 = c.epsilon_3 = 0.15;
  c.trials = static_cast<std::uint64_t>(state.range(0));
  c.seed = 7;
  for (auto _ : state) benchmark::DoNotOptimize(accumulate_trials(c, policy_of(state)));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
  set_labels(state);
}
BENCHMARK(BM_CountingTrials)->ArgsProduct({{1 << 18}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

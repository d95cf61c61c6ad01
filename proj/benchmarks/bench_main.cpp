#include "ipower/correlations.hpp"
#include "ipower/estimation.hpp"
#include "ipower/probes.hpp"
#include "ipower/sampling.hpp"

#include <benchmark/benchmark.h>

using namespace ipower;

namespace {

qmat::DensityMatrix random_state() {
  sampling::Rng rng(2024);
  return sampling::random_mixed_state({2, 2}, 4, rng);
}

void BM_Qfi(benchmark::State& state) {
  const auto rho = random_state();
  const auto h = probes::black_box_setting(2);
  for (auto _ : state) benchmark::DoNotOptimize(correlations::qfi(rho, h));
}
BENCHMARK(BM_Qfi);

void BM_IpClosedForm(benchmark::State& state) {
  const auto rho = random_state();
  for (auto _ : state) benchmark::DoNotOptimize(correlations::ip_closed_form(rho));
}
BENCHMARK(BM_IpClosedForm);

void BM_IpOracle(benchmark::State& state) {
  const auto rho = random_state();
  const sphere::Grid grid{static_cast<int>(state.range(0)), 2 * static_cast<int>(state.range(0)), false};
  for (auto _ : state) benchmark::DoNotOptimize(correlations::ip_oracle(rho, grid).value);
}
BENCHMARK(BM_IpOracle)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Lqu(benchmark::State& state) {
  const auto rho = random_state();
  for (auto _ : state) benchmark::DoNotOptimize(correlations::lqu(rho));
}
BENCHMARK(BM_Lqu);

void BM_Sld(benchmark::State& state) {
  const auto rho = random_state();
  const auto h = probes::black_box_setting(1);
  for (auto _ : state) benchmark::DoNotOptimize(correlations::sld(rho, h, 0.4).eigenvalues);
}
BENCHMARK(BM_Sld);

void BM_RunExperiment(benchmark::State& state) {
  estimation::ExperimentConfig config;
  config.probe = probes::q_probe(0.5);
  config.setting = 2;
  for (auto _ : state) benchmark::DoNotOptimize(estimation::run_experiment(config).phi_hat_mean);
}
BENCHMARK(BM_RunExperiment)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "leolink/channel.hpp"
#include "leolink/montecarlo.hpp"
#include "leolink/special_functions.hpp"

using namespace leolink;

namespace {

const channel::SrFading kFading{10.1, 0.126, 0.825};

channel::DopplerSpec doppler() {
  channel::DopplerSpec d;
  d.f_scatter_max = 100.0;
  d.mean_aoa = 1.55;
  d.aoa_width = 24.2;
  return d;
}

void BM_Confluent1F1(benchmark::State& state) {
  const double x = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(special::confluent_1f1(10.1, 1.0, x));
}
BENCHMARK(BM_Confluent1F1)->Arg(1)->Arg(10)->Arg(100);

void BM_BesselI(benchmark::State& state) {
  const double x = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(special::bessel_i(2, x));
}
BENCHMARK(BM_BesselI)->Arg(1)->Arg(24)->Arg(200);

void BM_SrCdfQuadrature(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(channel::sr_cdf(kFading, 0.9));
}
BENCHMARK(BM_SrCdfQuadrature);

void BM_SrCdfClosedForm(benchmark::State& state) {
  const channel::SrFading f{5.0, 0.126, 0.825};
  for (auto _ : state) benchmark::DoNotOptimize(channel::sr_cdf_closed_form(f, 0.9));
}
BENCHMARK(BM_SrCdfClosedForm);

void BM_Lcr(benchmark::State& state) {
  const auto d = doppler();
  for (auto _ : state) benchmark::DoNotOptimize(channel::lcr(kFading, d, 0.3));
}
BENCHMARK(BM_Lcr);

void BM_GainSampler(benchmark::State& state) {
  montecarlo::Rng rng(1);
  montecarlo::SrGainSampler sampler(kFading);
  for (auto _ : state) benchmark::DoNotOptimize(sampler(rng));
}
BENCHMARK(BM_GainSampler);

void BM_StateFrequencies(benchmark::State& state) {
  const auto part = channel::make_partition(kFading, {0.0, 0.3, 0.9});
  for (auto _ : state) benchmark::DoNotOptimize(montecarlo::state_frequencies(kFading, part, 65536, 7));
}
BENCHMARK(BM_StateFrequencies)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

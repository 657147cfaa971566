#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "ccs/comb.hpp"
#include "ccs/harness.hpp"
#include "ccs/oscillator.hpp"
#include "ccs/qam.hpp"
#include "ccs/rxdsp.hpp"
#include "ccs/transceiver.hpp"

using namespace ccs;

namespace {

std::vector<std::complex<double>> symbols(std::size_t n) {
  return qam::map_qam(qam::random_bits(6 * n, 1), 64);
}

void BM_SynthFreqNoise(benchmark::State& state) {
  osc::OscillatorSpec spec{0.3, 1e5, 10.0, 0.0};
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(osc::synth_freq_noise(spec, n, 1e9, 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SynthFreqNoise)->Arg(1 << 18)->Arg(1 << 21);

void BM_RrcShape(benchmark::State& state) {
  txrx::ModemConfig cfg;
  const auto sym = symbols(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(txrx::rrc_shape(sym, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RrcShape)->Arg(1 << 14)->Arg(1 << 17);

void BM_MatchedFilter(benchmark::State& state) {
  txrx::ModemConfig cfg;
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto shaped = txrx::rrc_shape(symbols(n), cfg);
  const std::size_t delay = static_cast<std::size_t>(cfg.rrc_span_symbols * cfg.sps);
  for (auto _ : state)
    benchmark::DoNotOptimize(rxdsp::matched_filter_downsample(shaped, cfg, delay, n));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MatchedFilter)->Arg(1 << 14)->Arg(1 << 17);

void BM_FiberRoundTrip(benchmark::State& state) {
  txrx::ModemConfig cfg;
  txrx::FiberConfig fiber;
  const auto shaped = txrx::rrc_shape(symbols(static_cast<std::size_t>(state.range(0))), cfg);
  for (auto _ : state)
    benchmark::DoNotOptimize(rxdsp::cd_compensate(txrx::propagate_fiber(shaped, fiber), fiber));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(shaped.size()));
}
BENCHMARK(BM_FiberRoundTrip)->Arg(1 << 14)->Arg(1 << 17);

void BM_DdPll(benchmark::State& state) {
  const auto con = qam::Constellation::square(64);
  const auto tx = symbols(static_cast<std::size_t>(state.range(0)));
  rxdsp::PllConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        rxdsp::dd_pll(tx, cfg, con, std::span(tx).first(std::size_t{256})));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DdPll)->Arg(1 << 14)->Arg(1 << 17);

void BM_FmNoisePsd(benchmark::State& state) {
  osc::OscillatorSpec spec{10.0, 0.0, 1.0, 0.0};
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto field = osc::cw_field(spec, osc::synth_phase(spec, n, 1e9, 3));
  for (auto _ : state) benchmark::DoNotOptimize(metrology::fm_noise_psd(field));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FmNoisePsd)->Arg(1 << 18)->Arg(1 << 21);

void BM_FullChannel(benchmark::State& state) {
  auto cfg = harness::ExperimentConfig::defaults();
  cfg.n_symbols = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        harness::run_single_channel(cfg, 8, harness::CarrierMode::CombReferenced));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FullChannel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

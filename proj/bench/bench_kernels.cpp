// Serial reference kernels vs their OpenMP counterparts. The parallel
// kernels are bit-identical to the serial ones by construction, so the only
// interesting number here is the speedup.
#include <benchmark/benchmark.h>

#include <cstdint>

#include "uep/eesm.hpp"
#include "uep/phy.hpp"

namespace {

uep::McsProfile make_mcs(const char* name, int order, int bps, int num,
                         int den, double beta) {
  uep::McsProfile m;
  m.name = name;
  m.modulation_order = order;
  m.bits_per_symbol = bps;
  m.code_rate = {num, den};
  m.beta = beta;
  return m;
}

uep::BlockPartition mixed_partition(const uep::OfdmConfig& ofdm) {
  uep::BlockPartition part;
  for (int i = 0; i < ofdm.n_audio_subcarriers; ++i)
    part.audio_indices.push_back(i);
  for (int i = 0; i < ofdm.n_video_subcarriers; ++i)
    part.video_indices.push_back(ofdm.n_audio_subcarriers + i);
  part.audio_mcs = make_mcs("16QAM-2/3", 16, 4, 2, 3, 7.49);
  part.video_mcs = make_mcs("64QAM-3/4", 64, 6, 3, 4, 26.6);
  return part;
}

void bench_block_ber(benchmark::State& state, bool parallel) {
  const uep::OfdmConfig ofdm;
  const uep::BlockPartition part = mixed_partition(ofdm);
  uep::ChannelModel model;
  model.kind = uep::ChannelKind::rayleigh;
  model.n_taps = 8;
  const auto frames = static_cast<std::uint64_t>(state.range(0));

  for (auto _ : state) {
    const uep::BlockBerResult res =
        parallel ? uep::simulate_block_ber(ofdm, part, 15.0, frames, model, 1)
                 : uep::simulate_block_ber_serial(ofdm, part, 15.0, frames,
                                                  model, 1);
    benchmark::DoNotOptimize(res.audio.bit_errors + res.video.bit_errors);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames) *
                          ofdm.n_data_subcarriers());
}

void bench_awgn_ref(benchmark::State& state, bool parallel) {
  const uep::McsProfile mcs = make_mcs("16QAM-2/3", 16, 4, 2, 3, 7.49);
  std::vector<double> grid;
  for (double snr = -2.0; snr <= 32.0; snr += 1.0) grid.push_back(snr);
  const auto bits = static_cast<std::uint64_t>(state.range(0));

  for (auto _ : state) {
    const uep::AwgnRefTable table =
        parallel ? uep::generate_awgn_ref(mcs, grid, bits, 1)
                 : uep::generate_awgn_ref_serial(mcs, grid, bits, 1);
    benchmark::DoNotOptimize(table.points.front().ber);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(grid.size() * bits));
}

void BM_block_ber_serial(benchmark::State& state) {
  bench_block_ber(state, false);
}
void BM_block_ber_parallel(benchmark::State& state) {
  bench_block_ber(state, true);
}
void BM_awgn_ref_serial(benchmark::State& state) {
  bench_awgn_ref(state, false);
}
void BM_awgn_ref_parallel(benchmark::State& state) {
  bench_awgn_ref(state, true);
}

BENCHMARK(BM_block_ber_serial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_block_ber_parallel)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_awgn_ref_serial)->Arg(20000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_awgn_ref_parallel)->Arg(20000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

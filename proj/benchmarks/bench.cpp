#include <benchmark/benchmark.h>

#include "chm/bloch.hpp"
#include "chm/quadrature.hpp"
#include "chm/reparam.hpp"
#include "chm/whitham.hpp"

namespace {

const chm::WaveParams kWave{2.0, 0.3, 3.0};

void BM_Functionals(benchmark::State& st) {
  const int nodes = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(chm::functionals(kWave, nodes));
}
BENCHMARK(BM_Functionals)->Arg(64)->Arg(256);

void BM_Profile(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(chm::profile(kWave, n));
}
BENCHMARK(BM_Profile)->Arg(256)->Arg(1024);

void BM_WhithamExact(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(chm::whitham_matrix(kWave));
}
BENCHMARK(BM_WhithamExact);

void BM_WhithamFiniteDifference(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(chm::whitham_matrix(kWave, {chm::WhithamMethod::FiniteDifference}));
}
BENCHMARK(BM_WhithamFiniteDifference)->Unit(benchmark::kMillisecond);

void BM_KernelAndD0(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  const chm::WaveProfile w = chm::profile(kWave, 4 * N);
  const chm::Chart ch = chm::chart(kWave);
  for (auto _ : st) {
    const chm::ProfilePartials pp = chm::profile_partials(w, ch, chm::PartialsMethod::LinearSolve, N);
    const chm::OperatorSet ops = chm::assemble_all(w, N);
    const chm::KernelBasis b = chm::kernel_basis(w, ch, pp, ops);
    benchmark::DoNotOptimize(chm::d0_matrix(b, ops, ch, w));
  }
}
BENCHMARK(BM_KernelAndD0)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_BlochSpectrum(benchmark::State& st) {
  const chm::WaveProfile w = chm::profile(kWave, 256);
  for (auto _ : st) benchmark::DoNotOptimize(chm::bloch_spectrum(w, 64, 0.01));
}
BENCHMARK(BM_BlochSpectrum)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

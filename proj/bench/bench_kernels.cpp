// Serial reference against the OpenMP kernels. Argument 0 is Exec::serial, 1 is Exec::parallel.
#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "recon/coherence.hpp"
#include "recon/reconstruct.hpp"
#include "recon/sewing.hpp"

using namespace recon;

namespace {

Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::serial : Exec::parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

const MollifierStack& stack() {
  static const MollifierStack st = MollifierStack::build(DyadicGrid(12), 1.5);
  return st;
}

SampledFunction sine(const DyadicGrid& g) {
  return SampledFunction::from_periodic(g, [](double x) { return std::sin(2.0 * std::numbers::pi * x); });
}

void BM_f_n_field(benchmark::State& state) {
  const GermPtr germ = taylor_germ(SmoothFunction::sine(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(f_n_field(*germ, stack(), 6, exec_of(state)));
  label(state);
}
BENCHMARK(BM_f_n_field)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_h_field(benchmark::State& state) {
  const GermPtr germ = taylor_germ(SmoothFunction::sine(), 1);
  CoherenceOptions opts;
  opts.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(h_field(*germ, stack(), 1.5, 2, 5, 4, opts));
  label(state);
}
BENCHMARK(BM_h_field)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_holder_seminorm(benchmark::State& state) {
  const SampledFunction xi = dilate_translate(stack().phi(), 3, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(holder_seminorm(xi, 1.5, exec_of(state)));
  label(state);
}
BENCHMARK(BM_holder_seminorm)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_bbar_norm(benchmark::State& state) {
  const TwoParamProcess A = TwoParamProcess::young(SmoothFunction::cosine(), SmoothFunction::sine());
  NormOptions opts;
  opts.exec = exec_of(state);
  const ThreeParam dA = delta2_process(A.value);
  for (auto _ : state) benchmark::DoNotOptimize(bbar_norm(dA, stack().grid(), 1.5, 2.0, INFINITY, 1, 8, opts));
  label(state);
}
BENCHMARK(BM_bbar_norm)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// FFT convolution against the O(N^2) periodic sum it replaces.
void BM_convolve_fft(benchmark::State& state) {
  const DyadicGrid g(static_cast<int>(state.range(0)));
  const SampledFunction f = sine(g), k = base_bump(g);
  for (auto _ : state) benchmark::DoNotOptimize(convolve(f, k));
}
BENCHMARK(BM_convolve_fft)->Arg(10)->Arg(12)->Unit(benchmark::kMicrosecond);

void BM_convolve_direct(benchmark::State& state) {
  const DyadicGrid g(static_cast<int>(state.range(0)));
  const SampledFunction f = sine(g), k = base_bump(g);
  const std::size_t n = g.size();
  std::vector<double> out(n);
  for (auto _ : state) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += f[j] * k[(i + n - j) % n];
      out[i] = g.spacing() * s;
    }
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_convolve_direct)->Arg(10)->Arg(12)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

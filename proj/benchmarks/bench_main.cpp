// Timings for the hot paths: brackets, ordering, map construction, Casimir check.
#include "spinquant/crosscheck.hpp"
#include "spinquant/solver.hpp"

#include <benchmark/benchmark.h>

using namespace spinq;

namespace {

Signature sig_of(const benchmark::State &st) { return {static_cast<int>(st.range(0)), static_cast<int>(st.range(1))}; }

void BM_Superbracket(benchmark::State &st) {
  const Signature sig = sig_of(st);
  const auto R = named_symbol(NamedSymbol::R, sig), D = named_symbol(NamedSymbol::Delta, sig);
  const auto a = R * D, b = D * D;
  for (auto _ : st)
    benchmark::DoNotOptimize(superbracket(a, b));
}
BENCHMARK(BM_Superbracket)->Args({3, 0})->Args({4, 0})->Args({3, 1});

void BM_NormalOrder(benchmark::State &st) {
  const Signature sig = sig_of(st);
  const auto s = power(named_symbol(NamedSymbol::R, sig), 2) * named_symbol(NamedSymbol::Delta, sig);
  for (auto _ : st)
    benchmark::DoNotOptimize(normal_order(s));
}
BENCHMARK(BM_NormalOrder)->Args({3, 0})->Args({4, 0});

void BM_BuildSuperization(benchmark::State &st) {
  const Signature sig = sig_of(st);
  for (auto _ : st)
    benchmark::DoNotOptimize(build_superization(sig, Affine::formal()));
}
BENCHMARK(BM_BuildSuperization)->Args({2, 0})->Args({3, 0})->Unit(benchmark::kMillisecond);

void BM_BuildQuantization(benchmark::State &st) {
  const Signature sig = sig_of(st);
  for (auto _ : st)
    benchmark::DoNotOptimize(build_quantization(sig, Affine::constant(frac(1, 5)), Affine::formal()));
}
BENCHMARK(BM_BuildQuantization)->Args({2, 0})->Args({3, 0})->Unit(benchmark::kMillisecond);

void BM_Resonances(benchmark::State &st) {
  const Signature sig = sig_of(st);
  for (auto _ : st)
    benchmark::DoNotOptimize(resonances(sig, MapKind::Quantization, 2));
}
BENCHMARK(BM_Resonances)->Args({3, 0})->Unit(benchmark::kMillisecond)->Iterations(2);

void BM_Casimir(benchmark::State &st) {
  const Signature sig = sig_of(st);
  CasimirOptions opt;
  opt.central_x = 0;
  for (auto _ : st)
    benchmark::DoNotOptimize(casimir_crosscheck(sig, MapKind::Superization, opt));
}
BENCHMARK(BM_Casimir)->Args({3, 0})->Unit(benchmark::kSecond)->Iterations(1);

} // namespace
BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "coppice/gen.hpp"
#include "coppice/linearize.hpp"
#include "coppice/polytopes.hpp"
#include "coppice/trees.hpp"

using namespace coppice;

static void BM_EnumK(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(enum_k(static_cast<int>(st.range(0))));
}
BENCHMARK(BM_EnumK)->DenseRange(3, 7);

static void BM_EnumW(benchmark::State& st) {
  IntVec n(static_cast<std::size_t>(st.range(0)), 1);
  for (auto _ : st) benchmark::DoNotOptimize(enum_w(n));
}
BENCHMARK(BM_EnumW)->DenseRange(1, 3);

static void BM_GenSquareZero(benchmark::State& st) {
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(gen_square_zero_seeded(seed++ % 21));
}
BENCHMARK(BM_GenSquareZero)->Unit(benchmark::kMillisecond);

static void BM_Validate(benchmark::State& st) {
  FlowCat2 fc = gen_square_zero_seeded(6);
  for (auto _ : st) benchmark::DoNotOptimize(validate(fc));
}
BENCHMARK(BM_Validate)->Unit(benchmark::kMillisecond);

static void BM_CheckA2(benchmark::State& st) {
  FlowCat2 fc = gen_strict_2cat(z2_strict_2cat());
  MuFamily mus = extract_all(fc);
  for (auto _ : st) benchmark::DoNotOptimize(check_a2(mus, fc.bounds, fc.cap, fc.epsilon));
}
BENCHMARK(BM_CheckA2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

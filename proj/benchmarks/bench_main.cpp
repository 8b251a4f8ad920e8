#include <benchmark/benchmark.h>

#include "reconkit/builders.hpp"

static void BM_polynomial_structure(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(reconkit::build_polynomial_structure(1, int(state.range(0))));
}
BENCHMARK(BM_polynomial_structure)->Arg(2)->Arg(4);

BENCHMARK_MAIN();

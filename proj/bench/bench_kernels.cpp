// Serial reference against the OpenMP kernels.

#include <benchmark/benchmark.h>

#include "markoff/connectivity.hpp"
#include "markoff/markoff.hpp"

namespace {

void BM_BuildGraph(benchmark::State& st) {
    const auto p = static_cast<std::uint32_t>(st.range(0));
    const bool parallel = st.range(1) != 0;
    for (auto _ : st) benchmark::DoNotOptimize(parallel ? mkf::build_graph(p) : mkf::build_graph_serial(p));
    st.SetLabel(parallel ? "parallel" : "serial");
}
BENCHMARK(BM_BuildGraph)->Args({997, 0})->Args({997, 1})->Args({2999, 0})->Args({2999, 1})->Unit(benchmark::kMillisecond);

void BM_SweepPrimes(benchmark::State& st) {
    const bool parallel = st.range(0) != 0;
    for (auto _ : st) benchmark::DoNotOptimize(mkf::sweep_primes(2, 200000, {}, parallel));
    st.SetLabel(parallel ? "parallel" : "serial");
}
BENCHMARK(BM_SweepPrimes)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ReducedSweep(benchmark::State& st) {
    mkf::BigNat b;
    mpz_ui_pow_ui(b.get_mpz_t(), 10, static_cast<unsigned long>(st.range(0)));
    const int mode = static_cast<int>(st.range(1));
    mkf::SweepOptions opt;
    opt.parallel = mode == 1;
    for (auto _ : st) {
        if (mode == 2)
            benchmark::DoNotOptimize(mkf::algorithm1_sweep_reference(2, b));
        else
            benchmark::DoNotOptimize(mkf::algorithm1_sweep(2, b, opt));
    }
    st.SetLabel(mode == 2 ? "reference" : mode == 1 ? "parallel" : "serial");
}
BENCHMARK(BM_ReducedSweep)->Args({40, 0})->Args({40, 1})->Args({40, 2})->Args({100, 0})->Args({100, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

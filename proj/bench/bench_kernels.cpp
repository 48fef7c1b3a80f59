#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>
#include <string>

#include "msindex/kernels.hpp"

using namespace msi;

// Serial twin against the OpenMP kernel on identical inputs. The argument is the problem size
// (number of s values or elements); thread count comes from OMP_NUM_THREADS.

namespace {

MorseSturmSystem bench_system(bool riemannian) {
    std::mt19937_64 rng(42);
    RandomSystemOptions o;
    o.riemannian = riemannian;
    return random_system(rng, o);
}

std::vector<double> s_grid(int count) {
    std::vector<double> s(count);
    for (int i = 0; i < count; ++i) s[i] = 10.0 * i / count;
    return s;
}

template <bool Parallel>
void indicator_scan(benchmark::State& state) {
    const MorseSturmSystem sys = bench_system(false);
    const TwistedBvp bvp(sys, cplx(0, 1));
    const auto s = s_grid(int(state.range(0)));
    for (auto _ : state) {
        auto v = Parallel ? kernels::indicator_scan(bvp, s, Accuracy::Scan)
                          : kernels::serial::indicator_scan(bvp, s, Accuracy::Scan);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void endpoint_maps(benchmark::State& state) {
    const MorseSturmSystem sys = bench_system(false);
    const auto s = s_grid(int(state.range(0)));
    for (auto _ : state) {
        auto v = Parallel ? kernels::endpoint_maps(sys, 1.0, s, 400) : kernels::serial::endpoint_maps(sys, 1.0, s, 400);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void fem_elements(benchmark::State& state) {
    const MorseSturmSystem sys = bench_system(true);
    const int N = int(state.range(0));
    for (auto _ : state) {
        auto v = Parallel ? kernels::fem_elements(sys, N) : kernels::serial::fem_elements(sys, N);
        benchmark::DoNotOptimize(v.k00.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(indicator_scan<false>)->Name("indicator_scan/serial")->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(indicator_scan<true>)->Name("indicator_scan/openmp")->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(endpoint_maps<false>)->Name("endpoint_maps/serial")->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(endpoint_maps<true>)->Name("endpoint_maps/openmp")->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(fem_elements<false>)->Name("fem_elements/serial")->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(fem_elements<true>)->Name("fem_elements/openmp")->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    benchmark::AddCustomContext("omp_max_threads", std::to_string(omp_get_max_threads()));
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
}

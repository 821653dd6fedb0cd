// Serial reference kernels against their OpenMP counterparts. Thread count follows GERMLIN_THREADS.

#include <benchmark/benchmark.h>

#include "germlin/grid.hpp"
#include "germlin/hopf.hpp"
#include "germlin/small_divisors.hpp"
#include "../tests/hopf_oracles.hpp"
#include "../tests/support.hpp"

using namespace germlin;

namespace {

const Trunc kT{14, 8};

template <class C>
std::pair<Series<C>, Series<C>> factors() {
    std::mt19937_64 rng(1);
    auto f = testing::random_series(rng, 2, 2, kT, 150, 3, 0, 4);
    auto g = testing::random_series(rng, 2, 2, kT, 150, 3, 0, 4);
    if constexpr (std::is_same_v<C, QC>) return {f, g};
    else return {testing::to_float(f), testing::to_float(g)};
}

template <class C, bool Par>
void BM_mul(benchmark::State& st) {
    const auto [f, g] = factors<C>();
    for (auto _ : st) {
        auto r = Par ? kernels::omp::mul(f, g, kT) : kernels::serial::mul(f, g, kT);
        benchmark::DoNotOptimize(r);
    }
}

std::pair<std::vector<kernels::FlatTerm>, GridSpec> sup_case() {
    std::mt19937_64 rng(2);
    auto f = testing::to_float(testing::random_series(rng, 1, 2, kT, 60, 3, 2, 6));
    GridSpec g;
    g.h_radii = {{0.8, 1.0, 1.25}};
    g.v_radius = {0.4, 0.3};
    g.n_angle = 48;
    return {kernels::flatten(f), g};
}

template <bool Par>
void BM_sup_abs(benchmark::State& st) {
    const auto [terms, g] = sup_case();
    for (auto _ : st) benchmark::DoNotOptimize(Par ? kernels::omp::sup_abs(terms, g) : kernels::serial::sup_abs(terms, g));
}

template <bool Par>
void BM_scan(benchmark::State& st) {
    const Decks<CD> dk{{{std::polar(1.0, 0.7), std::polar(1.0, 2.1)}}, {{CD(0.5, 0), CD(0.3, 0.1)}}};
    const auto keys = scan_keys(2, 2, 14);
    for (auto _ : st) {
        auto r = Par ? kernels::omp::scan(dk, keys, ScanMode::Full) : kernels::serial::scan(dk, keys, ScanMode::Full);
        benchmark::DoNotOptimize(r);
    }
}

template <bool Par>
void BM_delta_search(benchmark::State& st) {
    std::mt19937_64 rng(3);
    const auto alpha = testing::random_alpha(rng, 3);
    const int B = 14;
    const PowerTable<CD> table(alpha, B);
    // a non-member: the whole box is searched
    const CD target = std::polar(0.77, 0.123);
    for (auto _ : st) {
        auto m = Par ? kernels::omp::delta_search(table, target, B, ExpDomain::Integer)
                     : kernels::serial::delta_search(table, target, B, ExpDomain::Integer);
        benchmark::DoNotOptimize(m);
    }
}

}  // namespace

BENCHMARK(BM_mul<QC, false>)->Name("mul/exact/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mul<QC, true>)->Name("mul/exact/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mul<CD, false>)->Name("mul/float/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mul<CD, true>)->Name("mul/float/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sup_abs<false>)->Name("sup_abs/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sup_abs<true>)->Name("sup_abs/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_scan<false>)->Name("scan/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_scan<true>)->Name("scan/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_delta_search<false>)->Name("delta_search/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_delta_search<true>)->Name("delta_search/omp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

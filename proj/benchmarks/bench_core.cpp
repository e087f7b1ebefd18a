// Microbenchmarks for the hot paths: the transform, truncated operator
// sweeps, maximal functions, order statistics, and the two sparse
// constructions. Run by hand; not part of the test suite.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "sdom/calculus.hpp"
#include "sdom/fft.hpp"
#include "sdom/harness.hpp"
#include "sdom/kernels.hpp"
#include "sdom/operators.hpp"
#include "sdom/rng.hpp"
#include "sdom/sparse.hpp"

namespace {

sdom::Signal trig(std::int64_t n, std::uint64_t seed, int max_freq) {
    sdom::SignalSpec spec;
    spec.n = n;
    spec.seed = seed;
    spec.max_freq = max_freq;
    return sdom::generate_signal(spec);
}

void bm_fft(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<sdom::cdouble> a(n);
    sdom::Rng rng(1);
    for (auto& v : a) v = {rng.normal(), rng.normal()};
    for (auto _ : state) {
        std::vector<sdom::cdouble> work = a;
        sdom::fft(work, false);
        benchmark::DoNotOptimize(work.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(bm_fft)->Arg(1024)->Arg(4096)->Arg(16384);

void bm_truncated_apply_all(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    const sdom::Signal f = trig(n, 2, 32);
    const sdom::KernelSpec k = sdom::make_kernel("periodic_hilbert");
    const double eps = 4.0 / static_cast<double>(n);
    for (auto _ : state) {
        auto out = sdom::truncated_apply_all(f, k, eps);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(bm_truncated_apply_all)->Arg(1024)->Arg(4096);

void bm_modulated_maximal_sup_all(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    const sdom::Signal f = trig(n, 3, 8);
    sdom::OperatorSpecCfg op;
    op.max_freq = 8;
    const sdom::OperatorProfile prof = sdom::profile_from(op, n);
    for (auto _ : state) {
        auto out = sdom::modulated_maximal_sup_all(f, prof);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(bm_modulated_maximal_sup_all)->Arg(512)->Arg(1024);

void bm_maximal_r_all(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    const sdom::Signal f = trig(n, 4, 32);
    for (auto _ : state) {
        auto out = sdom::maximal_r_all(f, 2.0);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(bm_maximal_r_all)->Arg(1024)->Arg(4096);

void bm_oscillation(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    const sdom::Signal f = trig(n, 5, 32);
    const sdom::Interval q = sdom::Interval::full_circle();
    for (auto _ : state) {
        benchmark::DoNotOptimize(sdom::oscillation(f, q, 0.125));
    }
}
BENCHMARK(bm_oscillation)->Arg(1024)->Arg(4096);

void bm_lerner_decompose(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    const sdom::Signal f = trig(n, 6, 32);
    for (auto _ : state) {
        auto res = sdom::lerner_decompose(f, sdom::Interval::full_circle(), 0.125);
        benchmark::DoNotOptimize(res.cubes.data());
    }
}
BENCHMARK(bm_lerner_decompose)->Arg(1024)->Arg(4096);

void bm_sparse_apply(benchmark::State& state) {
    const std::int64_t n = 4096;
    const sdom::Signal f = trig(n, 7, 32);
    const auto lr = sdom::lerner_decompose(f, sdom::Interval::full_circle(), 0.125);
    for (auto _ : state) {
        double acc = 0.0;
        for (std::int64_t x = 0; x < n; x += 64)
            acc += sdom::sparse_apply(f, lr.family, 2.0, x);
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(bm_sparse_apply);

void bm_sparse_dominate(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    const sdom::Signal f = trig(n, 8, 8);
    sdom::OperatorSpecCfg op;
    op.max_freq = 8;
    const sdom::OperatorProfile prof = sdom::profile_from(op, n);
    const sdom::OperatorHandle handle = sdom::handle_modulated_maximal_sup(prof);
    for (auto _ : state) {
        auto res = sdom::sparse_dominate(f, handle, sdom::Interval::full_circle(),
                                         sdom::DominationConfig{});
        benchmark::DoNotOptimize(res.c_empirical);
    }
}
BENCHMARK(bm_sparse_dominate)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();

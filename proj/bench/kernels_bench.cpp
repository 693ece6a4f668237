#include <benchmark/benchmark.h>

#include <vector>

#include "teg/num/kernels.hpp"
#include "teg/util/rng.hpp"

using namespace teg;

namespace {

std::vector<double> randmat(size_t n, uint64_t seed) {
    rng::Stream s(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = s.uniform(-1.0, 1.0);
    return v;
}

void bm_matmul_serial(benchmark::State& state) {
    size_t n = (size_t)state.range(0);
    auto a = randmat(n * n, 1);
    auto b = randmat(n * n, 2);
    std::vector<double> c(n * n);
    for (auto _ : state) {
        num::kernels::serial::matmul_nn(a.data(), b.data(), c.data(), n, n, n, false);
        benchmark::DoNotOptimize(c.data());
    }
    state.SetItemsProcessed(state.iterations() * (int64_t)(n * n * n));
}

void bm_matmul_parallel(benchmark::State& state) {
    size_t n = (size_t)state.range(0);
    auto a = randmat(n * n, 1);
    auto b = randmat(n * n, 2);
    std::vector<double> c(n * n);
    num::kernels::set_parallel_enabled(true);
    for (auto _ : state) {
        num::kernels::matmul_nn(a.data(), b.data(), c.data(), n, n, n, false);
        benchmark::DoNotOptimize(c.data());
    }
    state.SetItemsProcessed(state.iterations() * (int64_t)(n * n * n));
}

void bm_softmax_serial(benchmark::State& state) {
    size_t rows = (size_t)state.range(0), cols = 512;
    auto x = randmat(rows * cols, 3);
    std::vector<double> y(rows * cols);
    for (auto _ : state) {
        num::kernels::serial::softmax_rows(x.data(), y.data(), rows, cols);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * (int64_t)(rows * cols));
}

void bm_softmax_parallel(benchmark::State& state) {
    size_t rows = (size_t)state.range(0), cols = 512;
    auto x = randmat(rows * cols, 3);
    std::vector<double> y(rows * cols);
    num::kernels::set_parallel_enabled(true);
    for (auto _ : state) {
        num::kernels::softmax_rows(x.data(), y.data(), rows, cols);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * (int64_t)(rows * cols));
}

// both paths must agree bitwise; run once under the benchmark harness so a
// drifting kernel fails loudly here too
void bm_parity_check(benchmark::State& state) {
    size_t n = 96;
    auto a = randmat(n * n, 7);
    auto b = randmat(n * n, 8);
    std::vector<double> cs(n * n), cp(n * n);
    num::kernels::set_parallel_enabled(true);
    for (auto _ : state) {
        num::kernels::serial::matmul_nn(a.data(), b.data(), cs.data(), n, n, n, false);
        num::kernels::matmul_nn(a.data(), b.data(), cp.data(), n, n, n, false);
        for (size_t i = 0; i < cs.size(); ++i)
            if (cs[i] != cp[i]) state.SkipWithError("serial/parallel mismatch");
    }
}

}  // namespace

BENCHMARK(bm_matmul_serial)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bm_matmul_parallel)->Arg(64)->Arg(128)->Arg(256)->UseRealTime();
BENCHMARK(bm_softmax_serial)->Arg(64)->Arg(512);
BENCHMARK(bm_softmax_parallel)->Arg(64)->Arg(512)->UseRealTime();
BENCHMARK(bm_parity_check);

BENCHMARK_MAIN();

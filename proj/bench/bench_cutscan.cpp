// Serial against OpenMP exhaustive cut scans on random integer-weighted graphs.

#include <benchmark/benchmark.h>

#include "vatsp/cutscan.hpp"
#include "vatsp/rng.hpp"

using namespace vatsp;

namespace {

// Connected graph: a Hamiltonian cycle plus each remaining pair with probability 1/3.
CutScanGraph random_graph(int n, bool directed) {
    Rng rng(static_cast<std::uint64_t>(n) * 7919 + directed);
    CutScanGraph g;
    g.n = n;
    auto add = [&](int u, int v) {
        g.ends.emplace_back(u, v);
        g.weight.push_back(rng.range(1, 20));
        g.count.push_back(rng.range(0, 2));
    };
    for (int v = 0; v < n; ++v) add(v, (v + 1) % n);
    for (int u = 0; u < n; ++u)
        for (int v = directed ? 0 : u + 1; v < n; ++v)
            if (u != v && (v != (u + 1) % n) && rng.chance(1, 3)) add(u, v);
    return g;
}

template <class F>
void run(benchmark::State& state, bool directed, F kernel) {
    const CutScanGraph g = random_graph(static_cast<int>(state.range(0)), directed);
    for (auto _ : state) benchmark::DoNotOptimize(kernel(g));
    // Undirected kernels see each cut once, the directed one every subset.
    const double cuts = static_cast<double>(std::uint64_t{1} << (directed ? g.n : g.n - 1));
    state.counters["cuts"] = benchmark::Counter(cuts,
                                                benchmark::Counter::kIsIterationInvariantRate);
}

void BM_MinCutSerial(benchmark::State& s) { run(s, false, undirected_min_cut_serial); }
void BM_MinCutParallel(benchmark::State& s) { run(s, false, undirected_min_cut_parallel); }
void BM_MaxRatioSerial(benchmark::State& s) { run(s, false, undirected_max_ratio_serial); }
void BM_MaxRatioParallel(benchmark::State& s) { run(s, false, undirected_max_ratio_parallel); }
void BM_OutCutSerial(benchmark::State& s) { run(s, true, directed_min_out_cut_serial); }
void BM_OutCutParallel(benchmark::State& s) { run(s, true, directed_min_out_cut_parallel); }

}  // namespace

BENCHMARK(BM_MinCutSerial)->DenseRange(12, 20, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MinCutParallel)->DenseRange(12, 20, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MaxRatioSerial)->DenseRange(12, 20, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MaxRatioParallel)->DenseRange(12, 20, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OutCutSerial)->DenseRange(12, 20, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OutCutParallel)->DenseRange(12, 20, 4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

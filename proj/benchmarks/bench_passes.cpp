#include <bddmp/dual_solver.hpp>
#include <bddmp/generators.hpp>
#include <bddmp/primal.hpp>

#include <benchmark/benchmark.h>

using namespace bddmp;

namespace {

void BM_BuildGrid(benchmark::State& st)
{
    const auto side = static_cast<std::size_t>(st.range(0));
    const IlpInstance inst = generate_mrf({side, side, 2}, 1);
    for (auto _ : st) {
        DualState state(inst, SolverConfig{});
        benchmark::DoNotOptimize(state.lower_bound());
    }
}
BENCHMARK(BM_BuildGrid)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

// One forward plus one backward pass; counters are per BDD node.
void BM_GridRound(benchmark::State& st)
{
    const auto side = static_cast<std::size_t>(st.range(0));
    const IlpInstance inst = generate_mrf({side, side, 2}, 1);
    SolverConfig config;
    if (st.range(1) > 0)
        config.smoothing = 0.1;
    DualState state(inst, config);
    for (auto _ : st) {
        state.forward_pass();
        benchmark::DoNotOptimize(state.backward_pass());
    }
    st.counters["nodes"] = static_cast<double>(state.total_nodes());
    st.counters["node_passes"] =
        benchmark::Counter(2.0 * static_cast<double>(state.total_nodes()), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_GridRound)->Args({10, 0})->Args({30, 0})->Args({30, 1})->Unit(benchmark::kMillisecond);

void BM_PrimalSearch(benchmark::State& st)
{
    const IlpInstance inst = generate_cell_tracking({8, 6, 0.6, 0.3, 2}, 4);
    DualState state(inst, SolverConfig{});
    SolverConfig config;
    config.max_passes = 200;
    run(state, config);
    const PrimalScores scores = compute_scores(state, ScoreStrategy::neg_mm);
    for (auto _ : st)
        benchmark::DoNotOptimize(primal_search(inst, state, scores, default_node_budget(inst.num_vars())).nodes);
}
BENCHMARK(BM_PrimalSearch)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();

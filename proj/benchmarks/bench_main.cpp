#include "fixtures.hpp"

#include "roving/analysis.hpp"
#include "roving/kernels.hpp"
#include "roving/sim.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace roving;

void BM_BusyPeriodJet(benchmark::State& state)
{
    const int order = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(busy_period(Gamma{0.7, 1.4}, 0.8, 0.1, Jet(order, 1.0), Jet::variable(0.0, order)));
    }
}
BENCHMARK(BM_BusyPeriodJet)->Arg(2)->Arg(6)->Arg(12);

void BM_ReportTakacs(benchmark::State& state)
{
    const NetworkModel m = testing::takacs(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(report(m, {.jet_order = 3, .omega_grid = {}, .solver = {}}));
}
BENCHMARK(BM_ReportTakacs)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_ReportKatayama(benchmark::State& state)
{
    const NetworkModel m = testing::katayama(static_cast<double>(state.range(0)) / 100.0);
    for (auto _ : state) benchmark::DoNotOptimize(report(m, {.jet_order = 4, .omega_grid = {}, .solver = {}}));
}
BENCHMARK(BM_ReportKatayama)->Arg(30)->Arg(90)->Unit(benchmark::kMillisecond);

void BM_ScalarWaitFuzz(benchmark::State& state)
{
    const NetworkModel m = testing::fuzz_model(static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state) {
        const AnalysisContext ctx(m, Jet(0, 0.5));
        benchmark::DoNotOptimize(wait_arbitrary(ctx, 0));
    }
}
BENCHMARK(BM_ScalarWaitFuzz)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_SimulateKatayama(benchmark::State& state)
{
    const NetworkModel m = testing::katayama(0.6);
    const SimConfig config{.seed = 1, .warmup_cycles = 100, .measured_cycles = 10000, .replications = 1,
                           .queue_cap = 1000000};
    for (auto _ : state) benchmark::DoNotOptimize(simulate(m, config));
}
BENCHMARK(BM_SimulateKatayama)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

// Serial reference vs OpenMP kernels. Run with --benchmark_filter=... as usual;
// the thread count comes from OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "fhnet/kernels.hpp"

using namespace fhnet;

namespace {

TopologySpec dense_spec() {
    TopologySpec s;
    s.interferers = 50;
    s.channel.m0 = 4;
    s.channel.m_i = {1.0};
    return s;
}

LinkParams dense_link() {
    LinkParams link;
    link.probs = collision_probabilities(200, 1.0);
    link.splatter = SplatterModel::from_psi(0.96);
    link.m0 = 4;
    return link;
}

template <bool Parallel>
void BM_draw_topologies(benchmark::State& state) {
    const auto spec = dense_spec();
    for (auto _ : state) {
        auto t = Parallel ? kernels::omp::draw_topologies(spec, 1, 1000) : kernels::serial::draw_topologies(spec, 1, 1000);
        benchmark::DoNotOptimize(t.data());
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}

template <bool Parallel>
void BM_invert_all(benchmark::State& state) {
    const auto tops = kernels::serial::draw_topologies(dense_spec(), 1, 1000);
    const auto link = dense_link();
    for (auto _ : state) {
        auto r = Parallel ? kernels::omp::invert_all(tops, link, 0.1) : kernels::serial::invert_all(tops, link, 0.1);
        benchmark::DoNotOptimize(r.data());
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}

template <bool Parallel>
void BM_monte_carlo_outage(benchmark::State& state) {
    const auto tops = kernels::serial::draw_topologies(dense_spec(), 1, 1);
    const OutageContext ctx{tops[0], dense_link(), 1.0};
    const std::uint64_t trials = 100000;
    for (auto _ : state) {
        auto e = Parallel ? kernels::omp::monte_carlo_outage(ctx, trials, {1, 1})
                          : kernels::serial::monte_carlo_outage(ctx, trials, {1, 1});
        benchmark::DoNotOptimize(e.events);
    }
    state.SetItemsProcessed(state.iterations() * trials);
}

template <bool Parallel>
void BM_estimate_capacity(benchmark::State& state) {
    const std::uint64_t trials = 100000;
    for (auto _ : state) {
        auto e = Parallel ? kernels::omp::estimate_capacity({2, 0.8}, 3.0, trials, {1, 1})
                          : kernels::serial::estimate_capacity({2, 0.8}, 3.0, trials, {1, 1});
        benchmark::DoNotOptimize(e.rate);
    }
    state.SetItemsProcessed(state.iterations() * trials);
}

}  // namespace

BENCHMARK(BM_draw_topologies<false>)->Name("draw_topologies/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_draw_topologies<true>)->Name("draw_topologies/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_invert_all<false>)->Name("invert_all/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_invert_all<true>)->Name("invert_all/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_monte_carlo_outage<false>)->Name("monte_carlo_outage/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_monte_carlo_outage<true>)->Name("monte_carlo_outage/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_estimate_capacity<false>)->Name("estimate_capacity/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_estimate_capacity<true>)->Name("estimate_capacity/omp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

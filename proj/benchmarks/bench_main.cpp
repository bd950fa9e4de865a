#include <benchmark/benchmark.h>

#include <random>

#include "gridsched/broker/broker.hpp"
#include "gridsched/grid/calendar.hpp"
#include "gridsched/grid/information_service.hpp"
#include "gridsched/sched/scheduler.hpp"
#include "gridsched/sim/kernel.hpp"

namespace gs = gridsched;

namespace {

// Layered random DAG with a single entry (task 1) and a single exit (task n).
gs::dag::DependencyEdge edge(int src, int dst, double bytes) {
    gs::dag::DependencyEdge e;
    e.src = gs::TaskId{src};
    e.dst = gs::TaskId{dst};
    e.bytes = bytes;
    return e;
}

gs::dag::DagApp layered_dag(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mi(1e4, 5e5), bytes(0.0, 1e6);
    gs::dag::DagApp g("bench");
    for (int i = 1; i <= n; ++i) {
        gs::dag::TaskNode t;
        t.id = gs::TaskId{i};
        t.name = "T" + std::to_string(i);
        t.length_mi = mi(rng);
        g.add_task(std::move(t));
    }
    for (int i = 2; i < n; ++i) {
        std::uniform_int_distribution<int> parent(1, i - 1);
        const int p = parent(rng);
        g.add_edge(edge(p, i, bytes(rng)));
        if (p != 1 && rng() % 2 == 0) g.add_edge(edge(1, i, bytes(rng)));
    }
    // Every task without a successor feeds the exit.
    std::vector<bool> has_child(n + 1, false);
    for (const auto& e : g.edges()) has_child[e.src.value] = true;
    for (int i = 1; i < n; ++i) {
        if (!has_child[i]) g.add_edge(edge(i, n, bytes(rng)));
    }
    return g;
}

std::vector<gs::grid::ResourceSpec> resources(int count) {
    std::vector<gs::grid::ResourceSpec> out;
    for (int i = 0; i < count; ++i) {
        gs::grid::ResourceSpec s;
        s.name = "R" + std::to_string(i + 1);
        s.num_machines = 2;
        s.pes_per_machine = 2;
        s.pe_rating_mips = 500.0 + 250.0 * (i % 4);
        s.baud_rate_bps = 1e6 * (1 + i % 3);
        s.cost_per_sec = 1.0 + i % 5;
        out.push_back(s);
    }
    return out;
}

void BM_MinMinSchedule(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    gs::dag::ValidatedDag dag(layered_dag(n, 42));
    gs::grid::InformationService gis;
    for (const auto& s : resources(8)) gis.register_resource(s);
    const std::vector<gs::grid::RegistryEntry> entries(gis.discover_resources().begin(), gis.discover_resources().end());
    for (auto _ : state) benchmark::DoNotOptimize(gs::sched::min_min_schedule(dag, entries).makespan());
    state.SetComplexityN(n);
}
BENCHMARK(BM_MinMinSchedule)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void BM_RunExperiment(benchmark::State& state) {
    gs::broker::ExperimentConfig cfg;
    cfg.dag = layered_dag(static_cast<int>(state.range(0)), 7);
    cfg.resources = resources(4);
    for (auto _ : state) benchmark::DoNotOptimize(gs::broker::run_experiment(cfg).makespan);
}
BENCHMARK(BM_RunExperiment)->Arg(32)->Arg(128);

void BM_KernelPingPong(benchmark::State& state) {
    const auto events = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        gs::sim::Kernel k;
        std::uint64_t left = events;
        auto bounce = [&](gs::sim::Context& ctx, const gs::sim::Event& ev) {
            if (left-- > 0) ctx.send(ev.src, 1.0, 0);
        };
        const auto a = k.register_entity("a", bounce);
        const auto b = k.register_entity("b", bounce);
        k.schedule(a, b, 0.0, 0);
        benchmark::DoNotOptimize(k.run().events_processed);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * events));
}
BENCHMARK(BM_KernelPingPong)->Arg(10000);

void BM_CalendarEarliestFeasible(benchmark::State& state) {
    gs::grid::ResourceSpec spec = resources(1)[0];
    spec.num_machines = 4;
    spec.pes_per_machine = 4;
    gs::grid::ResourceCalendar cal(gs::ResourceId{0}, spec);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(0.0, 1e4), len(1.0, 50.0);
    for (int i = 0; i < state.range(0); ++i) {
        const double d = len(rng);
        auto slot = cal.earliest_feasible_start(pos(rng), d);
        cal.commit(gs::TaskId{i}, slot.pe, slot.start, d);
    }
    for (auto _ : state) benchmark::DoNotOptimize(cal.earliest_feasible_start(pos(rng), len(rng)).start);
}
BENCHMARK(BM_CalendarEarliestFeasible)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();

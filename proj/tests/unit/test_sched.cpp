#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "gridsched/grid/information_service.hpp"
#include "gridsched/sched/scheduler.hpp"

using namespace gridsched;
using namespace gridsched::sched;

namespace {

std::vector<grid::RegistryEntry> register_all(const std::vector<oracle::Machine>& machines) {
    grid::InformationService gis;
    for (const auto& s : fixtures::to_specs(machines)) gis.register_resource(s);
    return {gis.discover_resources().begin(), gis.discover_resources().end()};
}

void check_matches_oracle(const oracle::Graph& g, const std::vector<oracle::Machine>& machines, ResourceOrder order) {
    dag::ValidatedDag dag(fixtures::to_dag(g));
    auto plan = min_min_schedule(dag, register_all(machines), order);
    auto expected = oracle::min_min(g, machines, order == ResourceOrder::FastestFirst ? oracle::Order::Fastest
                                                                                     : oracle::Order::Cheapest);
    REQUIRE(plan.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const auto& a = plan.assignments()[i];
        const auto& e = expected[i];
        CHECK(a.task.value == e.task);
        CHECK(a.resource.value == e.resource);
        CHECK(a.pe.machine == e.machine);
        CHECK(a.pe.pe == e.pe);
        CHECK(a.start == e.start);
        CHECK(a.finish == e.finish);
    }
    CHECK(fixtures::precedence_violation(g, machines, plan).empty());
}

}  // namespace

TEST_CASE("diamond on two identical resources") {
    dag::ValidatedDag dag(fixtures::to_dag(fixtures::diamond()));
    auto plan = min_min_schedule(dag, register_all(fixtures::twin_resources()));
    REQUIRE(plan.size() == 4);
    auto at = [&](int id) { return *plan.find(TaskId{id}); };
    CHECK(at(1).resource == ResourceId{0});
    CHECK(at(1).start == 0.0);
    CHECK(at(1).finish == 100.0);
    CHECK(at(2).resource == ResourceId{0});
    CHECK(at(2).start == 100.0);
    CHECK(at(2).finish == 200.0);
    CHECK(at(3).resource == ResourceId{1});
    CHECK(at(3).start == 100.4);
    CHECK(at(3).finish == 200.4);
    CHECK(at(4).resource == ResourceId{1});
    CHECK(at(4).start == 200.4);
    CHECK(at(4).finish == 300.4);
    CHECK(plan.makespan() == 300.4);
    CHECK(plan.total_cost() == 400.0);
    // Commit order: 1, then 2 (tie with 3 broken by id), then 3, then 4.
    CHECK(plan.assignments()[1].task == TaskId{2});
    CHECK(plan.assignments()[2].task == TaskId{3});
}

TEST_CASE("ect table for the second round of the diamond") {
    dag::ValidatedDag dag(fixtures::to_dag(fixtures::diamond()));
    auto resources = register_all(fixtures::twin_resources());
    MinMinScheduler s(dag, resources);
    CHECK(s.immediate_unscheduled_tasks() == std::vector<TaskId>{TaskId{1}});
    auto t0 = s.ect_table();
    REQUIRE(t0.tasks.size() == 1);
    CHECK(t0.at(0, 0).ect == 100.0);
    CHECK(t0.at(0, 1).ect == 100.0);
    CHECK(t0.min_column(0) == 0);
    s.schedule();
    CHECK(s.schedule_status());
    CHECK_FALSE(s.plan().resource_order_used().empty());
}

TEST_CASE("single task on one resource") {
    oracle::Graph g;
    g.length_mi[1] = 200000.0;
    dag::ValidatedDag dag(fixtures::to_dag(g));
    auto plan = min_min_schedule(dag, register_all({{"R", 400.0, 1e6, 2.0, 1, 1}}));
    CHECK(plan.makespan() == 500.0);
    CHECK(plan.total_cost() == 1000.0);
}

TEST_CASE("resource ordering") {
    std::vector<oracle::Machine> machines{{"slow-cheap", 100.0, 1e6, 0.5, 1, 1},
                                          {"fast-dear", 1000.0, 1e6, 5.0, 1, 1},
                                          {"fast-dear-2", 1000.0, 1e6, 5.0, 1, 1}};
    auto entries = register_all(machines);
    auto fastest = order_resources(entries, ResourceOrder::FastestFirst);
    CHECK(fastest[0].spec.name == "fast-dear");
    CHECK(fastest[1].spec.name == "fast-dear-2");
    CHECK(fastest[2].spec.name == "slow-cheap");
    auto cheapest = order_resources(entries, ResourceOrder::CheapestFirst);
    CHECK(cheapest[0].spec.name == "slow-cheap");
    CHECK(cheapest[1].spec.name == "fast-dear");
    CHECK(parse_resource_order("cheapest") == ResourceOrder::CheapestFirst);
    CHECK(parse_resource_order("fastest") == ResourceOrder::FastestFirst);
    CHECK_FALSE(parse_resource_order("random").has_value());
    CHECK(to_string(ResourceOrder::CheapestFirst) == "cheapest");

    dag::ValidatedDag dag(fixtures::to_dag(fixtures::diamond()));
    auto plan = min_min_schedule(dag, entries, ResourceOrder::CheapestFirst);
    CHECK(plan.resource_order_used()[0] == ResourceId{0});
    CHECK(min_min_schedule(dag, entries).resource_order_used()[0] == ResourceId{1});
}

TEST_CASE("no resources") {
    dag::ValidatedDag dag(fixtures::to_dag(fixtures::diamond()));
    CHECK_THROWS_AS(min_min_schedule(dag, {}), NoResources);
    CHECK_THROWS_WITH(min_min_schedule(dag, {}), "no resources discovered");
}

TEST_CASE("data availability accounts for transfers and same-resource locality") {
    dag::ValidatedDag dag(fixtures::to_dag(fixtures::diamond()));
    auto entries = register_all(fixtures::twin_resources());
    SchedulePlan plan;
    plan.add(Assignment{TaskId{1}, ResourceId{0}, grid::PeId{ResourceId{0}, 0, 0}, 0.0, 100.0, 0.0});
    CHECK(data_available_time(dag, TaskId{2}, entries[0], plan, entries) == 100.0);
    CHECK(data_available_time(dag, TaskId{2}, entries[1], plan, entries) == 100.4);
    CHECK(data_available_time(dag, TaskId{1}, entries[1], plan, entries) == 0.0);
    CHECK_THROWS_AS(data_available_time(dag, TaskId{4}, entries[1], plan, entries), std::logic_error);
    CHECK_THROWS_AS(plan.add(Assignment{TaskId{1}, ResourceId{0}, grid::PeId{ResourceId{0}, 0, 0}, 0.0, 1.0, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("multi-PE resources run independent tasks side by side") {
    oracle::Graph g;
    for (int i = 1; i <= 4; ++i) g.length_mi[i] = 1000.0;
    g.edges = {{1, 2, 0.0}, {1, 3, 0.0}, {2, 4, 0.0}, {3, 4, 0.0}};
    std::vector<oracle::Machine> m{{"quad", 100.0, 1e6, 0.0, 2, 2}};
    dag::ValidatedDag dag(fixtures::to_dag(g));
    auto plan = min_min_schedule(dag, register_all(m));
    CHECK(plan.find(TaskId{2})->pe != plan.find(TaskId{3})->pe);
    CHECK(plan.find(TaskId{2})->start == plan.find(TaskId{3})->start);
    CHECK(plan.makespan() == 30.0);
    check_matches_oracle(g, m, ResourceOrder::FastestFirst);
}

TEST_CASE("property: planner matches the reference step-through on random inputs") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        auto g = oracle::random_dag(rng, 12);
        auto m = oracle::random_resources(rng, 4);
        check_matches_oracle(g, m, trial % 2 ? ResourceOrder::FastestFirst : ResourceOrder::CheapestFirst);
    }
}

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gridsched/dag/dag.hpp"
#include "gridsched/grid/entities.hpp"
#include "gridsched/grid/resource.hpp"
#include "gridsched/sched/scheduler.hpp"
#include "gridsched/sim/kernel.hpp"

namespace gridsched::broker {

/// Scheduling algorithms the broker can run.
std::span<const std::string_view> known_algorithms() noexcept;

struct ExperimentConfig {
    dag::DagApp dag;
    std::vector<grid::ResourceSpec> resources;
    std::string algorithm = "min-min";
    sched::ResourceOrder order = sched::ResourceOrder::FastestFirst;
    bool trace = false;
};

/// What the simulation reports for one finished task.
using TaskRecord = grid::CompletedGridlet;

struct ResourceUsage {
    ResourceId resource;
    std::string name;
    int pe_count = 0;
    double busy_time = 0.0;
    double utilization = 0.0;  // busy_time / (makespan * pe_count)
    double cost = 0.0;
};

struct ExperimentResult {
    dag::ValidatedDag dag;
    std::vector<grid::RegistryEntry> resources;  // registration order
    sched::SchedulePlan plan;
    std::vector<TaskRecord> simulated;  // collector arrival order
    SimTime makespan = 0.0;
    double total_cost = 0.0;
    std::vector<ResourceUsage> per_resource_utilization;
    std::uint64_t events_processed = 0;
    std::vector<std::string> trace;  // one line per delivered event when tracing
};

/// The simulated run disagrees with the plan it executed.
class PlanMismatch : public std::runtime_error {
public:
    PlanMismatch(TaskId task, const std::string& detail);
    TaskId task() const noexcept { return task_; }

private:
    TaskId task_;
};

/// The kernel drained before the collector saw every expected completion.
class CollectorStarved : public std::runtime_error {
public:
    CollectorStarved(std::size_t expected, std::size_t received, std::vector<TaskId> missing);
    const std::vector<TaskId>& missing() const noexcept { return missing_; }

private:
    std::vector<TaskId> missing_;
};

class ReservationRejected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Receives exactly `expected` GridletReturn events and keeps them in arrival order.
class GridletCollector {
public:
    GridletCollector(sim::Kernel& kernel, std::size_t expected, std::string name = "GridletCollector");
    GridletCollector(const GridletCollector&) = delete;
    GridletCollector& operator=(const GridletCollector&) = delete;

    EntityId id() const noexcept { return id_; }
    std::size_t expected() const noexcept { return expected_; }
    const std::vector<TaskRecord>& received() const noexcept { return received_; }
    /// Simulation time at which each entry of received() arrived.
    const std::vector<SimTime>& arrival_times() const noexcept { return arrivals_; }
    bool complete() const noexcept { return received_.size() == expected_; }

    /// Call after the kernel drained. Throws CollectorStarved naming the tasks from
    /// `expected_tasks` that never arrived.
    const std::vector<TaskRecord>& collect_completions(std::span<const TaskId> expected_tasks = {}) const;

private:
    sim::Process body(sim::Context& ctx);

    std::size_t expected_;
    std::vector<TaskRecord> received_;
    std::vector<SimTime> arrivals_;
    EntityId id_;
};

/// Validates the configuration, builds the simulated grid, plans at time zero, reserves, dispatches
/// each task at its reserved start and collects the completions. Throws dag::InvalidDag,
/// grid::InvalidResourceSpec, sched::NoResources or std::invalid_argument before simulating;
/// PlanMismatch or CollectorStarved if the run diverges from the plan.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct PlannedExperiment {
    dag::ValidatedDag dag;
    std::vector<grid::RegistryEntry> resources;  // registration order
    sched::SchedulePlan plan;
};

/// The planning half of run_experiment without starting a kernel. Same checks, same plan.
PlannedExperiment plan_experiment(const ExperimentConfig& config);

/// Busy time per resource divided by makespan times PE count; zero when makespan is zero.
std::vector<ResourceUsage> utilization(const sched::SchedulePlan& plan, std::span<const grid::RegistryEntry> resources);
std::vector<ResourceUsage> utilization(const ExperimentResult& result);

}  // namespace gridsched::broker

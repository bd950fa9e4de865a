#pragma once

#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "gridsched/dag/dag.hpp"
#include "gridsched/grid/calendar.hpp"
#include "gridsched/grid/resource.hpp"

namespace gridsched::sched {

enum class ResourceOrder { FastestFirst, CheapestFirst };

std::string_view to_string(ResourceOrder order) noexcept;
/// Accepts "fastest" and "cheapest".
std::optional<ResourceOrder> parse_resource_order(std::string_view text) noexcept;

class NoResources : public std::runtime_error {
public:
    NoResources() : std::runtime_error("no resources discovered") {}
};

/// FastestFirst: descending PE rating. CheapestFirst: ascending cost rate. Stable, so equal keys
/// keep registration order. Throws NoResources on an empty list.
std::vector<grid::RegistryEntry> order_resources(std::span<const grid::RegistryEntry> entries, ResourceOrder key);

struct Assignment {
    TaskId task;
    ResourceId resource;
    grid::PeId pe;
    SimTime start = 0.0;
    SimTime finish = 0.0;
    double cost = 0.0;
    double duration = 0.0;  // execution time, finish - start without rounding

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Task-to-PE assignments in the order they were committed.
class SchedulePlan {
public:
    std::span<const Assignment> assignments() const noexcept { return assignments_; }
    const Assignment* find(TaskId task) const noexcept;
    bool contains(TaskId task) const noexcept { return find(task) != nullptr; }
    std::size_t size() const noexcept { return assignments_.size(); }

    SimTime makespan() const noexcept { return makespan_; }
    double total_cost() const noexcept { return total_cost_; }

    std::span<const ResourceId> resource_order_used() const noexcept { return resource_order_; }
    void set_resource_order_used(std::vector<ResourceId> order) { resource_order_ = std::move(order); }

    /// Throws std::invalid_argument if the task is already present.
    void add(const Assignment& a);

    friend bool operator==(const SchedulePlan&, const SchedulePlan&) = default;

private:
    std::vector<Assignment> assignments_;
    SimTime makespan_ = 0.0;
    double total_cost_ = 0.0;
    std::vector<ResourceId> resource_order_;
};

/// Latest arrival of parent data at `candidate`: max over parents of finish + transfer time.
/// Zero for the entry task. Every parent must already be in `plan`.
SimTime data_available_time(const dag::ValidatedDag& dag, TaskId task, const grid::RegistryEntry& candidate,
                            const SchedulePlan& plan, std::span<const grid::RegistryEntry> resources);

struct EctEntry {
    ResourceId resource;
    SimTime data_available = 0.0;
    SimTime start = 0.0;
    double exec_duration = 0.0;
    SimTime ect = 0.0;
    grid::PeId pe;
};

/// Expected completion time of `task` on `candidate` given the current calendars. Read-only.
EctEntry ect(const dag::ValidatedDag& dag, TaskId task, const grid::RegistryEntry& candidate, const SchedulePlan& plan,
             std::span<const grid::RegistryEntry> resources, const grid::ReservationBook& calendars);

/// ECT of every ready task on every resource, rows in ready-set order and columns in resource
/// order.
struct EctTable {
    std::vector<TaskId> tasks;
    std::vector<ResourceId> resources;
    std::vector<std::vector<EctEntry>> cells;

    const EctEntry& at(std::size_t task_row, std::size_t resource_col) const { return cells.at(task_row).at(resource_col); }
    /// Column of the smallest ECT in a row; the earliest column wins ties.
    std::size_t min_column(std::size_t task_row) const;
};

/// Contract every static scheduling algorithm realizes. The base class keeps the plan and the
/// scheduled set; subclasses implement schedule().
class StaticScheduler {
public:
    StaticScheduler(const dag::ValidatedDag& dag, std::span<const grid::RegistryEntry> resources);
    virtual ~StaticScheduler() = default;

    virtual void schedule() = 0;

    /// Ready frontier: unscheduled tasks whose parents are all scheduled.
    std::vector<TaskId> immediate_unscheduled_tasks() const;

    /// Records an assignment; rejects duplicates and tasks not in the DAG.
    void store_task_assignment(const Assignment& assignment);

    /// True once every task has an assignment.
    bool schedule_status() const noexcept { return plan_.size() == dag_->size(); }

    const SchedulePlan& plan() const noexcept { return plan_; }
    const dag::ValidatedDag& dag() const noexcept { return *dag_; }
    std::span<const grid::RegistryEntry> resources() const noexcept { return resources_; }

protected:
    SchedulePlan& mutable_plan() noexcept { return plan_; }

private:
    const dag::ValidatedDag* dag_;
    std::vector<grid::RegistryEntry> resources_;
    SchedulePlan plan_;
    std::set<TaskId> scheduled_;
};

/// Frontier-based Min-Min with advance reservation: each round computes the ECT of every ready
/// task on every resource, commits the single task whose best ECT is smallest, and recomputes.
/// Ties go to the lowest task id, then to the resource earliest in the ordering.
class MinMinScheduler final : public StaticScheduler {
public:
    MinMinScheduler(const dag::ValidatedDag& dag, std::span<const grid::RegistryEntry> discovered,
                    ResourceOrder order = ResourceOrder::FastestFirst);

    void schedule() override;

    /// ECT table for the current frontier against the current calendars.
    EctTable ect_table() const;

    const grid::ReservationBook& calendars() const noexcept { return book_; }

private:
    grid::ReservationBook book_;
};

/// Plans the whole DAG. All-or-nothing: either a complete plan or an exception.
SchedulePlan min_min_schedule(const dag::ValidatedDag& dag, std::span<const grid::RegistryEntry> discovered,
                              ResourceOrder order = ResourceOrder::FastestFirst);

}  // namespace gridsched::sched

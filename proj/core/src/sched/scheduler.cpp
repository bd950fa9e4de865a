#include "gridsched/sched/scheduler.hpp"

#include <algorithm>
#include <string>

namespace gridsched::sched {

namespace {

const grid::RegistryEntry& entry_for(std::span<const grid::RegistryEntry> resources, ResourceId id) {
    auto it = std::find_if(resources.begin(), resources.end(), [&](const auto& e) { return e.id == id; });
    if (it == resources.end()) throw std::out_of_range("resource id " + std::to_string(id.value) + " not discovered");
    return *it;
}

}  // namespace

std::string_view to_string(ResourceOrder order) noexcept {
    return order == ResourceOrder::FastestFirst ? "fastest" : "cheapest";
}

std::optional<ResourceOrder> parse_resource_order(std::string_view text) noexcept {
    if (text == "fastest") return ResourceOrder::FastestFirst;
    if (text == "cheapest") return ResourceOrder::CheapestFirst;
    return std::nullopt;
}

std::vector<grid::RegistryEntry> order_resources(std::span<const grid::RegistryEntry> entries, ResourceOrder key) {
    if (entries.empty()) throw NoResources();
    std::vector<grid::RegistryEntry> ordered(entries.begin(), entries.end());
    if (key == ResourceOrder::FastestFirst) {
        std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
            return a.spec.pe_rating_mips > b.spec.pe_rating_mips;
        });
    } else {
        std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
            return a.spec.cost_per_sec < b.spec.cost_per_sec;
        });
    }
    return ordered;
}

const Assignment* SchedulePlan::find(TaskId task) const noexcept {
    auto it = std::find_if(assignments_.begin(), assignments_.end(), [&](const Assignment& a) { return a.task == task; });
    return it == assignments_.end() ? nullptr : &*it;
}

void SchedulePlan::add(const Assignment& a) {
    if (contains(a.task)) throw std::invalid_argument("task " + std::to_string(a.task.value) + " is already assigned");
    assignments_.push_back(a);
    makespan_ = std::max(makespan_, a.finish);
    total_cost_ += a.cost;
}

SimTime data_available_time(const dag::ValidatedDag& dag, TaskId task, const grid::RegistryEntry& candidate,
                            const SchedulePlan& plan, std::span<const grid::RegistryEntry> resources) {
    SimTime ready = 0.0;
    for (const dag::Link& parent : dag.parents(task)) {
        const Assignment* pa = plan.find(parent.task);
        if (pa == nullptr) {
            throw std::logic_error("task " + std::to_string(task.value) + " probed before its parent " +
                                   std::to_string(parent.task.value) + " was assigned");
        }
        const auto& src = entry_for(resources, pa->resource);
        ready = std::max(ready, pa->finish + grid::transfer_duration(parent.bytes, src, candidate));
    }
    return ready;
}

EctEntry ect(const dag::ValidatedDag& dag, TaskId task, const grid::RegistryEntry& candidate, const SchedulePlan& plan,
             std::span<const grid::RegistryEntry> resources, const grid::ReservationBook& calendars) {
    EctEntry e;
    e.resource = candidate.id;
    e.data_available = data_available_time(dag, task, candidate, plan, resources);
    e.exec_duration = grid::execution_duration(dag.task(task).length_mi, candidate.spec);
    grid::Slot slot = calendars.earliest_feasible_start(candidate.id, e.data_available, e.exec_duration);
    e.start = slot.start;
    e.pe = slot.pe;
    e.ect = e.start + e.exec_duration;
    return e;
}

std::size_t EctTable::min_column(std::size_t task_row) const {
    const auto& row = cells.at(task_row);
    if (row.empty()) throw std::logic_error("ECT row has no resources");
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
        if (row[c].ect < row[best].ect) best = c;
    }
    return best;
}

StaticScheduler::StaticScheduler(const dag::ValidatedDag& dag, std::span<const grid::RegistryEntry> resources)
    : dag_(&dag), resources_(resources.begin(), resources.end()) {
    if (resources_.empty()) throw NoResources();
}

std::vector<TaskId> StaticScheduler::immediate_unscheduled_tasks() const {
    return dag_->immediate_unscheduled_tasks(scheduled_);
}

void StaticScheduler::store_task_assignment(const Assignment& assignment) {
    if (!dag_->app().contains(assignment.task)) {
        throw std::invalid_argument("task " + std::to_string(assignment.task.value) + " is not part of the DAG");
    }
    for (const dag::Link& p : dag_->parents(assignment.task)) {
        if (!scheduled_.contains(p.task)) {
            throw std::logic_error("task " + std::to_string(assignment.task.value) + " assigned before its parent " +
                                   std::to_string(p.task.value));
        }
    }
    plan_.add(assignment);
    scheduled_.insert(assignment.task);
}

MinMinScheduler::MinMinScheduler(const dag::ValidatedDag& dag, std::span<const grid::RegistryEntry> discovered,
                                 ResourceOrder order)
    : StaticScheduler(dag, order_resources(discovered, order)), book_(resources()) {
    std::vector<ResourceId> ids;
    for (const auto& e : resources()) ids.push_back(e.id);
    mutable_plan().set_resource_order_used(std::move(ids));
}

EctTable MinMinScheduler::ect_table() const {
    EctTable table;
    table.tasks = immediate_unscheduled_tasks();
    for (const auto& r : resources()) table.resources.push_back(r.id);
    table.cells.reserve(table.tasks.size());
    for (TaskId t : table.tasks) {
        auto& row = table.cells.emplace_back();
        row.reserve(resources().size());
        for (const auto& r : resources()) row.push_back(ect(dag(), t, r, plan(), resources(), book_));
    }
    return table;
}

void MinMinScheduler::schedule() {
    while (!schedule_status()) {
        const EctTable table = ect_table();
        if (table.tasks.empty()) throw std::logic_error("no ready task although the schedule is incomplete");

        // minECT per ready task; the smallest wins, lowest task id on ties (rows are ascending).
        std::size_t best_row = 0;
        std::size_t best_col = table.min_column(0);
        for (std::size_t row = 1; row < table.tasks.size(); ++row) {
            std::size_t col = table.min_column(row);
            if (table.at(row, col).ect < table.at(best_row, best_col).ect) {
                best_row = row;
                best_col = col;
            }
        }

        const TaskId task = table.tasks[best_row];
        const EctEntry& chosen = table.at(best_row, best_col);
        const auto& resource = resources()[best_col];
        book_.commit_reservation(chosen.resource, task, chosen.pe, chosen.start, chosen.exec_duration);
        store_task_assignment(Assignment{task, chosen.resource, chosen.pe, chosen.start, chosen.ect,
                                         chosen.exec_duration * resource.spec.cost_per_sec, chosen.exec_duration});
    }
}

SchedulePlan min_min_schedule(const dag::ValidatedDag& dag, std::span<const grid::RegistryEntry> discovered,
                              ResourceOrder order) {
    MinMinScheduler scheduler(dag, discovered, order);
    scheduler.schedule();
    return scheduler.plan();
}

}  // namespace gridsched::sched

#include "gridsched/broker/broker.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <optional>
#include <set>

namespace gridsched::broker {

namespace {

using grid::MessageTag;
using grid::tag;

constexpr std::array<std::string_view, 1> kAlgorithms{"min-min"};

std::string ids_text(std::span<const TaskId> ids) {
    std::string out;
    for (auto id : ids) {
        if (!out.empty()) out += ' ';
        out += std::to_string(id.value);
    }
    return out;
}

// State shared between run_experiment and the broker process.
struct BrokerSetup {
    const dag::ValidatedDag* dag = nullptr;
    sched::ResourceOrder order = sched::ResourceOrder::FastestFirst;
    EntityId information_service;
    EntityId collector;
    std::optional<sched::SchedulePlan> plan;
    std::vector<grid::RegistryEntry> discovered;
};

// ApplicationBroker behavior: discover, plan, reserve, dispatch.
sim::Process broker_body(sim::Context& ctx, BrokerSetup& setup) {
    ctx.send(setup.information_service, 0.0, tag(MessageTag::ResourceListRequest));
    sim::Event listing_ev = co_await ctx.receive(sim::tag_is(tag(MessageTag::ResourceList)));
    auto listing = std::any_cast<grid::ResourceListing>(std::move(listing_ev.payload));
    setup.discovered = listing.entries;

    sched::MinMinScheduler scheduler(*setup.dag, listing.entries, setup.order);
    scheduler.schedule();
    setup.plan = scheduler.plan();
    const auto& plan = *setup.plan;

    std::map<ResourceId, EntityId> entity_of;
    std::map<ResourceId, const grid::RegistryEntry*> entry_of;
    for (std::size_t i = 0; i < listing.entries.size(); ++i) {
        entity_of[listing.entries[i].id] = listing.entities[i];
        entry_of[listing.entries[i].id] = &listing.entries[i];
    }

    for (const auto& a : plan.assignments()) {
        // Same expression the planner used, so start + duration reproduces the planned finish.
        double duration = grid::execution_duration(setup.dag->task(a.task).length_mi, entry_of.at(a.resource)->spec);
        ctx.send(entity_of.at(a.resource), 0.0, tag(MessageTag::ReserveRequest),
                 grid::ReserveRequest{a.task, a.pe, a.start, duration});
    }

    std::map<TaskId, std::uint64_t> reservation_ids;
    auto is_reply = [](const sim::Event& ev) {
        return ev.tag == tag(MessageTag::ReserveAck) || ev.tag == tag(MessageTag::ReserveReject);
    };
    for (std::size_t i = 0; i < plan.size(); ++i) {
        sim::Event reply_ev = co_await ctx.receive(is_reply);
        const auto& reply = std::any_cast<const grid::ReserveReply&>(reply_ev.payload);
        if (reply_ev.tag == tag(MessageTag::ReserveReject)) {
            throw ReservationRejected("reservation for task " + std::to_string(reply.task.value) +
                                      " rejected: " + reply.reason);
        }
        reservation_ids[reply.task] = reply.reservation_id;
    }

    for (const auto& a : plan.assignments()) {
        ctx.send(entity_of.at(a.resource), a.start - ctx.now(), tag(MessageTag::Dispatch),
                 grid::Gridlet{a.task, reservation_ids.at(a.task), setup.collector});
    }
}

std::string trace_line(const sim::Kernel& kernel, const sim::TraceRecord& rec) {
    std::string line = "time=" + sim::format_time(rec.time);
    line += " seq=" + std::to_string(rec.seq);
    line += " src=" + kernel.name(rec.src);
    line += " dst=" + kernel.name(rec.dst);
    line += " tag=";
    line += grid::to_string(static_cast<MessageTag>(rec.tag));
    return line;
}

[[noreturn]] void rethrow_cause(const sim::SimulationError& e) {
    std::rethrow_if_nested(e);
    throw e;
}

void check_against_plan(const TaskRecord& rec, const sched::SchedulePlan& plan) {
    const sched::Assignment* a = plan.find(rec.task);
    if (a == nullptr) throw PlanMismatch(rec.task, "completed but was never planned");
    if (rec.resource != a->resource || rec.pe != a->pe) throw PlanMismatch(rec.task, "ran on a different PE than planned");
    if (rec.start != a->start) {
        throw PlanMismatch(rec.task, "started at " + sim::format_time(rec.start) + ", planned " + sim::format_time(a->start));
    }
    if (rec.finish != a->finish) {
        throw PlanMismatch(rec.task,
                           "finished at " + sim::format_time(rec.finish) + ", planned " + sim::format_time(a->finish));
    }
    if (rec.cost != a->cost) throw PlanMismatch(rec.task, "cost differs from plan");
}

}  // namespace

std::span<const std::string_view> known_algorithms() noexcept {
    return kAlgorithms;
}

PlanMismatch::PlanMismatch(TaskId task, const std::string& detail)
    : std::runtime_error("plan/simulation mismatch for task " + std::to_string(task.value) + ": " + detail),
      task_(task) {}

CollectorStarved::CollectorStarved(std::size_t expected, std::size_t received, std::vector<TaskId> missing)
    : std::runtime_error("collector received " + std::to_string(received) + " of " + std::to_string(expected) +
                         " completions" + (missing.empty() ? std::string{} : "; missing tasks " + ids_text(missing))),
      missing_(std::move(missing)) {}

GridletCollector::GridletCollector(sim::Kernel& kernel, std::size_t expected, std::string name)
    : expected_(expected) {
    id_ = kernel.register_process(std::move(name), [this](sim::Context& ctx) { return body(ctx); });
}

sim::Process GridletCollector::body(sim::Context& ctx) {
    for (std::size_t i = 0; i < expected_; ++i) {
        sim::Event ev = co_await ctx.receive(sim::tag_is(tag(MessageTag::GridletReturn)));
        received_.push_back(std::any_cast<const TaskRecord&>(ev.payload));
        arrivals_.push_back(ev.fire_time);
    }
}

const std::vector<TaskRecord>& GridletCollector::collect_completions(std::span<const TaskId> expected_tasks) const {
    if (!complete()) {
        std::set<TaskId> seen;
        for (const auto& r : received_) seen.insert(r.task);
        std::vector<TaskId> missing;
        for (TaskId t : expected_tasks) {
            if (!seen.contains(t)) missing.push_back(t);
        }
        throw CollectorStarved(expected_, received_.size(), std::move(missing));
    }
    return received_;
}

std::vector<ResourceUsage> utilization(const sched::SchedulePlan& plan, std::span<const grid::RegistryEntry> resources) {
    std::vector<ResourceUsage> usage;
    usage.reserve(resources.size());
    for (const auto& r : resources) {
        ResourceUsage u{r.id, r.spec.name, r.spec.pe_count(), 0.0, 0.0, 0.0};
        for (const auto& a : plan.assignments()) {
            if (a.resource != r.id) continue;
            u.busy_time += a.duration;
            u.cost += a.cost;
        }
        if (plan.makespan() > 0) u.utilization = u.busy_time / (plan.makespan() * u.pe_count);
        usage.push_back(u);
    }
    return usage;
}

std::vector<ResourceUsage> utilization(const ExperimentResult& result) {
    return utilization(result.plan, result.resources);
}

static void check_algorithm(const std::string& algorithm) {
    if (std::find(kAlgorithms.begin(), kAlgorithms.end(), algorithm) == kAlgorithms.end()) {
        throw std::invalid_argument("unknown scheduling algorithm '" + algorithm + "'");
    }
}

PlannedExperiment plan_experiment(const ExperimentConfig& config) {
    check_algorithm(config.algorithm);
    dag::ValidatedDag dag(config.dag);
    if (config.resources.empty()) throw sched::NoResources();
    grid::InformationService registry;
    for (const auto& spec : config.resources) registry.register_resource(spec);
    std::vector<grid::RegistryEntry> entries(registry.discover_resources().begin(), registry.discover_resources().end());
    auto plan = sched::min_min_schedule(dag, entries, config.order);
    return PlannedExperiment{std::move(dag), std::move(entries), std::move(plan)};
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    check_algorithm(config.algorithm);
    dag::ValidatedDag dag(config.dag);
    if (config.resources.empty()) throw sched::NoResources();
    {
        // Dry-run registration so spec errors and duplicate names surface before simulating.
        grid::InformationService probe;
        for (const auto& spec : config.resources) probe.register_resource(spec);
    }

    sim::Kernel kernel;
    std::vector<std::string> trace;
    if (config.trace) {
        kernel.set_trace_sink([&](const sim::TraceRecord& rec) { trace.push_back(trace_line(kernel, rec)); });
    }

    grid::InformationServiceEntity gis(kernel);
    std::vector<std::unique_ptr<grid::ResourceEntity>> resources;
    for (const auto& spec : config.resources) {
        resources.push_back(std::make_unique<grid::ResourceEntity>(kernel, spec, gis.id()));
    }
    GridletCollector collector(kernel, dag.size());

    BrokerSetup setup;
    setup.dag = &dag;
    setup.order = config.order;
    setup.information_service = gis.id();
    setup.collector = collector.id();
    const EntityId broker_id =
        kernel.register_process("ApplicationBroker", [&setup](sim::Context& ctx) { return broker_body(ctx, setup); });

    sim::SimReport report;
    try {
        report = kernel.run();
    } catch (const sim::SimulationError& e) {
        rethrow_cause(e);
    }

    if (std::find(report.starved.begin(), report.starved.end(), broker_id) != report.starved.end()) {
        throw std::runtime_error("application broker did not finish: simulation drained while it was waiting");
    }
    const auto& topo = dag.topological_order();
    const auto& completed = collector.collect_completions(topo);
    if (!setup.plan) throw std::logic_error("broker finished without a plan");
    const sched::SchedulePlan& plan = *setup.plan;
    if (completed.size() != plan.size() || plan.size() != dag.size()) {
        throw std::logic_error("completion count does not match the number of planned tasks");
    }
    for (std::size_t i = 0; i < completed.size(); ++i) {
        check_against_plan(completed[i], plan);
        if (collector.arrival_times()[i] != completed[i].finish) {
            throw PlanMismatch(completed[i].task, "completion reported at " + sim::format_time(collector.arrival_times()[i]) +
                                                      ", finish recorded " + sim::format_time(completed[i].finish));
        }
    }

    SimTime makespan = 0.0;
    for (const auto& rec : completed) makespan = std::max(makespan, rec.finish);
    if (makespan != plan.makespan()) {
        throw PlanMismatch(dag.exit_task(), "simulated makespan " + sim::format_time(makespan) + " differs from plan " +
                                                sim::format_time(plan.makespan()));
    }

    // Registration order, as the information service recorded it.
    std::vector<grid::RegistryEntry> registered(gis.registry().discover_resources().begin(),
                                                gis.registry().discover_resources().end());
    auto usage = utilization(plan, registered);
    return ExperimentResult{
        .dag = std::move(dag),
        .resources = std::move(registered),
        .plan = plan,
        .simulated = completed,
        .makespan = makespan,
        .total_cost = plan.total_cost(),
        .per_resource_utilization = std::move(usage),
        .events_processed = report.events_processed,
        .trace = std::move(trace),
    };
}

}  // namespace gridsched::broker

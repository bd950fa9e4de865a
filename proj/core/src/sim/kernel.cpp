#include "gridsched/sim/kernel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace gridsched::sim {

namespace {

// Heap comparator: `a` sorts after `b`. With std::push_heap this yields a min-heap on
// (fire_time, seq).
struct EventAfter {
    bool operator()(const Event& a, const Event& b) const noexcept {
        if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
        return a.seq > b.seq;
    }
};

constexpr Tag kStartTag = -1;

}  // namespace

struct Kernel::EntityRecord {
    std::string name;
    Handler handler;
    Behavior behavior;
    Process process;
    std::unique_ptr<Context> context;
    std::deque<Event> deferred;
    const TagPredicate* wait_predicate = nullptr;
    std::optional<Event>* wait_slot = nullptr;

    bool is_process() const noexcept { return static_cast<bool>(behavior); }
    bool waiting() const noexcept { return wait_slot != nullptr; }
};

void Process::resume() {
    handle_.resume();
    if (auto& err = handle_.promise().error) {
        auto e = std::exchange(err, nullptr);
        std::rethrow_exception(e);
    }
}

bool ReceiveAwaiter::await_ready() {
    result_ = kernel_->take_deferred(self_, predicate_);
    return result_.has_value();
}

void ReceiveAwaiter::await_suspend(std::coroutine_handle<>) noexcept {
    kernel_->begin_wait(self_, &predicate_, &result_);
}

Event ReceiveAwaiter::await_resume() {
    return std::move(*result_);
}

SimTime Context::now() const noexcept {
    return kernel_->now();
}

const std::string& Context::name() const {
    return kernel_->name(self_);
}

std::uint64_t Context::send(EntityId dst, SimTime delay, Tag tag, Payload payload) {
    return kernel_->schedule(self_, dst, delay, tag, std::move(payload));
}

Kernel::Kernel() = default;

Kernel::~Kernel() {
    // Coroutine frames may hold awaiters that point back into entity records; destroy the
    // processes before the records they reference.
    for (auto& rec : entities_) {
        rec->wait_slot = nullptr;
        rec->wait_predicate = nullptr;
        rec->process = Process{};
    }
}

EntityId Kernel::add_entity(std::string name) {
    if (started_) throw std::logic_error("cannot register entity '" + name + "' after the simulation started");
    if (find(name)) throw std::invalid_argument("duplicate entity name '" + name + "'");
    EntityId id{entities_.size()};
    auto rec = std::make_unique<EntityRecord>();
    rec->name = std::move(name);
    rec->context = std::make_unique<Context>(*this, id);
    entities_.push_back(std::move(rec));
    return id;
}

EntityId Kernel::register_entity(std::string name, Handler handler) {
    if (!handler) throw std::invalid_argument("entity handler must be callable");
    EntityId id = add_entity(std::move(name));
    record(id).handler = std::move(handler);
    return id;
}

EntityId Kernel::register_process(std::string name, Behavior behavior) {
    if (!behavior) throw std::invalid_argument("process behavior must be callable");
    EntityId id = add_entity(std::move(name));
    record(id).behavior = std::move(behavior);
    return id;
}

Kernel::EntityRecord& Kernel::record(EntityId id) {
    if (id.value >= entities_.size()) throw std::out_of_range("unknown entity id " + std::to_string(id.value));
    return *entities_[id.value];
}

const Kernel::EntityRecord& Kernel::record(EntityId id) const {
    if (id.value >= entities_.size()) throw std::out_of_range("unknown entity id " + std::to_string(id.value));
    return *entities_[id.value];
}

std::size_t Kernel::entity_count() const noexcept {
    return entities_.size();
}

const std::string& Kernel::name(EntityId id) const {
    return record(id).name;
}

std::optional<EntityId> Kernel::find(const std::string& name) const {
    for (std::size_t i = 0; i < entities_.size(); ++i) {
        if (entities_[i]->name == name) return EntityId{i};
    }
    return std::nullopt;
}

std::vector<Event> Kernel::deferred(EntityId id) const {
    const auto& q = record(id).deferred;
    return {q.begin(), q.end()};
}

std::uint64_t Kernel::schedule(EntityId src, EntityId dst, SimTime delay, Tag tag, Payload payload) {
    if (!(delay >= 0.0) || !std::isfinite(delay)) {
        throw std::invalid_argument("event delay must be finite and non-negative");
    }
    (void)record(src);
    (void)record(dst);
    const std::uint64_t seq = next_seq_++;
    future_.push_back(Event{src, dst, tag, clock_ + delay, seq, std::move(payload)});
    std::push_heap(future_.begin(), future_.end(), EventAfter{});
    return seq;
}

std::optional<Event> Kernel::take_deferred(EntityId id, const TagPredicate& predicate) {
    auto& q = record(id).deferred;
    auto it = std::find_if(q.begin(), q.end(), [&](const Event& ev) { return predicate(ev); });
    if (it == q.end()) return std::nullopt;
    Event ev = std::move(*it);
    q.erase(it);
    ++consumed_;
    return ev;
}

void Kernel::begin_wait(EntityId id, const TagPredicate* predicate, std::optional<Event>* slot) noexcept {
    auto& rec = *entities_[id.value];
    rec.wait_predicate = predicate;
    rec.wait_slot = slot;
}

void Kernel::resume_process(EntityRecord& rec, std::uint64_t seq, Tag tag) {
    try {
        rec.process.resume();
    } catch (...) {
        std::ostringstream msg;
        msg << "entity '" << rec.name << "' failed at t=" << format_time(clock_);
        if (tag == kStartTag) {
            msg << " while starting";
        } else {
            msg << " handling event seq=" << seq << " tag=" << tag;
        }
        std::throw_with_nested(SimulationError(msg.str(), seq, tag, rec.context->self(), clock_));
    }
}

void Kernel::start_processes() {
    for (auto& rec : entities_) {
        if (!rec->is_process()) continue;
        rec->process = rec->behavior(*rec->context);
        resume_process(*rec, 0, kStartTag);
    }
}

void Kernel::deliver(Event ev) {
    auto& rec = record(ev.dst);
    const auto seq = ev.seq;
    const auto tag = ev.tag;

    if (!rec.is_process()) {
        ++consumed_;
        try {
            rec.handler(*rec.context, ev);
        } catch (...) {
            std::ostringstream msg;
            msg << "entity '" << rec.name << "' failed at t=" << format_time(clock_) << " handling event seq=" << seq
                << " tag=" << tag;
            std::throw_with_nested(SimulationError(msg.str(), seq, tag, ev.dst, clock_));
        }
        return;
    }

    if (rec.process.done()) {
        ++dropped_;
        return;
    }
    if (rec.waiting() && (*rec.wait_predicate)(ev)) {
        ++consumed_;
        *rec.wait_slot = std::move(ev);
        rec.wait_slot = nullptr;
        rec.wait_predicate = nullptr;
        resume_process(rec, seq, tag);
        return;
    }
    rec.deferred.push_back(std::move(ev));
}

SimReport Kernel::run(std::optional<SimTime> until) {
    if (entities_.empty()) throw std::logic_error("run() requires at least one registered entity");
    if (!started_) {
        started_ = true;
        start_processes();
    }
    while (!future_.empty()) {
        if (until && future_.front().fire_time > *until) break;
        std::pop_heap(future_.begin(), future_.end(), EventAfter{});
        Event ev = std::move(future_.back());
        future_.pop_back();

        clock_ = ev.fire_time;
        ++processed_;
        if (trace_sink_) trace_sink_(TraceRecord{ev.fire_time, ev.seq, ev.src, ev.dst, ev.tag});
        deliver(std::move(ev));
    }
    return report();
}

SimReport Kernel::report() const {
    SimReport rep;
    rep.final_clock = clock_;
    rep.events_scheduled = next_seq_;
    rep.events_processed = processed_;
    rep.events_consumed = consumed_;
    rep.events_dropped = dropped_;
    rep.events_pending = future_.size();
    for (std::size_t i = 0; i < entities_.size(); ++i) {
        const auto& rec = *entities_[i];
        rep.events_deferred += rec.deferred.size();
        if (rec.is_process() && !rec.process.done() && rec.waiting()) rep.starved.push_back(EntityId{i});
    }
    return rep;
}

std::string format_time(double t) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, t);
    return ec == std::errc{} ? std::string(buf, end) : std::to_string(t);
}

std::string format_trace(const Kernel& kernel, const TraceRecord& rec) {
    std::string line = "time=" + format_time(rec.time);
    line += " seq=" + std::to_string(rec.seq);
    line += " src=" + kernel.name(rec.src);
    line += " dst=" + kernel.name(rec.dst);
    line += " tag=" + std::to_string(rec.tag);
    return line;
}

}  // namespace gridsched::sim

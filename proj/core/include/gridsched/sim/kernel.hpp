#pragma once

#include <any>
#include <coroutine>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gridsched/ids.hpp"

namespace gridsched::sim {

using Tag = int;
using Payload = std::any;

/// A timestamped message between two entities. Events are totally ordered by (fire_time, seq).
struct Event {
    EntityId src;
    EntityId dst;
    Tag tag = 0;
    SimTime fire_time = 0.0;
    std::uint64_t seq = 0;
    Payload payload;
};

using TagPredicate = std::function<bool(const Event&)>;

inline TagPredicate any_tag() {
    return [](const Event&) { return true; };
}

inline TagPredicate tag_is(Tag tag) {
    return [tag](const Event& ev) { return ev.tag == tag; };
}

/// One delivered event, as written to the structured trace log.
struct TraceRecord {
    SimTime time = 0.0;
    std::uint64_t seq = 0;
    EntityId src;
    EntityId dst;
    Tag tag = 0;
};

struct SimReport {
    SimTime final_clock = 0.0;
    std::uint64_t events_scheduled = 0;
    std::uint64_t events_processed = 0;
    // Accounting at termination: scheduled == processed + pending, and every processed event
    // was consumed by a handler or receive, is still deferred, or was dropped.
    std::uint64_t events_consumed = 0;
    std::uint64_t events_deferred = 0;
    std::uint64_t events_dropped = 0;
    std::uint64_t events_pending = 0;
    /// Processes that were still blocked in a receive when the run ended.
    std::vector<EntityId> starved;
};

/// Raised when an entity behavior fails while handling an event; identifies that event.
class SimulationError : public std::runtime_error {
public:
    SimulationError(const std::string& what, std::uint64_t seq, Tag tag, EntityId dst, SimTime time)
        : std::runtime_error(what), seq_(seq), tag_(tag), dst_(dst), time_(time) {}

    std::uint64_t seq() const noexcept { return seq_; }
    Tag tag() const noexcept { return tag_; }
    EntityId dst() const noexcept { return dst_; }
    SimTime time() const noexcept { return time_; }

private:
    std::uint64_t seq_;
    Tag tag_;
    EntityId dst_;
    SimTime time_;
};

class Kernel;
class Context;

/// Coroutine type for process-style entities (the SimJava `body()` idiom). A process runs from
/// the start of the simulation until its first `co_await ctx.receive(...)`, and is resumed by the
/// kernel when a matching event is delivered.
class Process {
public:
    struct promise_type {
        std::exception_ptr error;

        Process get_return_object() { return Process{std::coroutine_handle<promise_type>::from_promise(*this)}; }
        std::suspend_always initial_suspend() noexcept { return {}; }
        std::suspend_always final_suspend() noexcept { return {}; }
        void return_void() noexcept {}
        void unhandled_exception() noexcept { error = std::current_exception(); }
    };

    Process() = default;
    Process(Process&& other) noexcept : handle_(std::exchange(other.handle_, {})) {}
    Process& operator=(Process&& other) noexcept {
        if (this != &other) {
            reset();
            handle_ = std::exchange(other.handle_, {});
        }
        return *this;
    }
    Process(const Process&) = delete;
    Process& operator=(const Process&) = delete;
    ~Process() { reset(); }

    bool valid() const noexcept { return static_cast<bool>(handle_); }
    bool done() const noexcept { return !handle_ || handle_.done(); }

    /// Resumes the coroutine and rethrows anything it raised.
    void resume();

private:
    explicit Process(std::coroutine_handle<promise_type> h) : handle_(h) {}
    void reset() noexcept {
        if (handle_) handle_.destroy();
        handle_ = {};
    }

    std::coroutine_handle<promise_type> handle_;
};

using Handler = std::function<void(Context&, const Event&)>;
using Behavior = std::function<Process(Context&)>;

/// Awaitable returned by Context::receive. Completes immediately if the deferred queue already
/// holds a matching event.
class ReceiveAwaiter {
public:
    ReceiveAwaiter(Kernel& kernel, EntityId self, TagPredicate predicate)
        : kernel_(&kernel), self_(self), predicate_(std::move(predicate)) {}

    bool await_ready();
    void await_suspend(std::coroutine_handle<>) noexcept;
    Event await_resume();

private:
    Kernel* kernel_;
    EntityId self_;
    TagPredicate predicate_;
    std::optional<Event> result_;
};

/// The view an entity gets of the kernel while its behavior runs.
class Context {
public:
    Context(Kernel& kernel, EntityId self) : kernel_(&kernel), self_(self) {}

    EntityId self() const noexcept { return self_; }
    SimTime now() const noexcept;
    const std::string& name() const;

    std::uint64_t send(EntityId dst, SimTime delay, Tag tag, Payload payload = {});

    /// Selective receive: deferred queue first, then future deliveries.
    ReceiveAwaiter receive(TagPredicate predicate = any_tag()) { return {*kernel_, self_, std::move(predicate)}; }

    Kernel& kernel() noexcept { return *kernel_; }

private:
    Kernel* kernel_;
    EntityId self_;
};

/// Deterministic single-threaded discrete-event kernel with a future-event queue ordered by
/// (fire_time, seq) and a deferred queue per process entity.
class Kernel {
public:
    Kernel();
    ~Kernel();
    Kernel(const Kernel&) = delete;
    Kernel& operator=(const Kernel&) = delete;

    /// Reactive entity: `handler` is invoked for every event delivered to it.
    EntityId register_entity(std::string name, Handler handler);
    /// Process entity: `behavior` is started at the beginning of run().
    EntityId register_process(std::string name, Behavior behavior);

    std::uint64_t schedule(EntityId src, EntityId dst, SimTime delay, Tag tag, Payload payload = {});

    SimReport run(std::optional<SimTime> until = std::nullopt);

    SimTime now() const noexcept { return clock_; }
    bool started() const noexcept { return started_; }
    std::size_t entity_count() const noexcept;
    const std::string& name(EntityId id) const;
    std::optional<EntityId> find(const std::string& name) const;

    /// Events delivered to `id` but not yet consumed by a receive, in arrival order.
    std::vector<Event> deferred(EntityId id) const;

    void set_trace_sink(std::function<void(const TraceRecord&)> sink) { trace_sink_ = std::move(sink); }

private:
    friend class ReceiveAwaiter;
    struct EntityRecord;

    EntityId add_entity(std::string name);
    EntityRecord& record(EntityId id);
    const EntityRecord& record(EntityId id) const;
    void start_processes();
    void deliver(Event ev);
    void resume_process(EntityRecord& rec, std::uint64_t seq, Tag tag);
    SimReport report() const;

    std::optional<Event> take_deferred(EntityId id, const TagPredicate& predicate);
    void begin_wait(EntityId id, const TagPredicate* predicate, std::optional<Event>* slot) noexcept;

    std::vector<std::unique_ptr<EntityRecord>> entities_;
    std::vector<Event> future_;  // binary heap, see EventAfter
    SimTime clock_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t processed_ = 0;
    std::uint64_t consumed_ = 0;
    std::uint64_t dropped_ = 0;
    bool started_ = false;
    std::function<void(const TraceRecord&)> trace_sink_;
};

/// Formats a trace record as `time=<t> seq=<n> src=<name> dst=<name> tag=<k>`; `time` uses the
/// shortest representation that round-trips.
std::string format_trace(const Kernel& kernel, const TraceRecord& rec);

/// Shortest round-trip decimal form of a double.
std::string format_time(double t);

}  // namespace gridsched::sim

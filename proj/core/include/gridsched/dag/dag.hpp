#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gridsched/ids.hpp"

namespace gridsched::dag {

/// Fields the file format does not know about, kept verbatim (name, raw JSON text) so that a
/// load/save cycle does not lose them.
using Extensions = std::vector<std::pair<std::string, std::string>>;

struct Position {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

struct TaskNode {
    TaskId id;
    std::string name;
    double length_mi = 0.0;  // million instructions
    std::optional<Position> position;
    Extensions extra;

    friend bool operator==(const TaskNode&, const TaskNode&) = default;
};

struct DependencyEdge {
    TaskId src;
    TaskId dst;
    double bytes = 0.0;
    Extensions extra;

    friend bool operator==(const DependencyEdge&, const DependencyEdge&) = default;
};

/// Structural errors caught while building a DagApp (bad ids, bad quantities).
class DagError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A task graph as entered by the user. May violate the DAG rules; see validate().
class DagApp {
public:
    DagApp() = default;
    explicit DagApp(std::string name) : name_(std::move(name)) {}

    /// Throws DagError on a duplicate id or a non-positive length.
    const TaskNode& add_task(TaskNode task);
    /// Throws DagError if either endpoint is unknown or bytes is negative. Self-loops and
    /// duplicate edges are accepted here and reported by validate().
    const DependencyEdge& add_edge(DependencyEdge edge);

    const std::string& name() const noexcept { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    std::span<const TaskNode> tasks() const noexcept { return tasks_; }
    std::span<const DependencyEdge> edges() const noexcept { return edges_; }
    std::size_t size() const noexcept { return tasks_.size(); }
    bool empty() const noexcept { return tasks_.empty(); }

    const TaskNode* find(TaskId id) const noexcept;
    bool contains(TaskId id) const noexcept { return index_.contains(id); }

    Extensions extra;

    friend bool operator==(const DagApp& a, const DagApp& b) {
        return a.name_ == b.name_ && a.tasks_ == b.tasks_ && a.edges_ == b.edges_ && a.extra == b.extra;
    }

private:
    std::string name_;
    std::vector<TaskNode> tasks_;
    std::vector<DependencyEdge> edges_;
    std::map<TaskId, std::size_t> index_;
};

enum class ErrorCode {
    Cycle,
    MultipleEntry,
    MultipleExit,
    NoEntry,
    NoExit,
    DanglingIntermediate,
    FloatingTask,
    DuplicateEdge,
    SelfLoop,
    EmptyDag,
};

std::string_view to_string(ErrorCode code) noexcept;
std::optional<ErrorCode> parse_error_code(std::string_view text) noexcept;

struct ValidationError {
    ErrorCode code;
    std::vector<TaskId> ids;  // offending tasks; [src, dst] for DuplicateEdge

    friend bool operator==(const ValidationError&, const ValidationError&) = default;
};

/// `CODE id id ...`, the line format used on stderr by the command-line tool.
std::string format_error(const ValidationError& error);

/// Every rule violation in `dag`, in a fixed order: EmptyDag; SelfLoop; DuplicateEdge;
/// FloatingTask; Cycle (one per strongly connected component); NoEntry; MultipleEntry; NoExit;
/// MultipleExit; DanglingIntermediate. An empty result means the DAG is valid.
///
/// Self-loops and repeated edges are reported once and otherwise ignored. A task with no edges in
/// a DAG of two or more tasks is floating and takes no further part in the entry/exit checks.
/// When several sinks exist, a sink whose ancestor set is strictly largest is the exit and the
/// remaining sinks are dangling intermediates; if the largest is shared, the tied sinks are
/// reported as MultipleExit and any smaller ones as dangling. Sources are treated symmetrically
/// using descendant sets.
std::vector<ValidationError> validate(const DagApp& dag);

/// Thrown by topological_order on a cyclic graph.
class CycleError : public DagError {
public:
    explicit CycleError(std::vector<TaskId> ids);
    const std::vector<TaskId>& ids() const noexcept { return ids_; }

private:
    std::vector<TaskId> ids_;
};

/// Kahn's algorithm with the smallest ready TaskId first. Self-loops are ignored. Throws
/// CycleError naming the tasks that lie on cycles.
std::vector<TaskId> topological_order(const DagApp& dag);

enum class TaskKind { Entry, Intermediate, Exit };

/// Thrown when constructing a ValidatedDag from an invalid DagApp.
class InvalidDag : public DagError {
public:
    explicit InvalidDag(std::vector<ValidationError> errors);
    const std::vector<ValidationError>& errors() const noexcept { return errors_; }

private:
    std::vector<ValidationError> errors_;
};

struct Link {
    TaskId task;
    double bytes = 0.0;

    friend bool operator==(const Link&, const Link&) = default;
};

/// A DagApp that passed validate(): acyclic, one entry, one exit, no floating tasks.
/// Immutable; traversal queries are answered from precomputed adjacency.
class ValidatedDag {
public:
    /// Throws InvalidDag carrying every validation error.
    explicit ValidatedDag(DagApp app);

    const DagApp& app() const noexcept { return app_; }
    std::size_t size() const noexcept { return app_.size(); }
    const std::string& name() const noexcept { return app_.name(); }

    /// Throws std::out_of_range for an unknown id.
    const TaskNode& task(TaskId id) const;
    TaskKind kind(TaskId id) const;

    TaskId entry_task() const noexcept { return entry_; }
    TaskId exit_task() const noexcept { return exit_; }

    std::span<const Link> parents(TaskId id) const;
    std::span<const Link> children(TaskId id) const;

    std::span<const TaskId> topological_order() const noexcept { return topo_; }

    /// Unscheduled tasks whose parents are all scheduled, ascending by id. `scheduled` must be
    /// closed under ancestry; std::logic_error otherwise.
    std::vector<TaskId> immediate_unscheduled_tasks(const std::set<TaskId>& scheduled) const;

private:
    std::size_t index(TaskId id) const;

    DagApp app_;
    std::map<TaskId, std::size_t> index_;
    std::vector<std::vector<Link>> parents_;
    std::vector<std::vector<Link>> children_;
    std::vector<TaskId> topo_;
    TaskId entry_;
    TaskId exit_;
};

}  // namespace gridsched::dag

#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gridsched/broker/broker.hpp"
#include "gridsched/dag/dag.hpp"
#include "gridsched/grid/resource.hpp"
#include "gridsched/sched/scheduler.hpp"

namespace gridsched::io {

/// Version written into every file envelope and the only version accepted on load.
inline constexpr int kFormatVersion = 1;

/// Malformed or inconsistent file content. `line`/`column` are 1-based and zero when the
/// problem is not tied to a text position (schema and reference errors).
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t line = 0, std::size_t column = 0);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// The file could not be read or written.
class FileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Envelope: {"format_version": 1, "kind": "dag" | "resources" | "plan" | "result", "body": ...}

dag::DagApp parse_dag(std::string_view text);
std::string dump_dag(const dag::DagApp& dag);
dag::DagApp load_dag(const std::filesystem::path& path);
void save_dag(const dag::DagApp& dag, const std::filesystem::path& path);

/// Missing `architecture` defaults to "generic", missing `time_zone` and `cost_per_sec` to 0.
std::vector<grid::ResourceSpec> parse_resources(std::string_view text);
std::string dump_resources(std::span<const grid::ResourceSpec> resources);
std::vector<grid::ResourceSpec> load_resources(const std::filesystem::path& path);
void save_resources(std::span<const grid::ResourceSpec> resources, const std::filesystem::path& path);

/// Plan record: per-task {task, resource, machine, pe, start, finish, cost} plus makespan,
/// total_cost and the resource order used. Times at full precision.
std::string dump_plan(const sched::SchedulePlan& plan, std::span<const grid::RegistryEntry> resources);

/// Result record with fields in a fixed order: plan, simulated, makespan, total_cost,
/// per_resource_utilization, events_processed.
std::string dump_result(const broker::ExperimentResult& result);

/// `CODE id id ...` lines, one per error.
std::string format_validation(std::span<const dag::ValidationError> errors);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace gridsched::io

#pragma once

// JSON encoding shared by the file formats and the HTTP service. Not installed.

#include <span>
#include <string_view>

#include <json.hpp>

#include "gridsched/broker/broker.hpp"
#include "gridsched/dag/dag.hpp"
#include "gridsched/io/formats.hpp"
#include "gridsched/io/gantt.hpp"

namespace gridsched::io::detail {

using Json = nlohmann::ordered_json;

/// Throws FormatError carrying the line and column of a syntax error.
Json parse_json(std::string_view text);

Json envelope(std::string_view kind, Json body);

/// Returns the body of an envelope of the given kind. When `allow_bare` is set, a document
/// without `format_version` is taken to be the body itself.
const Json& body_of(const Json& doc, std::string_view kind, bool allow_bare);

dag::DagApp dag_from_json(const Json& body);
Json dag_to_json(const dag::DagApp& dag);

/// With `validate_specs` unset, value checks are left to the consumer (grid::validate).
std::vector<grid::ResourceSpec> resources_from_json(const Json& body, bool validate_specs = true);
Json resources_to_json(std::span<const grid::ResourceSpec> resources);

Json plan_to_json(const sched::SchedulePlan& plan, std::span<const grid::RegistryEntry> resources);
Json result_to_json(const broker::ExperimentResult& result);
Json gantt_to_json(const GanttModel& model);
Json errors_to_json(std::span<const dag::ValidationError> errors);

}  // namespace gridsched::io::detail

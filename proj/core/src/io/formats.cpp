#include "gridsched/io/formats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "io/json_codec.hpp"

namespace gridsched::io {

FormatError::FormatError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"
                                  : what),
      line_(line),
      column_(column) {}

namespace detail {

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
    throw FormatError(path + ": " + msg);
}

const Json& member(const Json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(path, std::string("missing required field '") + key + "'");
    return *it;
}

double as_number(const Json& v, const std::string& path) {
    if (!v.is_number()) schema_error(path, "expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) schema_error(path, "expected a finite number");
    return d;
}

std::int64_t as_integer(const Json& v, const std::string& path) {
    if (!v.is_number_integer()) schema_error(path, "expected an integer");
    return v.get<std::int64_t>();
}

int as_int(const Json& v, const std::string& path) {
    std::int64_t i = as_integer(v, path);
    if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) schema_error(path, "out of range");
    return static_cast<int>(i);
}

std::string as_string(const Json& v, const std::string& path) {
    if (!v.is_string()) schema_error(path, "expected a string");
    return v.get<std::string>();
}

const Json& as_object(const Json& v, const std::string& path) {
    if (!v.is_object()) schema_error(path, "expected an object");
    return v;
}

const Json& as_array(const Json& v, const std::string& path) {
    if (!v.is_array()) schema_error(path, "expected an array");
    return v;
}

dag::Extensions unknown_fields(const Json& obj, std::initializer_list<std::string_view> known) {
    dag::Extensions extra;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) extra.emplace_back(it.key(), it->dump());
    }
    return extra;
}

void put_extensions(Json& obj, const dag::Extensions& extra) {
    for (const auto& [key, raw] : extra) obj[key] = Json::parse(raw);
}

std::string resource_name(std::span<const grid::RegistryEntry> resources, ResourceId id) {
    for (const auto& r : resources) {
        if (r.id == id) return r.spec.name;
    }
    return std::to_string(id.value);
}

Json task_record(const broker::TaskRecord& r, std::span<const grid::RegistryEntry> resources) {
    Json j;
    j["task"] = r.task.value;
    j["resource"] = resource_name(resources, r.resource);
    j["machine"] = r.pe.machine;
    j["pe"] = r.pe.pe;
    j["start"] = r.start;
    j["finish"] = r.finish;
    j["cost"] = r.cost;
    return j;
}

}  // namespace

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        // e.byte is the 1-based offset of the offending character.
        std::size_t offset = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i < offset; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string msg = e.what();
        // Drop nlohmann's "[json.exception.parse_error.101] " prefix.
        if (auto pos = msg.find("] "); pos != std::string::npos) msg = msg.substr(pos + 2);
        throw FormatError("parse error: " + msg, line, column);
    }
}

Json envelope(std::string_view kind, Json body) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["kind"] = kind;
    doc["body"] = std::move(body);
    return doc;
}

const Json& body_of(const Json& doc, std::string_view kind, bool allow_bare) {
    if (!doc.is_object() || !doc.contains("format_version")) {
        if (allow_bare) return doc;
        schema_error("document", "missing format_version envelope");
    }
    const Json& version = doc["format_version"];
    if (!version.is_number_integer()) schema_error("format_version", "expected an integer");
    if (version.get<std::int64_t>() != kFormatVersion) {
        throw FormatError("unsupported format_version " + version.dump() + " (this build reads version " +
                          std::to_string(kFormatVersion) + ")");
    }
    std::string actual = as_string(member(doc, "kind", "document"), "kind");
    if (actual != kind) schema_error("kind", "expected '" + std::string(kind) + "', found '" + actual + "'");
    return member(doc, "body", "document");
}

dag::DagApp dag_from_json(const Json& body) {
    as_object(body, "body");
    dag::DagApp dag;
    if (auto it = body.find("name"); it != body.end()) dag.set_name(as_string(*it, "body.name"));
    dag.extra = unknown_fields(body, {"name", "tasks", "edges"});

    const Json& tasks = as_array(member(body, "tasks", "body"), "body.tasks");
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const std::string path = "body.tasks[" + std::to_string(i) + "]";
        const Json& t = as_object(tasks[i], path);
        dag::TaskNode node;
        node.id = TaskId{as_integer(member(t, "id", path), path + ".id")};
        node.name = t.contains("name") ? as_string(t["name"], path + ".name") : "T" + std::to_string(node.id.value);
        node.length_mi = as_number(member(t, "length_mi", path), path + ".length_mi");
        const bool has_x = t.contains("x"), has_y = t.contains("y");
        if (has_x != has_y) schema_error(path, "'x' and 'y' must be given together");
        if (has_x) node.position = dag::Position{as_number(t["x"], path + ".x"), as_number(t["y"], path + ".y")};
        node.extra = unknown_fields(t, {"id", "name", "length_mi", "x", "y"});
        try {
            dag.add_task(std::move(node));
        } catch (const dag::DagError& e) {
            schema_error(path, e.what());
        }
    }

    const Json& edges = as_array(member(body, "edges", "body"), "body.edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string path = "body.edges[" + std::to_string(i) + "]";
        const Json& e = as_object(edges[i], path);
        dag::DependencyEdge edge;
        edge.src = TaskId{as_integer(member(e, "src", path), path + ".src")};
        edge.dst = TaskId{as_integer(member(e, "dst", path), path + ".dst")};
        edge.bytes = e.contains("bytes") ? as_number(e["bytes"], path + ".bytes") : 0.0;
        edge.extra = unknown_fields(e, {"src", "dst", "bytes"});
        try {
            dag.add_edge(std::move(edge));
        } catch (const dag::DagError& err) {
            schema_error(path, err.what());
        }
    }
    return dag;
}

Json dag_to_json(const dag::DagApp& dag) {
    Json body;
    body["name"] = dag.name();
    Json tasks = Json::array();
    for (const auto& t : dag.tasks()) {
        Json j;
        j["id"] = t.id.value;
        j["name"] = t.name;
        j["length_mi"] = t.length_mi;
        if (t.position) {
            j["x"] = t.position->x;
            j["y"] = t.position->y;
        }
        put_extensions(j, t.extra);
        tasks.push_back(std::move(j));
    }
    Json edges = Json::array();
    for (const auto& e : dag.edges()) {
        Json j;
        j["src"] = e.src.value;
        j["dst"] = e.dst.value;
        j["bytes"] = e.bytes;
        put_extensions(j, e.extra);
        edges.push_back(std::move(j));
    }
    body["tasks"] = std::move(tasks);
    body["edges"] = std::move(edges);
    put_extensions(body, dag.extra);
    return body;
}

std::vector<grid::ResourceSpec> resources_from_json(const Json& body, bool validate_specs) {
    as_array(body, "body");
    std::vector<grid::ResourceSpec> specs;
    for (std::size_t i = 0; i < body.size(); ++i) {
        const std::string path = "resources[" + std::to_string(i) + "]";
        const Json& r = as_object(body[i], path);
        grid::ResourceSpec spec;
        spec.name = as_string(member(r, "name", path), path + ".name");
        if (r.contains("architecture")) spec.architecture = as_string(r["architecture"], path + ".architecture");
        if (r.contains("time_zone")) spec.time_zone = as_number(r["time_zone"], path + ".time_zone");
        spec.num_machines = as_int(member(r, "num_machines", path), path + ".num_machines");
        spec.pes_per_machine = as_int(member(r, "pes_per_machine", path), path + ".pes_per_machine");
        spec.pe_rating_mips = as_number(member(r, "pe_rating_mips", path), path + ".pe_rating_mips");
        spec.baud_rate_bps = as_number(member(r, "baud_rate_bps", path), path + ".baud_rate_bps");
        if (r.contains("cost_per_sec")) spec.cost_per_sec = as_number(r["cost_per_sec"], path + ".cost_per_sec");
        if (validate_specs) {
            try {
                grid::validate(spec);
            } catch (const grid::InvalidResourceSpec& e) {
                schema_error(path + "." + e.field(), e.what());
            }
        }
        specs.push_back(std::move(spec));
    }
    return specs;
}

Json resources_to_json(std::span<const grid::ResourceSpec> resources) {
    Json body = Json::array();
    for (const auto& r : resources) {
        Json j;
        j["name"] = r.name;
        j["architecture"] = r.architecture;
        j["time_zone"] = r.time_zone;
        j["num_machines"] = r.num_machines;
        j["pes_per_machine"] = r.pes_per_machine;
        j["pe_rating_mips"] = r.pe_rating_mips;
        j["baud_rate_bps"] = r.baud_rate_bps;
        j["cost_per_sec"] = r.cost_per_sec;
        body.push_back(std::move(j));
    }
    return body;
}

Json plan_to_json(const sched::SchedulePlan& plan, std::span<const grid::RegistryEntry> resources) {
    Json j;
    Json order = Json::array();
    for (ResourceId id : plan.resource_order_used()) order.push_back(resource_name(resources, id));
    j["resource_order_used"] = std::move(order);
    Json assignments = Json::array();
    for (const auto& a : plan.assignments()) {
        assignments.push_back(task_record({a.task, a.resource, a.pe, a.start, a.finish, a.cost}, resources));
    }
    j["assignments"] = std::move(assignments);
    j["makespan"] = plan.makespan();
    j["total_cost"] = plan.total_cost();
    return j;
}

Json result_to_json(const broker::ExperimentResult& result) {
    Json j;
    j["plan"] = plan_to_json(result.plan, result.resources);
    Json simulated = Json::array();
    for (const auto& r : result.simulated) simulated.push_back(task_record(r, result.resources));
    j["simulated"] = std::move(simulated);
    j["makespan"] = result.makespan;
    j["total_cost"] = result.total_cost;
    Json usage = Json::array();
    for (const auto& u : result.per_resource_utilization) {
        Json row;
        row["resource"] = u.name;
        row["pe_count"] = u.pe_count;
        row["busy_time"] = u.busy_time;
        row["utilization"] = u.utilization;
        row["cost"] = u.cost;
        usage.push_back(std::move(row));
    }
    j["per_resource_utilization"] = std::move(usage);
    j["events_processed"] = result.events_processed;
    return j;
}

Json gantt_to_json(const GanttModel& model) {
    Json j;
    j["makespan"] = model.makespan;
    Json rows = Json::array();
    for (const auto& row : model.rows) {
        Json r;
        r["label"] = row.label;
        r["machine"] = row.machine;
        r["pe"] = row.pe;
        Json bars = Json::array();
        for (const auto& b : row.bars) {
            Json bar;
            bar["task"] = b.task.value;
            bar["name"] = b.name;
            bar["start"] = b.start;
            bar["finish"] = b.finish;
            bar["cost"] = b.cost;
            bars.push_back(std::move(bar));
        }
        r["bars"] = std::move(bars);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j;
}

Json errors_to_json(std::span<const dag::ValidationError> errors) {
    Json arr = Json::array();
    for (const auto& e : errors) {
        Json j;
        j["code"] = std::string(to_string(e.code));
        Json ids = Json::array();
        for (TaskId id : e.ids) ids.push_back(id.value);
        j["ids"] = std::move(ids);
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace detail

using detail::Json;

dag::DagApp parse_dag(std::string_view text) {
    Json doc = detail::parse_json(text);
    return detail::dag_from_json(detail::body_of(doc, "dag", false));
}

std::string dump_dag(const dag::DagApp& dag) {
    return detail::envelope("dag", detail::dag_to_json(dag)).dump(2) + "\n";
}

dag::DagApp load_dag(const std::filesystem::path& path) {
    return parse_dag(read_file(path));
}

void save_dag(const dag::DagApp& dag, const std::filesystem::path& path) {
    write_file(path, dump_dag(dag));
}

std::vector<grid::ResourceSpec> parse_resources(std::string_view text) {
    Json doc = detail::parse_json(text);
    return detail::resources_from_json(detail::body_of(doc, "resources", false));
}

std::string dump_resources(std::span<const grid::ResourceSpec> resources) {
    return detail::envelope("resources", detail::resources_to_json(resources)).dump(2) + "\n";
}

std::vector<grid::ResourceSpec> load_resources(const std::filesystem::path& path) {
    return parse_resources(read_file(path));
}

void save_resources(std::span<const grid::ResourceSpec> resources, const std::filesystem::path& path) {
    write_file(path, dump_resources(resources));
}

std::string dump_plan(const sched::SchedulePlan& plan, std::span<const grid::RegistryEntry> resources) {
    return detail::envelope("plan", detail::plan_to_json(plan, resources)).dump(2) + "\n";
}

std::string dump_result(const broker::ExperimentResult& result) {
    return detail::envelope("result", detail::result_to_json(result)).dump(2) + "\n";
}

std::string format_validation(std::span<const dag::ValidationError> errors) {
    std::string out;
    for (const auto& e : errors) out += dag::format_error(e) + "\n";
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw FileError("error while reading '" + path.string() + "'");
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw FileError("error while writing '" + path.string() + "'");
}

}  // namespace gridsched::io

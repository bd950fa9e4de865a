#include "gridsched/api/service.hpp"

#include <array>
#include <stdexcept>

#include <httplib.h>

#include "gridsched/broker/broker.hpp"
#include "gridsched/io/formats.hpp"
#include "gridsched/io/gantt.hpp"
#include "io/json_codec.hpp"

namespace gridsched::api {

namespace {

using io::detail::Json;

constexpr std::array<std::string_view, 4> kRoutes{"/api/validate", "/api/schedule", "/api/simulate", "/api/algorithms"};

// Thrown for client errors that are not FormatErrors (bad options, wrong body shape).
struct BadRequest : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Response json_response(int status, const Json& body) {
    return Response{status, body.dump(2) + "\n"};
}

Response failure(int status, Json errors) {
    Json body;
    body["ok"] = false;
    body["errors"] = std::move(errors);
    return json_response(status, body);
}

Json message_error(std::string_view code, std::string_view message) {
    Json e;
    e["code"] = code;
    e["message"] = message;
    return e;
}

Response bad_request(const io::FormatError& e) {
    Json err = message_error("ParseError", e.what());
    if (e.line() > 0) {
        err["line"] = e.line();
        err["column"] = e.column();
    }
    return failure(400, Json::array({err}));
}

broker::ExperimentConfig read_config(std::string_view text) {
    Json doc = io::detail::parse_json(text);
    if (!doc.is_object()) throw BadRequest("request body must be an object with 'dag' and 'resources'");
    if (!doc.contains("dag")) throw BadRequest("request body is missing 'dag'");
    if (!doc.contains("resources")) throw BadRequest("request body is missing 'resources'");

    broker::ExperimentConfig config;
    config.dag = io::detail::dag_from_json(io::detail::body_of(doc["dag"], "dag", true));
    config.resources =
        io::detail::resources_from_json(io::detail::body_of(doc["resources"], "resources", true), false);
    if (auto it = doc.find("options"); it != doc.end() && !it->is_null()) {
        if (!it->is_object()) throw BadRequest("'options' must be an object");
        if (auto a = it->find("algorithm"); a != it->end()) {
            if (!a->is_string()) throw BadRequest("options.algorithm must be a string");
            config.algorithm = a->get<std::string>();
        }
        if (auto o = it->find("order"); o != it->end()) {
            auto order = o->is_string() ? sched::parse_resource_order(o->get<std::string>()) : std::nullopt;
            if (!order) throw BadRequest("options.order must be \"fastest\" or \"cheapest\"");
            config.order = *order;
        }
    }
    return config;
}

// Runs `work` and maps the library's exceptions onto status codes.
template <typename F>
Response guarded(F&& work) {
    try {
        return work();
    } catch (const io::FormatError& e) {
        return bad_request(e);
    } catch (const BadRequest& e) {
        return failure(400, Json::array({message_error("BadRequest", e.what())}));
    } catch (const dag::InvalidDag& e) {
        return failure(422, io::detail::errors_to_json(e.errors()));
    } catch (const sched::NoResources& e) {
        return failure(422, Json::array({message_error("NoResources", e.what())}));
    } catch (const grid::InvalidResourceSpec& e) {
        Json err = message_error("InvalidResource", e.what());
        err["field"] = e.field();
        return failure(422, Json::array({err}));
    } catch (const std::invalid_argument& e) {
        return failure(422, Json::array({message_error("InvalidInput", e.what())}));
    } catch (const broker::PlanMismatch& e) {
        return failure(500, Json::array({message_error("PlanMismatch", e.what())}));
    } catch (const std::exception& e) {
        return failure(500, Json::array({message_error("InternalError", e.what())}));
    }
}

Response validate_endpoint(std::string_view body) {
    return guarded([&] {
        Json doc = io::detail::parse_json(body);
        dag::DagApp dag = io::detail::dag_from_json(io::detail::body_of(doc, "dag", true));
        auto errors = dag::validate(dag);
        Json out;
        out["ok"] = errors.empty();
        out["errors"] = io::detail::errors_to_json(errors);
        return json_response(200, out);
    });
}

Response schedule_endpoint(std::string_view body) {
    return guarded([&] {
        auto planned = broker::plan_experiment(read_config(body));
        Json out;
        out["ok"] = true;
        out["plan"] = io::detail::plan_to_json(planned.plan, planned.resources);
        return json_response(200, out);
    });
}

Response simulate_endpoint(std::string_view body) {
    return guarded([&] {
        auto result = broker::run_experiment(read_config(body));
        Json payload = io::detail::result_to_json(result);
        payload["gantt"] = io::detail::gantt_to_json(io::build_gantt(result));
        Json out;
        out["ok"] = true;
        out["result"] = std::move(payload);
        return json_response(200, out);
    });
}

Response algorithms_endpoint() {
    Json out;
    out["algorithms"] = Json::array();
    for (auto name : broker::known_algorithms()) out["algorithms"].push_back(name);
    out["orders"] = Json::array({"fastest", "cheapest"});
    return json_response(200, out);
}

}  // namespace

Response handle(std::string_view method, std::string_view path, std::string_view body) {
    bool known = false;
    for (auto r : kRoutes) known = known || r == path;
    if (!known) return failure(404, Json::array({message_error("NotFound", "no such endpoint")}));

    const bool is_get = path == "/api/algorithms";
    if (method != (is_get ? "GET" : "POST")) {
        return failure(405, Json::array({message_error("MethodNotAllowed", is_get ? "use GET" : "use POST")}));
    }
    if (body.size() > kMaxRequestBytes) {
        return failure(413, Json::array({message_error("PayloadTooLarge", "request body exceeds 5 MB")}));
    }

    if (path == "/api/validate") return validate_endpoint(body);
    if (path == "/api/schedule") return schedule_endpoint(body);
    if (path == "/api/simulate") return simulate_endpoint(body);
    return algorithms_endpoint();
}

struct Server::Impl {
    ServerOptions options;
    httplib::Server http;
    int port = -1;
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>()) {
    impl_->options = std::move(options);
    auto& http = impl_->http;
    http.set_payload_max_length(kMaxRequestBytes);

    if (impl_->options.static_dir) {
        if (!http.set_mount_point("/", impl_->options.static_dir->string())) {
            throw std::runtime_error("static directory '" + impl_->options.static_dir->string() + "' does not exist");
        }
    }

    auto route = [](const httplib::Request& req, httplib::Response& res) {
        Response r = handle(req.method, req.path, req.body);
        if (r.status == 405) res.set_header("Allow", req.path == "/api/algorithms" ? "GET" : "POST");
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    const std::string pattern = "/api/.*";
    http.Get(pattern, route);
    http.Post(pattern, route);
    http.Put(pattern, route);
    http.Patch(pattern, route);
    http.Delete(pattern, route);
    http.Options(pattern, route);
}

Server::~Server() {
    stop();
}

int Server::bind() {
    auto& impl = *impl_;
    if (impl.port >= 0) return impl.port;
    if (impl.options.port == 0) {
        impl.port = impl.http.bind_to_any_port(impl.options.host);
    } else if (impl.http.bind_to_port(impl.options.host, impl.options.port)) {
        impl.port = impl.options.port;
    }
    if (impl.port < 0) {
        throw std::runtime_error("cannot bind " + impl.options.host + ":" + std::to_string(impl.options.port));
    }
    return impl.port;
}

void Server::run() {
    bind();
    impl_->http.listen_after_bind();
}

void Server::stop() {
    if (impl_) impl_->http.stop();
}

void Server::wait_until_ready() const {
    impl_->http.wait_until_ready();
}

}  // namespace gridsched::api

#include "gridsched_cli/cli.hpp"

#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include <CLI11.hpp>

#include "gridsched/api/service.hpp"
#include "gridsched/broker/broker.hpp"
#include "gridsched/io/formats.hpp"
#include "gridsched/io/gantt.hpp"

namespace gridsched::cli {

namespace {

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string plan_table(const sched::SchedulePlan& plan, std::span<const grid::RegistryEntry> resources) {
    std::map<ResourceId, std::string> names;
    for (const auto& r : resources) names[r.id] = r.spec.name;
    std::string out = "task  resource/machine/pe  start  finish  cost\n";
    for (const auto& a : plan.assignments()) {
        out += std::to_string(a.task.value) + "  " + names.at(a.resource) + "/" + std::to_string(a.pe.machine) + "/" +
               std::to_string(a.pe.pe) + "  " + fixed3(a.start) + "  " + fixed3(a.finish) + "  " + fixed3(a.cost) + "\n";
    }
    out += "makespan " + fixed3(plan.makespan()) + "  total_cost " + fixed3(plan.total_cost()) + "\n";
    return out;
}

struct Inputs {
    std::string dag;
    std::string resources;
};

broker::ExperimentConfig load_config(const Inputs& in, sched::ResourceOrder order, bool trace) {
    broker::ExperimentConfig config;
    config.dag = io::load_dag(in.dag);
    config.resources = io::load_resources(in.resources);
    config.order = order;
    config.trace = trace;
    return config;
}

// Maps outcome categories onto exit codes.
template <typename F>
int guarded(std::ostream& err, F&& work) {
    try {
        return work();
    } catch (const io::FileError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const io::FormatError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const dag::InvalidDag& e) {
        err << io::format_validation(e.errors());
        return kInvalidDag;
    } catch (const sched::NoResources& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const grid::InvalidResourceSpec& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}

int run_validate(const std::string& path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        dag::DagApp dag = io::load_dag(path);
        auto errors = dag::validate(dag);
        if (!errors.empty()) {
            err << io::format_validation(errors);
            return static_cast<int>(kInvalidDag);
        }
        out << "ok " << dag.size() << " tasks " << dag.edges().size() << " edges\n";
        return static_cast<int>(kOk);
    });
}

int run_schedule(const Inputs& in, sched::ResourceOrder order, const std::string& out_path, std::ostream& out,
                 std::ostream& err) {
    return guarded(err, [&] {
        auto planned = broker::plan_experiment(load_config(in, order, false));
        std::string doc = io::dump_plan(planned.plan, planned.resources);
        if (out_path.empty()) {
            out << doc;
        } else {
            io::write_file(out_path, doc);
            out << plan_table(planned.plan, planned.resources);
        }
        return static_cast<int>(kOk);
    });
}

int run_simulate(const Inputs& in, sched::ResourceOrder order, const std::string& gantt, bool trace,
                 const std::string& out_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto result = broker::run_experiment(load_config(in, order, trace));
        for (const auto& line : result.trace) err << line << "\n";
        std::string doc = io::dump_result(result);
        if (!out_path.empty()) io::write_file(out_path, doc);
        if (!gantt.empty()) {
            out << io::render_gantt(result, *io::parse_gantt_format(gantt));
        } else if (out_path.empty()) {
            out << doc;
        } else {
            out << "makespan " << fixed3(result.makespan) << "  total_cost " << fixed3(result.total_cost) << "\n";
        }
        return static_cast<int>(kOk);
    });
}

int run_serve(int port, const std::string& static_dir, std::ostream& out, std::ostream& err) {
    try {
        api::ServerOptions options;
        options.port = port;
        if (!static_dir.empty()) options.static_dir = static_dir;
        api::Server server(options);
        int bound = server.bind();
        out << "listening on port " << bound << std::endl;
        server.run();
        return kOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
}

}  // namespace

int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Min-Min DAG scheduling on simulated grid resources with advance reservation", "gridsched"};
    app.require_subcommand(1);

    std::string dag_path;
    auto* validate = app.add_subcommand("validate", "Check a DAG file; errors go to stderr as 'CODE id...'");
    validate->add_option("dag", dag_path, "DAG file")->required();

    Inputs in;
    std::string order_name = "fastest";
    std::string out_path;
    auto* schedule = app.add_subcommand("schedule", "Plan with Min-Min without simulating");
    schedule->add_option("dag", in.dag, "DAG file")->required();
    schedule->add_option("resources", in.resources, "resource file")->required();
    schedule->add_option("--order", order_name, "resource ordering")->check(CLI::IsMember({"fastest", "cheapest"}));
    schedule->add_option("--out", out_path, "write the plan file here");

    std::string gantt;
    bool trace = false;
    auto* simulate = app.add_subcommand("simulate", "Plan, reserve and execute in the simulator");
    simulate->add_option("dag", in.dag, "DAG file")->required();
    simulate->add_option("resources", in.resources, "resource file")->required();
    simulate->add_option("--order", order_name, "resource ordering")->check(CLI::IsMember({"fastest", "cheapest"}));
    simulate->add_option("--gantt", gantt, "print a Gantt chart")->check(CLI::IsMember({"text", "svg", "structured"}));
    simulate->add_flag("--trace", trace, "print every delivered event to stderr");
    simulate->add_option("--out", out_path, "write the result file here");

    int port = 8080;
    std::string static_dir;
    auto* serve = app.add_subcommand("serve", "Start the HTTP API");
    serve->add_option("--port", port, "listening port")->check(CLI::Range(0, 65535));
    serve->add_option("--static", static_dir, "directory served at /")->check(CLI::ExistingDirectory);

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    const sched::ResourceOrder order = *sched::parse_resource_order(order_name);
    if (validate->parsed()) return run_validate(dag_path, out, err);
    if (schedule->parsed()) return run_schedule(in, order, out_path, out, err);
    if (simulate->parsed()) return run_simulate(in, order, gantt, trace, out_path, out, err);
    return run_serve(port, static_dir, out, err);
}

}  // namespace gridsched::cli

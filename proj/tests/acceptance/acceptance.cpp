// Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero on any failure.
// Set GRIDSCHED_UPDATE_GOLDEN=1 to rewrite the golden files instead of comparing against them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "gridsched/api/service.hpp"
#include "gridsched/broker/broker.hpp"
#include "gridsched/grid/calendar.hpp"
#include "gridsched/grid/information_service.hpp"
#include "gridsched/io/formats.hpp"
#include "gridsched/sched/scheduler.hpp"
#include "gridsched_cli/cli.hpp"
#include "oracle.hpp"

namespace gs = gridsched;
using Json = nlohmann::json;

namespace {

struct Failure {
    std::string detail;
};

void expect(bool condition, const std::string& detail) {
    if (!condition) throw Failure{detail};
}

// Precedence checks gathered while criteria 4 and 5 run.
struct PrecedenceTally {
    std::size_t plans = 0;
    std::size_t edges = 0;
    std::vector<std::string> violations;
} g_precedence;

void tally_precedence(const oracle::Graph& g, const std::vector<oracle::Machine>& m, const gs::sched::SchedulePlan& plan) {
    ++g_precedence.plans;
    g_precedence.edges += g.edges.size();
    auto v = fixtures::precedence_violation(g, m, plan);
    if (!v.empty()) g_precedence.violations.push_back(v);
}

std::vector<gs::grid::RegistryEntry> register_all(const std::vector<oracle::Machine>& machines) {
    gs::grid::InformationService gis;
    for (const auto& s : fixtures::to_specs(machines)) gis.register_resource(s);
    return {gis.discover_resources().begin(), gis.discover_resources().end()};
}

// 1. Validation fixtures.
void validation_suite() {
    const std::map<std::string, std::set<std::string>> expected{
        {"valid_diamond.json", {}},
        {"valid_single.json", {}},
        {"cycle.json", {"Cycle"}},
        {"multiple_entry.json", {"MultipleEntry"}},
        {"multiple_exit.json", {"MultipleExit"}},
        {"no_entry.json", {"Cycle", "NoEntry", "NoExit"}},
        {"dangling_intermediate.json", {"DanglingIntermediate"}},
        {"floating_task.json", {"FloatingTask"}},
        {"duplicate_edge.json", {"DuplicateEdge"}},
        {"self_loop.json", {"SelfLoop"}},
        {"empty.json", {"EmptyDag"}},
    };
    for (const auto& [file, codes] : expected) {
        auto errors = gs::dag::validate(gs::io::load_dag(fixtures::data("validation/" + file)));
        std::set<std::string> got;
        for (const auto& e : errors) got.insert(std::string(gs::dag::to_string(e.code)));
        expect(got == codes, file + ": unexpected code set");
        expect(got.size() == errors.size(), file + ": a code was reported twice");
    }
}

// 2. One single-PE resource: makespan is the sum of execution times.
void single_resource_law() {
    std::mt19937_64 rng(20240501);
    std::uniform_int_distribution<int> mips(1, 40);
    for (int i = 0; i < 50; ++i) {
        auto g = oracle::random_dag(rng, 20);
        std::vector<oracle::Machine> m{{"solo", 50.0 * mips(rng), 1e6, 1.0, 1, 1}};
        auto result = gs::broker::run_experiment(fixtures::config(g, m));
        double sum = 0.0;
        for (const auto& [id, mi] : g.length_mi) sum += mi / m[0].mips;
        expect(std::abs(result.makespan - sum) <= 1e-9 * sum,
               "experiment " + std::to_string(i) + ": makespan " + std::to_string(result.makespan) + " vs " +
                   std::to_string(sum));
    }
}

// 3. Unit arithmetic.
void unit_arithmetic() {
    gs::grid::ResourceSpec spec;
    spec.name = "r";
    spec.pe_rating_mips = 400.0;
    spec.baud_rate_bps = 1e6;
    expect(gs::grid::execution_duration(200000.0, spec) == 500.0, "execution_duration(200000 MI, 400 MIPS) != 500");
    gs::grid::RegistryEntry a{gs::ResourceId{0}, spec, 0.0};
    gs::grid::RegistryEntry b{gs::ResourceId{1}, spec, 0.0};
    b.spec.name = "s";
    expect(gs::grid::transfer_duration(100000.0, a, b) == 0.8, "transfer_duration(100000 B, 1e6 bps) != 0.8");
}

// 4. Planner against the reference step-through on every small DAG shape.
void min_min_oracle() {
    const std::vector<std::pair<std::string, std::vector<oracle::Machine>>> resource_sets{
        {"one fast", {{"F", 2000.0, 1e7, 3.0, 1, 1}}},
        {"two identical", {{"A", 1000.0, 1e6, 1.0, 1, 1}, {"B", 1000.0, 1e6, 1.0, 1, 1}}},
        {"fast+slow", {{"F", 2000.0, 1e7, 3.0, 1, 1}, {"S", 500.0, 1e6, 1.0, 1, 1}}},
    };
    std::size_t compared = 0;
    for (int n = 1; n <= 5; ++n) {
        for (auto shape : oracle::enumerate_shapes(n)) {
            for (int profile = 0; profile < 2; ++profile) {
                for (auto& [id, mi] : shape.length_mi) mi = profile == 0 ? 100000.0 : 20000.0 * ((id * 7) % 5 + 1);
                for (auto& e : shape.edges) e.bytes = profile == 0 ? 50000.0 : 10000.0 * ((e.src * 3 + e.dst) % 4);
                for (const auto& [set_name, machines] : resource_sets) {
                    for (auto order : {gs::sched::ResourceOrder::FastestFirst, gs::sched::ResourceOrder::CheapestFirst}) {
                        gs::dag::ValidatedDag dag(fixtures::to_dag(shape));
                        auto plan = gs::sched::min_min_schedule(dag, register_all(machines), order);
                        auto ref = oracle::min_min(shape, machines, order == gs::sched::ResourceOrder::FastestFirst
                                                                        ? oracle::Order::Fastest
                                                                        : oracle::Order::Cheapest);
                        const std::string where = std::to_string(n) + "-task shape on " + set_name;
                        expect(plan.size() == ref.size(), where + ": task count differs");
                        for (std::size_t i = 0; i < ref.size(); ++i) {
                            const auto& a = plan.assignments()[i];
                            const auto& r = ref[i];
                            expect(a.task.value == r.task && a.resource.value == r.resource && a.pe.machine == r.machine &&
                                       a.pe.pe == r.pe && a.start == r.start && a.finish == r.finish,
                                   where + ": assignment " + std::to_string(i) + " differs (task " +
                                       std::to_string(a.task.value) + " vs " + std::to_string(r.task) + ")");
                        }
                        tally_precedence(shape, machines, plan);
                        ++compared;
                    }
                }
            }
        }
    }
    expect(compared > 100, "too few shapes enumerated");

    auto ref = oracle::min_min(fixtures::diamond(), fixtures::twin_resources(), oracle::Order::Fastest);
    double ref_makespan = 0.0;
    for (const auto& p : ref) ref_makespan = std::max(ref_makespan, p.finish);
    expect(ref_makespan == 300.4, "reference hand trace makespan is not 300.4");
    gs::dag::ValidatedDag dag(fixtures::to_dag(fixtures::diamond()));
    auto plan = gs::sched::min_min_schedule(dag, register_all(fixtures::twin_resources()));
    expect(plan.makespan() == 300.4, "hand trace makespan is not 300.4");
}

// 5. Simulation reproduces the plan exactly.
void plan_simulation_exactness() {
    std::mt19937_64 rng(777);
    for (int i = 0; i < 100; ++i) {
        auto g = oracle::random_dag(rng, 20);
        auto m = oracle::random_resources(rng, 4);
        auto result = gs::broker::run_experiment(fixtures::config(g, m, i % 2 ? gs::sched::ResourceOrder::CheapestFirst
                                                                               : gs::sched::ResourceOrder::FastestFirst));
        const std::string where = "experiment " + std::to_string(i);
        expect(result.simulated.size() == g.length_mi.size(), where + ": collector count differs from task count");
        for (const auto& rec : result.simulated) {
            const auto* a = result.plan.find(rec.task);
            expect(a != nullptr, where + ": unplanned completion");
            expect(rec.finish - a->finish == 0.0 && rec.start == a->start,
                   where + ": task " + std::to_string(rec.task.value) + " drifted");
        }
        tally_precedence(g, m, result.plan);
    }
}

// 6. Byte-identical reruns.
void determinism() {
    std::vector<gs::broker::ExperimentConfig> configs{fixtures::config(fixtures::diamond(), fixtures::twin_resources())};
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 10; ++i) configs.push_back(fixtures::config(oracle::random_dag(rng, 15), oracle::random_resources(rng, 3)));
    for (auto& cfg : configs) {
        cfg.trace = true;
        auto first = gs::broker::run_experiment(cfg);
        auto second = gs::broker::run_experiment(cfg);
        expect(gs::io::dump_result(first) == gs::io::dump_result(second), "serialized results differ between runs");
        expect(first.trace == second.trace, "event traces differ between runs");
        expect(!first.trace.empty(), "trace is empty");
    }
    // Through the command line as well.
    auto cli = [](std::vector<std::string> args) {
        std::ostringstream out, err;
        gs::cli::cli_main(args, out, err);
        return out.str() + "\n--\n" + err.str();
    };
    std::vector<std::string> args{"simulate", fixtures::data("diamond.dag.json").string(),
                                  fixtures::data("diamond.resources.json").string(), "--trace"};
    expect(cli(args) == cli(args), "CLI output differs between runs");
}

// 7. Calendar safety.
void calendar_safety() {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> pos(0.0, 200.0), len(0.01, 25.0);
    std::uniform_int_distribution<int> shape(1, 3), pick(0, 2);
    for (int seq = 0; seq < 1000; ++seq) {
        gs::grid::ResourceSpec spec;
        spec.name = "r";
        spec.pe_rating_mips = 1.0;
        spec.baud_rate_bps = 1.0;
        spec.num_machines = shape(rng);
        spec.pes_per_machine = shape(rng);
        gs::grid::ResourceCalendar cal(gs::ResourceId{0}, spec);
        for (int op = 0; op < 20; ++op) {
            const double nb = pos(rng), d = len(rng);
            if (pick(rng) == 0) {
                std::uniform_int_distribution<int> m(0, spec.num_machines - 1), p(0, spec.pes_per_machine - 1);
                try {
                    cal.commit(gs::TaskId{op}, gs::grid::PeId{gs::ResourceId{0}, m(rng), p(rng)}, nb, d);
                } catch (const gs::grid::ReservationConflict&) {
                }
            } else {
                auto slot = cal.earliest_feasible_start(nb, d);
                // Brute force over every PE: the chosen slot is the earliest and the lowest PE among equals.
                double best = std::numeric_limits<double>::infinity();
                gs::grid::PeId best_pe;
                for (int m = 0; m < spec.num_machines; ++m) {
                    for (int p = 0; p < spec.pes_per_machine; ++p) {
                        std::vector<oracle::Busy> busy;
                        for (const auto& iv : cal.pe_calendar(m, p).intervals()) busy.push_back({iv.start, iv.end});
                        double s = oracle::gap_scan(busy, nb, d);
                        if (s < best) {
                            best = s;
                            best_pe = gs::grid::PeId{gs::ResourceId{0}, m, p};
                        }
                    }
                }
                expect(slot.start == best && slot.pe == best_pe, "earliest_feasible_start disagrees with brute force");
                cal.commit(gs::TaskId{op}, slot.pe, slot.start, d);
            }
        }
        for (int m = 0; m < spec.num_machines; ++m) {
            for (int p = 0; p < spec.pes_per_machine; ++p) {
                std::vector<oracle::Busy> busy;
                for (const auto& iv : cal.pe_calendar(m, p).intervals()) busy.push_back({iv.start, iv.end});
                expect(!oracle::any_overlap(busy), "overlapping intervals after sequence " + std::to_string(seq));
            }
        }
    }
    for (int c = 0; c < 500; ++c) {
        gs::grid::PeCalendar cal;
        std::vector<oracle::Busy> busy;
        for (int i = 0; i < 15; ++i) {
            double s = pos(rng), e = s + len(rng);
            if (cal.is_free(s, e)) {
                cal.insert(s, e);
                busy.push_back({s, e});
            }
        }
        for (int q = 0; q < 20; ++q) {
            double nb = pos(rng), d = len(rng);
            expect(cal.earliest_start(nb, d) == oracle::gap_scan(busy, nb, d),
                   "earliest_start disagrees with gap scan on calendar " + std::to_string(c));
        }
    }
}

// 8. Precedence feasibility over the plans from 4 and 5.
void precedence() {
    expect(g_precedence.plans >= 100, "criteria 4 and 5 produced too few plans to check");
    expect(g_precedence.violations.empty(),
           g_precedence.violations.empty() ? "" : g_precedence.violations.front());
}

// 9. CLI and HTTP golden files.
struct Golden {
    bool update = std::getenv("GRIDSCHED_UPDATE_GOLDEN") != nullptr;

    void check(const std::string& name, const std::string& actual) const {
        const auto path = fixtures::data("golden/" + name);
        if (update) {
            gs::io::write_file(path, actual);
            return;
        }
        expect(fixtures::slurp(path) == actual, "output differs from golden/" + name);
    }
};

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = gs::cli::cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

void cli_api_contract() {
    const Golden golden;
    const std::string dag = fixtures::data("diamond.dag.json").string();
    const std::string res = fixtures::data("diamond.resources.json").string();
    fixtures::TempDir tmp;

    auto v = cli({"validate", dag});
    expect(v.code == 0, "validate exit code");
    golden.check("cli_validate_diamond.txt", v.out);
    auto vf = cli({"validate", fixtures::data("validation/floating_task.json").string()});
    expect(vf.code == 2, "validate on floating task exit code");
    golden.check("cli_validate_floating.stderr.txt", vf.err);

    auto s = cli({"schedule", dag, res});
    expect(s.code == 0, "schedule exit code");
    golden.check("cli_schedule_diamond.json", s.out);

    const auto result_path = (tmp / "result.json").string();
    auto m = cli({"simulate", dag, res, "--gantt", "text", "--out", result_path});
    expect(m.code == 0, "simulate exit code");
    golden.check("cli_simulate_diamond.gantt.txt", m.out);
    const std::string result_doc = fixtures::slurp(result_path);
    golden.check("cli_simulate_diamond.json", result_doc);
    expect(Json::parse(s.out)["body"] == Json::parse(result_doc)["body"]["plan"], "CLI: simulate.plan != schedule.plan");

    gs::api::Server server(gs::api::ServerOptions{"127.0.0.1", 0, std::nullopt});
    const int port = server.bind();
    std::thread serving([&] { server.run(); });
    server.wait_until_ready();
    struct Stop {
        gs::api::Server& s;
        std::thread& t;
        ~Stop() {
            s.stop();
            t.join();
        }
    } stop{server, serving};

    httplib::Client client("127.0.0.1", port);
    Json body;
    body["dag"] = Json::parse(fixtures::slurp(dag));
    body["resources"] = Json::parse(fixtures::slurp(res));

    auto hv = client.Post("/api/validate", fixtures::slurp(dag), "application/json");
    expect(hv && hv->status == 200, "POST /api/validate failed");
    golden.check("api_validate_diamond.json", hv->body);
    auto hs = client.Post("/api/schedule", body.dump(), "application/json");
    expect(hs && hs->status == 200, "POST /api/schedule failed");
    golden.check("api_schedule_diamond.json", hs->body);
    auto hm = client.Post("/api/simulate", body.dump(), "application/json");
    expect(hm && hm->status == 200, "POST /api/simulate failed");
    golden.check("api_simulate_diamond.json", hm->body);
    auto ha = client.Get("/api/algorithms");
    expect(ha && ha->status == 200, "GET /api/algorithms failed");
    golden.check("api_algorithms.json", ha->body);

    const auto http_plan = Json::parse(hs->body)["plan"];
    expect(http_plan == Json::parse(hm->body)["result"]["plan"], "HTTP: simulate.plan != schedule.plan");
    expect(http_plan == Json::parse(s.out)["body"], "HTTP plan differs from CLI plan");
    expect(Json::parse(hm->body)["result"]["makespan"].get<double>() == 300.4, "HTTP makespan is not 300.4");
}

struct Criterion {
    int id;
    std::string title;
    double limit_seconds;
    std::function<void()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "validation suite", 1.0, validation_suite},
        {2, "single-resource makespan law", 5.0, single_resource_law},
        {3, "unit arithmetic", 1.0, unit_arithmetic},
        {4, "min-min oracle equivalence", 30.0, min_min_oracle},
        {5, "plan/simulation exactness", 10.0, plan_simulation_exactness},
        {6, "determinism", 5.0, determinism},
        {7, "calendar safety", 10.0, calendar_safety},
        {8, "precedence feasibility", 1.0, precedence},
        {9, "CLI/API contract", 5.0, cli_api_contract},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        try {
            c.run();
        } catch (const Failure& f) {
            detail = f.detail;
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (detail.empty() && seconds > c.limit_seconds) detail = "exceeded time limit";
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.3f s of %.0f s", seconds, c.limit_seconds);
        std::cout << (detail.empty() ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " (" << timing
                  << ")";
        if (!detail.empty()) std::cout << ": " << detail;
        if (c.id == 8) std::cout << " [" << g_precedence.plans << " plans, " << g_precedence.edges << " edges]";
        std::cout << "\n";
        failures += !detail.empty();
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
    return failures == 0 ? 0 : 1;
}

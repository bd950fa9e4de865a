#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#ifndef GRIDSCHED_TEST_DATA_DIR
#error "GRIDSCHED_TEST_DATA_DIR must point at tests/data"
#endif

namespace fixtures {

namespace gs = gridsched;

std::filesystem::path data_dir() {
    return GRIDSCHED_TEST_DATA_DIR;
}

std::filesystem::path data(const std::string& relative) {
    return data_dir() / relative;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

TempDir::TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("gridsched-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

gs::dag::DagApp to_dag(const oracle::Graph& g, const std::string& name) {
    gs::dag::DagApp dag(name);
    for (const auto& [id, mi] : g.length_mi) {
        gs::dag::TaskNode node;
        node.id = gs::TaskId{id};
        node.name = "T" + std::to_string(id);
        node.length_mi = mi;
        dag.add_task(std::move(node));
    }
    for (const auto& e : g.edges) {
        gs::dag::DependencyEdge edge;
        edge.src = gs::TaskId{e.src};
        edge.dst = gs::TaskId{e.dst};
        edge.bytes = e.bytes;
        dag.add_edge(std::move(edge));
    }
    return dag;
}

std::vector<gs::grid::ResourceSpec> to_specs(const std::vector<oracle::Machine>& machines) {
    std::vector<gs::grid::ResourceSpec> specs;
    for (const auto& m : machines) {
        gs::grid::ResourceSpec s;
        s.name = m.name;
        s.num_machines = m.machines;
        s.pes_per_machine = m.pes;
        s.pe_rating_mips = m.mips;
        s.baud_rate_bps = m.baud;
        s.cost_per_sec = m.cost;
        specs.push_back(std::move(s));
    }
    return specs;
}

oracle::Graph from_dag(const gs::dag::DagApp& dag) {
    oracle::Graph g;
    for (const auto& t : dag.tasks()) g.length_mi[t.id.value] = t.length_mi;
    for (const auto& e : dag.edges()) g.edges.push_back({e.src.value, e.dst.value, e.bytes});
    return g;
}

oracle::Graph diamond() {
    oracle::Graph g;
    for (int i = 1; i <= 4; ++i) g.length_mi[i] = 100000.0;
    g.edges = {{1, 2, 50000.0}, {1, 3, 50000.0}, {2, 4, 50000.0}, {3, 4, 50000.0}};
    return g;
}

std::vector<oracle::Machine> twin_resources() {
    return {{"R1", 1000.0, 1e6, 1.0, 1, 1}, {"R2", 1000.0, 1e6, 1.0, 1, 1}};
}

gs::broker::ExperimentConfig config(const oracle::Graph& g, const std::vector<oracle::Machine>& machines,
                                    gs::sched::ResourceOrder order) {
    gs::broker::ExperimentConfig c;
    c.dag = to_dag(g);
    c.resources = to_specs(machines);
    c.order = order;
    return c;
}

std::string precedence_violation(const oracle::Graph& g, const std::vector<oracle::Machine>& machines,
                                 const gs::sched::SchedulePlan& plan) {
    for (const auto& e : g.edges) {
        const auto* parent = plan.find(gs::TaskId{e.src});
        const auto* child = plan.find(gs::TaskId{e.dst});
        if (parent == nullptr || child == nullptr) return "edge endpoint missing from plan";
        const auto& pm = machines.at(parent->resource.value);
        const auto& cm = machines.at(child->resource.value);
        double ready = parent->finish + oracle::transfer_seconds(e.bytes, pm, cm, parent->resource == child->resource);
        if (child->start < ready) {
            return "task " + std::to_string(e.dst) + " starts at " + std::to_string(child->start) +
                   " before data from " + std::to_string(e.src) + " arrives at " + std::to_string(ready);
        }
    }
    return {};
}

}  // namespace fixtures

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gridsched/broker/broker.hpp"
#include "gridsched/dag/dag.hpp"
#include "gridsched/grid/resource.hpp"
#include "oracle.hpp"

namespace fixtures {

std::filesystem::path data_dir();
std::filesystem::path data(const std::string& relative);
std::string slurp(const std::filesystem::path& path);

/// Fresh directory under the system temp dir, removed by the destructor.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

gridsched::dag::DagApp to_dag(const oracle::Graph& g, const std::string& name = "generated");
std::vector<gridsched::grid::ResourceSpec> to_specs(const std::vector<oracle::Machine>& machines);
oracle::Graph from_dag(const gridsched::dag::DagApp& dag);

/// Diamond 1->2, 1->3, 2->4, 3->4; 100000 MI tasks, 50000-byte edges.
oracle::Graph diamond();
/// Two identical single-PE resources: 1000 MIPS, 1e6 bps, cost 1 per second.
std::vector<oracle::Machine> twin_resources();

gridsched::broker::ExperimentConfig config(const oracle::Graph& g, const std::vector<oracle::Machine>& machines,
                                           gridsched::sched::ResourceOrder order = gridsched::sched::ResourceOrder::FastestFirst);

/// Empty string when every edge satisfies start(child) >= finish(parent) + transfer; otherwise
/// a description of the first violation.
std::string precedence_violation(const oracle::Graph& g, const std::vector<oracle::Machine>& machines,
                                 const gridsched::sched::SchedulePlan& plan);

}  // namespace fixtures

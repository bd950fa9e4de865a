#pragma once

// Reference implementations used to check the library. They work on plain structures and share
// no code with gridsched.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace oracle {

struct Edge {
    std::int64_t src = 0;
    std::int64_t dst = 0;
    double bytes = 0.0;
};

struct Graph {
    std::map<std::int64_t, double> length_mi;  // task id -> MI
    std::vector<Edge> edges;
};

struct Machine {
    std::string name;
    double mips = 1.0;
    double baud = 1.0;
    double cost = 0.0;
    int machines = 1;
    int pes = 1;
};

struct Busy {
    double start = 0.0;
    double end = 0.0;
};

struct Placement {
    std::int64_t task = 0;
    std::size_t resource = 0;  // registration index
    int machine = 0;
    int pe = 0;
    double start = 0.0;
    double finish = 0.0;
};

/// Smallest t >= not_before with [t, t + duration) clear of every interval, found by trying
/// not_before and every interval end after it.
double gap_scan(const std::vector<Busy>& busy, double not_before, double duration);

/// True if any pair of intervals overlaps (half-open).
bool any_overlap(std::vector<Busy> busy);

/// Depth-first search for a directed cycle (self-loops count).
bool has_cycle(const Graph& g);

/// Acyclic with exactly one source and one sink and every task on some source-to-sink path.
bool is_well_formed(const Graph& g);

enum class Order { Fastest, Cheapest };

/// Step-by-step Min-Min: each round evaluates every ready task on every resource, commits the
/// one with the smallest completion time (lowest task id, then first resource in order, then
/// lowest PE on ties) and repeats. Placements are returned in commit order.
std::vector<Placement> min_min(const Graph& g, const std::vector<Machine>& resources, Order order);

double transfer_seconds(double bytes, const Machine& a, const Machine& b, bool same);

/// Every DAG on n nodes whose edges go from lower to higher id and that is well formed.
std::vector<Graph> enumerate_shapes(int n);

/// Random well-formed DAG with up to `max_tasks` tasks and shuffled, non-contiguous ids.
Graph random_dag(std::mt19937_64& rng, int max_tasks);

std::vector<Machine> random_resources(std::mt19937_64& rng, int max_resources);

}  // namespace oracle

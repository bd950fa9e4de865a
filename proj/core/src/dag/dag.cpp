#include "gridsched/dag/dag.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <queue>

namespace gridsched::dag {

namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 10> kCodeNames{{
    {ErrorCode::Cycle, "Cycle"},
    {ErrorCode::MultipleEntry, "MultipleEntry"},
    {ErrorCode::MultipleExit, "MultipleExit"},
    {ErrorCode::NoEntry, "NoEntry"},
    {ErrorCode::NoExit, "NoExit"},
    {ErrorCode::DanglingIntermediate, "DanglingIntermediate"},
    {ErrorCode::FloatingTask, "FloatingTask"},
    {ErrorCode::DuplicateEdge, "DuplicateEdge"},
    {ErrorCode::SelfLoop, "SelfLoop"},
    {ErrorCode::EmptyDag, "EmptyDag"},
}};

std::string join_ids(const std::vector<TaskId>& ids) {
    std::string out;
    for (auto id : ids) {
        if (!out.empty()) out += ' ';
        out += std::to_string(id.value);
    }
    return out;
}

// Index-based view of a DagApp with self-loops and repeated edges removed.
struct Graph {
    std::vector<TaskId> ids;  // index -> id, ascending by id
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::vector<std::size_t>> in;
    std::vector<TaskId> self_loops;
    std::vector<std::pair<TaskId, TaskId>> duplicates;

    explicit Graph(const DagApp& dag) {
        std::map<TaskId, std::size_t> index;
        for (const auto& t : dag.tasks()) index.emplace(t.id, 0);
        for (auto& [id, idx] : index) {
            idx = ids.size();
            ids.push_back(id);
        }
        out.resize(ids.size());
        in.resize(ids.size());

        std::set<std::pair<TaskId, TaskId>> seen;
        std::set<TaskId> loops;
        std::set<std::pair<TaskId, TaskId>> dups;
        for (const auto& e : dag.edges()) {
            if (e.src == e.dst) {
                loops.insert(e.src);
                continue;
            }
            if (!seen.emplace(e.src, e.dst).second) {
                dups.emplace(e.src, e.dst);
                continue;
            }
            std::size_t s = index.at(e.src);
            std::size_t d = index.at(e.dst);
            out[s].push_back(d);
            in[d].push_back(s);
        }
        self_loops.assign(loops.begin(), loops.end());
        duplicates.assign(dups.begin(), dups.end());
    }

    std::size_t size() const noexcept { return ids.size(); }

    // Number of nodes reachable from `start` (excluding itself) along `adj`.
    std::size_t reach_count(std::size_t start, const std::vector<std::vector<std::size_t>>& adj) const {
        std::vector<char> seen(size(), 0);
        std::vector<std::size_t> stack{start};
        seen[start] = 1;
        std::size_t count = 0;
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t w : adj[v]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count;
    }

    // Strongly connected components with two or more members (iterative Tarjan), each sorted,
    // ordered by smallest member.
    std::vector<std::vector<TaskId>> cyclic_components() const {
        const std::size_t n = size();
        constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
        std::vector<std::size_t> order(n, kUnvisited), low(n, 0);
        std::vector<char> on_stack(n, 0);
        std::vector<std::size_t> stack;
        std::vector<std::vector<TaskId>> comps;
        std::size_t counter = 0;

        struct Frame {
            std::size_t v;
            std::size_t next_edge;
        };
        for (std::size_t root = 0; root < n; ++root) {
            if (order[root] != kUnvisited) continue;
            std::vector<Frame> call{{root, 0}};
            order[root] = low[root] = counter++;
            stack.push_back(root);
            on_stack[root] = 1;
            while (!call.empty()) {
                Frame& f = call.back();
                if (f.next_edge < out[f.v].size()) {
                    std::size_t w = out[f.v][f.next_edge++];
                    if (order[w] == kUnvisited) {
                        order[w] = low[w] = counter++;
                        stack.push_back(w);
                        on_stack[w] = 1;
                        call.push_back({w, 0});
                    } else if (on_stack[w]) {
                        low[f.v] = std::min(low[f.v], order[w]);
                    }
                    continue;
                }
                std::size_t v = f.v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
                if (low[v] == order[v]) {
                    std::vector<TaskId> comp;
                    std::size_t w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp.push_back(ids[w]);
                    } while (w != v);
                    if (comp.size() > 1) {
                        std::sort(comp.begin(), comp.end());
                        comps.push_back(std::move(comp));
                    }
                }
            }
        }
        std::sort(comps.begin(), comps.end());
        return comps;
    }
};

// Splits `candidates` (sources or sinks) into the tied maximum-reach group and the rest.
std::pair<std::vector<TaskId>, std::vector<TaskId>> split_by_reach(const Graph& g,
                                                                   const std::vector<std::size_t>& candidates,
                                                                   const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<std::size_t> reach;
    reach.reserve(candidates.size());
    for (std::size_t c : candidates) reach.push_back(g.reach_count(c, adj));
    const std::size_t best = *std::max_element(reach.begin(), reach.end());
    std::vector<TaskId> top, rest;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        (reach[i] == best ? top : rest).push_back(g.ids[candidates[i]]);
    }
    return {top, rest};
}

}  // namespace

const TaskNode& DagApp::add_task(TaskNode task) {
    if (index_.contains(task.id)) throw DagError("duplicate task id " + std::to_string(task.id.value));
    if (!(task.length_mi > 0) || !std::isfinite(task.length_mi)) {
        throw DagError("task " + std::to_string(task.id.value) + ": length_mi must be positive");
    }
    index_.emplace(task.id, tasks_.size());
    tasks_.push_back(std::move(task));
    return tasks_.back();
}

const DependencyEdge& DagApp::add_edge(DependencyEdge edge) {
    for (TaskId end : {edge.src, edge.dst}) {
        if (!index_.contains(end)) {
            throw DagError("edge " + std::to_string(edge.src.value) + "->" + std::to_string(edge.dst.value) +
                           " references unknown task " + std::to_string(end.value));
        }
    }
    if (!(edge.bytes >= 0) || !std::isfinite(edge.bytes)) {
        throw DagError("edge " + std::to_string(edge.src.value) + "->" + std::to_string(edge.dst.value) +
                       ": bytes must be non-negative");
    }
    edges_.push_back(std::move(edge));
    return edges_.back();
}

const TaskNode* DagApp::find(TaskId id) const noexcept {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &tasks_[it->second];
}

std::string_view to_string(ErrorCode code) noexcept {
    for (const auto& [c, name] : kCodeNames) {
        if (c == code) return name;
    }
    return "Unknown";
}

std::optional<ErrorCode> parse_error_code(std::string_view text) noexcept {
    for (const auto& [c, name] : kCodeNames) {
        if (name == text) return c;
    }
    return std::nullopt;
}

std::string format_error(const ValidationError& error) {
    std::string line{to_string(error.code)};
    if (!error.ids.empty()) line += ' ' + join_ids(error.ids);
    return line;
}

std::vector<ValidationError> validate(const DagApp& dag) {
    std::vector<ValidationError> errors;
    if (dag.empty()) {
        errors.push_back({ErrorCode::EmptyDag, {}});
        return errors;
    }

    const Graph g(dag);
    const std::size_t n = g.size();

    if (!g.self_loops.empty()) errors.push_back({ErrorCode::SelfLoop, g.self_loops});
    for (const auto& [s, d] : g.duplicates) errors.push_back({ErrorCode::DuplicateEdge, {s, d}});

    std::vector<char> floating(n, 0);
    std::vector<TaskId> floating_ids;
    if (n > 1) {
        for (std::size_t i = 0; i < n; ++i) {
            if (g.in[i].empty() && g.out[i].empty()) {
                floating[i] = 1;
                floating_ids.push_back(g.ids[i]);
            }
        }
    }
    if (!floating_ids.empty()) errors.push_back({ErrorCode::FloatingTask, floating_ids});

    for (auto& comp : g.cyclic_components()) errors.push_back({ErrorCode::Cycle, std::move(comp)});

    std::vector<std::size_t> sources, sinks;
    std::size_t active = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (floating[i]) continue;
        ++active;
        if (g.in[i].empty()) sources.push_back(i);
        if (g.out[i].empty()) sinks.push_back(i);
    }

    std::vector<TaskId> dangling;
    if (active > 0 && sources.empty()) errors.push_back({ErrorCode::NoEntry, {}});
    if (sources.size() > 1) {
        auto [top, rest] = split_by_reach(g, sources, g.out);
        if (top.size() > 1) errors.push_back({ErrorCode::MultipleEntry, top});
        dangling.insert(dangling.end(), rest.begin(), rest.end());
    }
    if (active > 0 && sinks.empty()) errors.push_back({ErrorCode::NoExit, {}});
    if (sinks.size() > 1) {
        auto [top, rest] = split_by_reach(g, sinks, g.in);
        if (top.size() > 1) errors.push_back({ErrorCode::MultipleExit, top});
        dangling.insert(dangling.end(), rest.begin(), rest.end());
    }
    if (!dangling.empty()) {
        std::sort(dangling.begin(), dangling.end());
        errors.push_back({ErrorCode::DanglingIntermediate, dangling});
    }
    return errors;
}

CycleError::CycleError(std::vector<TaskId> ids)
    : DagError("task graph has a cycle through tasks " + join_ids(ids)), ids_(std::move(ids)) {}

std::vector<TaskId> topological_order(const DagApp& dag) {
    const Graph g(dag);
    const std::size_t n = g.size();
    std::vector<std::size_t> indegree(n);
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i) {
        indegree[i] = g.in[i].size();
        if (indegree[i] == 0) ready.push(i);
    }
    std::vector<TaskId> order;
    order.reserve(n);
    while (!ready.empty()) {
        std::size_t v = ready.top();
        ready.pop();
        order.push_back(g.ids[v]);
        for (std::size_t w : g.out[v]) {
            if (--indegree[w] == 0) ready.push(w);
        }
    }
    if (order.size() != n) {
        std::vector<TaskId> cyclic;
        for (const auto& comp : g.cyclic_components()) cyclic.insert(cyclic.end(), comp.begin(), comp.end());
        std::sort(cyclic.begin(), cyclic.end());
        throw CycleError(std::move(cyclic));
    }
    return order;
}

InvalidDag::InvalidDag(std::vector<ValidationError> errors)
    : DagError([&] {
          std::string msg = "invalid DAG:";
          for (const auto& e : errors) msg += "\n  " + format_error(e);
          return msg;
      }()),
      errors_(std::move(errors)) {}

ValidatedDag::ValidatedDag(DagApp app) : app_(std::move(app)) {
    if (auto errors = validate(app_); !errors.empty()) throw InvalidDag(std::move(errors));

    for (const auto& t : app_.tasks()) index_.emplace(t.id, 0);
    std::size_t next = 0;
    for (auto& [id, idx] : index_) idx = next++;
    parents_.resize(next);
    children_.resize(next);
    for (const auto& e : app_.edges()) {
        children_[index_.at(e.src)].push_back({e.dst, e.bytes});
        parents_[index_.at(e.dst)].push_back({e.src, e.bytes});
    }
    auto by_task = [](const Link& a, const Link& b) { return a.task < b.task; };
    for (auto& v : parents_) std::sort(v.begin(), v.end(), by_task);
    for (auto& v : children_) std::sort(v.begin(), v.end(), by_task);

    topo_ = dag::topological_order(app_);
    for (const auto& [id, idx] : index_) {
        if (parents_[idx].empty()) entry_ = id;
        if (children_[idx].empty()) exit_ = id;
    }
}

std::size_t ValidatedDag::index(TaskId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::out_of_range("unknown task id " + std::to_string(id.value));
    return it->second;
}

const TaskNode& ValidatedDag::task(TaskId id) const {
    (void)index(id);
    return *app_.find(id);
}

TaskKind ValidatedDag::kind(TaskId id) const {
    std::size_t i = index(id);
    if (parents_[i].empty()) return TaskKind::Entry;
    if (children_[i].empty()) return TaskKind::Exit;
    return TaskKind::Intermediate;
}

std::span<const Link> ValidatedDag::parents(TaskId id) const {
    return parents_[index(id)];
}

std::span<const Link> ValidatedDag::children(TaskId id) const {
    return children_[index(id)];
}

std::vector<TaskId> ValidatedDag::immediate_unscheduled_tasks(const std::set<TaskId>& scheduled) const {
    for (TaskId t : scheduled) {
        for (const Link& p : parents(t)) {
            if (!scheduled.contains(p.task)) {
                throw std::logic_error("scheduled set is not closed under ancestry: task " + std::to_string(t.value) +
                                       " is scheduled but its parent " + std::to_string(p.task.value) + " is not");
            }
        }
    }
    std::vector<TaskId> ready;
    for (const auto& [id, idx] : index_) {
        if (scheduled.contains(id)) continue;
        const auto& ps = parents_[idx];
        if (std::all_of(ps.begin(), ps.end(), [&](const Link& p) { return scheduled.contains(p.task); })) {
            ready.push_back(id);
        }
    }
    return ready;
}

}  // namespace gridsched::dag

#pragma once

#include "wfsim/engine.hpp"
#include "wfsim/platform.hpp"
#include "wfsim/scheduler.hpp"
#include "wfsim/text_util.hpp"
#include "wfsim/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#ifndef WFSIM_TESTS_ROOT
#error "WFSIM_TESTS_ROOT must name the fixture tree"
#endif

namespace wfsim::test {

inline std::filesystem::path fixture_root() {
    return std::filesystem::path(WFSIM_TESTS_ROOT);
}

// Loads a fixture configuration with its relative paths resolved the same
// way the test harness resolves them: against the parent of the tests root.
inline RunConfig load_fixture_config(const std::string& group, const std::string& stem) {
    const auto path = fixture_root() / "config" / group / (stem + ".json");
    RunConfig config = parse_run_config(read_text_file(path));
    resolve_config_paths(config, fixture_root().parent_path());
    return config;
}

inline RunArtifact run_fixture(const std::string& group, const std::string& stem) {
    return run(load_fixture_config(group, stem));
}

// Runs a callable expected to throw and returns the exception message, or an
// empty string when nothing was thrown.
template <typename F>
std::string thrown_message(F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

inline bool contains(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

// Square matrix with one value on the diagonal and another everywhere else.
inline SquareMatrix uniform_matrix(int n, double diagonal, double off_diagonal) {
    SquareMatrix m;
    m.n = n;
    m.values.assign(static_cast<size_t>(n) * n, off_diagonal);
    for (int i = 0; i < n; ++i) m.values[static_cast<size_t>(i) * n + i] = diagonal;
    return m;
}

// Platform with contiguous cores 0..nodes*cores_per_node-1, one static clock
// rate and a symmetric local/remote bandwidth split.
inline PlatformSpec simple_platform(int nodes, int cores_per_node, double bw_local,
                                    double bw_remote, double lat_ns = 0.0, double hz = 1.0,
                                    double flops_per_cycle = 1.0) {
    PlatformSpec platform;
    platform.distance = make_distance_matrix(uniform_matrix(nodes, 0.0, lat_ns),
                                             uniform_matrix(nodes, bw_local, bw_remote));
    std::vector<int> cores(static_cast<size_t>(nodes) * cores_per_node);
    for (size_t i = 0; i < cores.size(); ++i) cores[i] = static_cast<int>(i);
    platform.topology = make_core_topology(std::move(cores), nodes);
    platform.flops_per_cycle = flops_per_cycle;
    platform.clock = {ClockType::static_rate, {hz}};
    return platform;
}

// Two-node reference: Task_1 and Task_2 feed Task_3, whose larger input
// lives on node 1. Cores 0 and 24, local bandwidth 0.005, remote 0.002.
inline WorkflowGraph two_node_workflow() {
    WorkflowGraph graph;
    graph.add_task("Task_1", 10.0);
    graph.add_task("Task_2", 10.0);
    graph.add_task("Task_3", 10.0);
    graph.add_item("Task_1", "Task_3", 10.0);
    graph.add_item("Task_2", "Task_3", 20.0);
    return graph;
}

inline PlatformSpec two_node_platform() {
    PlatformSpec platform;
    platform.distance = make_distance_matrix(uniform_matrix(2, 0.0, 0.0),
                                             uniform_matrix(2, 0.005, 0.002));
    platform.topology = make_core_topology({0, 24}, 2);
    platform.flops_per_cycle = 1e6;
    platform.clock = {ClockType::static_rate, {1.0}};
    return platform;
}

// Replays a fixed (task, core) schedule, ignoring the scheduling policy that
// produced it. The engine still verifies dependency completion.
class ScriptScheduler : public Scheduler {
public:
    explicit ScriptScheduler(std::vector<std::pair<int, int>> steps)
        : steps_(std::move(steps)) {}

    bool has_next() const override { return next_ < steps_.size(); }

    ScheduleDecision next(const SchedulerView& view) override {
        const auto [task, core] = steps_[next_++];
        return {view.workflow->task(task).name, core, std::nullopt};
    }

private:
    std::vector<std::pair<int, int>> steps_;
    size_t next_ = 0;
};

inline double makespan_of(const SimState& state) {
    double makespan = 0.0;
    for (const auto& record : state.records) makespan = std::max(makespan, record.total.end);
    return makespan;
}

// Independent finish-time estimate written straight from the cost formulas;
// the scheduler tests compare the production policies against it.
inline double oracle_eft(int task, int core, const WorkflowGraph& workflow,
                         const PlatformSpec& platform, const std::vector<double>& avail,
                         const std::vector<std::optional<double>>& aft,
                         const std::unordered_map<int, int>& locality) {
    double start = avail.at(core);
    for (int pred : workflow.predecessors(task)) start = std::max(start, aft.at(pred).value());

    const auto& distance = platform.distance;
    const int node = platform.topology.numa_of(core);
    double slowest_read = 0.0;
    for (int item : workflow.in_items(task)) {
        const int src = locality.at(item);
        const double cost = distance.latency_ns.at(src, node) / 1000.0 +
                            workflow.item(item).bytes / (distance.bandwidth_gbps.at(src, node) * 1000.0);
        slowest_read = std::max(slowest_read, cost);
    }

    const double compute =
        workflow.task(task).flops / (platform.flops_per_cycle * platform.frequency_hz(core)) * 1e6;

    double slowest_write = 0.0;
    for (int item : workflow.out_items(task)) {
        const double cost = distance.latency_ns.at(node, node) / 1000.0 +
                            workflow.item(item).bytes / (distance.bandwidth_gbps.at(node, node) * 1000.0);
        slowest_write = std::max(slowest_write, cost);
    }

    return start + slowest_read + compute + slowest_write;
}

// Independent upward rank: plain recursion over successors with mean costs,
// no memoization. Exponential, so keep the graphs small.
inline double oracle_upward_rank(int task, const WorkflowGraph& workflow,
                                 const PlatformSpec& platform) {
    const auto& cores = platform.topology.enabled_cores();
    double mean_compute = 0.0;
    for (int core : cores) {
        mean_compute +=
            workflow.task(task).flops / (platform.flops_per_cycle * platform.frequency_hz(core)) * 1e6;
    }
    mean_compute /= static_cast<double>(cores.size());

    const auto& distance = platform.distance;
    const int n = distance.nodes();
    double lat_mean = 0.0;
    double bw_mean = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            lat_mean += distance.latency_ns.at(i, j);
            bw_mean += distance.bandwidth_gbps.at(i, j);
        }
    }
    lat_mean /= n * n;
    bw_mean /= n * n;

    double tail = 0.0;
    for (int item : workflow.out_items(task)) {
        const double comm = lat_mean / 1000.0 + workflow.item(item).bytes / (bw_mean * 1000.0);
        tail = std::max(tail, comm + oracle_upward_rank(workflow.item_consumer(item), workflow, platform));
    }
    return mean_compute + tail;
}

// Random boundary-free DAG of at most max_tasks tasks. Edges only run from
// lower to higher task ids, which keeps the graph acyclic.
inline WorkflowGraph random_workflow(std::mt19937& rng, int max_tasks = 5) {
    std::uniform_int_distribution<int> task_count(1, max_tasks);
    std::uniform_int_distribution<int> flops_pick(1, 40);
    std::uniform_int_distribution<int> bytes_pick(1, 50);
    std::bernoulli_distribution has_edge(0.4);

    WorkflowGraph graph;
    const int count = task_count(rng);
    for (int i = 1; i <= count; ++i) {
        graph.add_task("Task_" + std::to_string(i), 10.0 * flops_pick(rng));
    }
    for (int i = 0; i < count; ++i) {
        for (int j = i + 1; j < count; ++j) {
            if (has_edge(rng)) {
                graph.add_item(graph.task(i).name, graph.task(j).name, 5.0 * bytes_pick(rng));
            }
        }
    }
    return graph;
}

// Random two-node platform with one or two cores per node, remote bandwidth
// no faster than local.
inline PlatformSpec random_platform(std::mt19937& rng) {
    std::uniform_int_distribution<int> cores_pick(1, 2);
    std::uniform_int_distribution<int> lat_pick(0, 3);
    std::uniform_int_distribution<int> local_pick(1, 4);
    std::uniform_int_distribution<int> hz_pick(1, 4);

    const double local = 2.0 * local_pick(rng);
    std::uniform_real_distribution<double> remote_pick(local / 8.0, local);
    return simple_platform(2, cores_pick(rng), local, remote_pick(rng), 500.0 * lat_pick(rng),
                           static_cast<double>(hz_pick(rng)));
}

inline std::unique_ptr<Scheduler> make_policy(const std::string& scheduler_type,
                                              const WorkflowGraph& workflow,
                                              const PlatformSpec& platform) {
    RunConfig config;
    config.scheduler_type = scheduler_type;
    return make_scheduler(config, workflow, platform);
}

// Drives a min-min run step by step and compares every decision against a
// brute-force argmin over (oracle eft, level, sibling, core id). Returns a
// description of the first mismatch, or nothing on agreement.
inline std::optional<std::string> minmin_matches_oracle(const WorkflowGraph& workflow,
                                                        const PlatformSpec& platform) {
    const auto ranks = level_order_ranks(workflow);
    MinMinScheduler scheduler(workflow, platform);
    SimState state = make_initial_state(workflow, platform);

    while (scheduler.has_next()) {
        int best_task = -1;
        int best_core = -1;
        double best_finish = 0.0;
        auto incumbent = std::make_tuple(0.0, 0, 0, 0);
        for (int task = 0; task < workflow.task_count(); ++task) {
            if (state.task_aft[task]) continue;
            bool ready = true;
            for (int pred : workflow.predecessors(task)) {
                if (!state.task_aft[pred]) ready = false;
            }
            if (!ready) continue;
            for (int core : platform.topology.enabled_cores()) {
                const double finish = oracle_eft(task, core, workflow, platform,
                                                 state.core_avail, state.task_aft,
                                                 state.item_locality);
                const auto candidate =
                    std::make_tuple(finish, ranks[task].level, ranks[task].sibling, core);
                if (best_task < 0 || candidate < incumbent) {
                    best_task = task;
                    best_core = core;
                    best_finish = finish;
                    incumbent = candidate;
                }
            }
        }

        const ScheduleDecision decision = scheduler.next(state.view(workflow, platform, 0.0));
        if (!decision.task || !decision.core) {
            return "scheduler produced an incomplete decision";
        }
        if (workflow.task_index(*decision.task) != best_task || *decision.core != best_core) {
            return "picked " + *decision.task + " on core " + std::to_string(*decision.core) +
                   ", oracle wants " + workflow.task(best_task).name + " on core " +
                   std::to_string(best_core);
        }
        if (std::abs(*decision.estimated_finish_time - best_finish) > 1e-9) {
            return "finish estimate " + format_number(*decision.estimated_finish_time) +
                   " differs from oracle " + format_number(best_finish);
        }
        execute_task(decision, state, workflow, platform);
    }
    return std::nullopt;
}

// Compares every upward rank against the independent recursion, then checks
// that dispatch follows descending rank order.
inline std::optional<std::string> heft_matches_oracle(const WorkflowGraph& workflow,
                                                      const PlatformSpec& platform) {
    const auto ranks = heft_upward_ranks(workflow, platform);
    for (int task = 0; task < workflow.task_count(); ++task) {
        const double expected = oracle_upward_rank(task, workflow, platform);
        if (std::abs(ranks[task] - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
            return "rank of " + workflow.task(task).name + " is " + format_number(ranks[task]) +
                   ", oracle computes " + format_number(expected);
        }
    }

    const auto level_ranks = level_order_ranks(workflow);
    HeftScheduler scheduler(workflow, platform);
    SimState state = make_initial_state(workflow, platform);
    while (scheduler.has_next()) {
        int best_task = -1;
        for (int task = 0; task < workflow.task_count(); ++task) {
            if (state.task_aft[task]) continue;
            bool ready = true;
            for (int pred : workflow.predecessors(task)) {
                if (!state.task_aft[pred]) ready = false;
            }
            if (!ready) continue;
            if (best_task < 0) {
                best_task = task;
                continue;
            }
            const auto candidate = std::make_tuple(-ranks[task], level_ranks[task].level,
                                                   level_ranks[task].sibling,
                                                   workflow.task(task).name);
            const auto held = std::make_tuple(-ranks[best_task], level_ranks[best_task].level,
                                              level_ranks[best_task].sibling,
                                              workflow.task(best_task).name);
            if (candidate < held) best_task = task;
        }

        const ScheduleDecision decision = scheduler.next(state.view(workflow, platform, 0.0));
        if (!decision.task || !decision.core) {
            return "scheduler produced an incomplete decision";
        }
        if (workflow.task_index(*decision.task) != best_task) {
            return "dispatched " + *decision.task + ", oracle ranks " +
                   workflow.task(best_task).name + " first";
        }
        execute_task(decision, state, workflow, platform);
    }
    return std::nullopt;
}

// Records the schedule a policy produces, raises one remote bandwidth entry
// and replays the same placement. The makespan must not grow.
inline std::optional<std::string> bandwidth_raise_is_monotonic(
    const WorkflowGraph& workflow, const PlatformSpec& platform,
    const std::string& scheduler_type, int src_node, int dst_node, double factor) {
    const auto policy = make_policy(scheduler_type, workflow, platform);
    const SimState baseline = run_simulation(workflow, platform, *policy);
    const double before = makespan_of(baseline);

    std::vector<std::pair<int, int>> steps;
    for (const auto& decision : baseline.dispatch_log) {
        steps.emplace_back(workflow.task_index(*decision.task), *decision.core);
    }

    PlatformSpec raised = platform;
    auto& bandwidth = raised.distance.bandwidth_gbps;
    bandwidth.values[src_node * bandwidth.n + dst_node] *= factor;

    ScriptScheduler replay(steps);
    const double after = makespan_of(run_simulation(workflow, raised, replay));
    if (after > before + 1e-9) {
        return "makespan grew from " + format_number(before) + " to " + format_number(after) +
               " after raising bandwidth " + std::to_string(src_node) + "->" +
               std::to_string(dst_node) + " by " + format_number(factor);
    }
    return std::nullopt;
}

} // namespace wfsim::test

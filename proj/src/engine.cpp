#include "wfsim/engine.hpp"

#include "wfsim/error.hpp"
#include "wfsim/text_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wfsim {

SchedulerView SimState::view(const WorkflowGraph& workflow, const PlatformSpec& platform,
                             double now) const {
    return {&workflow, &platform, &core_avail, &task_aft, &item_locality, now};
}

SimState make_initial_state(const WorkflowGraph& workflow, const PlatformSpec& platform) {
    SimState state;
    state.core_avail.assign(platform.topology.total_cores(), 0.0);
    state.task_aft.assign(workflow.task_count(), std::nullopt);
    return state;
}

const TaskRecord& execute_task(const ScheduleDecision& decision, SimState& state,
                               const WorkflowGraph& workflow, const PlatformSpec& platform) {
    if (!decision.task || !decision.core) {
        throw EngineError("cannot execute an incomplete schedule decision");
    }
    int task = workflow.task_index(*decision.task);
    int core = *decision.core;
    if (!platform.topology.is_enabled(core)) {
        throw EngineError("core " + std::to_string(core) + " is not enabled");
    }
    if (state.task_aft[task]) {
        throw EngineError("task '" + *decision.task + "' dispatched twice");
    }
    int node = platform.topology.numa_of(core);

    TaskRecord record;
    record.task = task;
    record.core = core;
    record.numa_id = node;

    double start = est(task, core, state.view(workflow, platform, 0.0));

    // Read phase: all input transfers run concurrently from the task start.
    double reads_end = start;
    for (int item : workflow.in_items(task)) {
        auto locality = state.item_locality.find(item);
        if (locality == state.item_locality.end()) {
            const DataItemSpec& spec = workflow.item(item);
            throw EngineError("input item '" + spec.producer + "->" + spec.consumer +
                              "' has no recorded locality");
        }
        int src = locality->second;
        double duration = comm_cost(workflow.item(item).bytes, src, node, platform.distance);
        record.reads.push_back({item, src, {start, start + duration}});
        reads_end = std::max(reads_end, start + duration);
        state.item_locality.erase(locality);
        ++state.reads_active;
    }

    // Compute phase: starts once the slowest read has landed.
    double compute = compute_cost(workflow.task(task).flops, core, platform);
    record.compute = {reads_end, reads_end + compute};

    // Write phase: all outputs leave together; first touch pins them to the
    // executing core's node.
    double total_end = record.compute.end;
    for (int item : workflow.out_items(task)) {
        double duration = comm_cost(workflow.item(item).bytes, node, node, platform.distance);
        record.writes.push_back({item, node, {record.compute.end, record.compute.end + duration}});
        total_end = std::max(total_end, record.compute.end + duration);
        state.item_locality[item] = node;
        ++state.writes_active;
    }

    record.total = {start, total_end};
    state.task_aft[task] = total_end;
    state.core_avail[core] = total_end;
    ++state.tasks_active;

    if (decision.estimated_finish_time &&
        std::abs(*decision.estimated_finish_time - total_end) > 1e-9) {
        throw EngineError("scheduler estimated " + format_number(*decision.estimated_finish_time) +
                          " but task '" + *decision.task + "' finished at " +
                          format_number(total_end));
    }

    state.dispatch_log.push_back(decision);
    state.records.push_back(record);
    return state.records.back();
}

namespace {

// Earliest enabled-core availability strictly after now, if any.
std::optional<double> next_completion(const SimState& state, const PlatformSpec& platform,
                                      double now) {
    double next = std::numeric_limits<double>::infinity();
    for (int core : platform.topology.enabled_cores()) {
        double avail = state.core_avail[core];
        if (avail > now) {
            next = std::min(next, avail);
        }
    }
    if (std::isinf(next)) {
        return std::nullopt;
    }
    return next;
}

std::string undispatched_names(const SimState& state, const WorkflowGraph& workflow) {
    std::string names;
    for (int t = 0; t < workflow.task_count(); ++t) {
        if (!state.task_aft[t]) {
            if (!names.empty()) {
                names += ", ";
            }
            names += workflow.task(t).name;
        }
    }
    return names;
}

} // namespace

SimState run_simulation(const WorkflowGraph& workflow, const PlatformSpec& platform,
                        Scheduler& scheduler) {
    SimState state = make_initial_state(workflow, platform);
    double now = 0.0;
    while (scheduler.has_next()) {
        ScheduleDecision decision = scheduler.next(state.view(workflow, platform, now));
        if (decision.task && decision.core) {
            execute_task(decision, state, workflow, platform);
            continue;
        }
        auto pending = next_completion(state, platform, now);
        if (!pending) {
            throw EngineError("deadlock: no dispatchable task and no pending completion; "
                              "remaining tasks: " + undispatched_names(state, workflow));
        }
        now = *pending;
    }
    finalize_run(state, workflow);
    return state;
}

void finalize_run(const SimState& state, const WorkflowGraph& workflow) {
    if (state.tasks_active != workflow.task_count()) {
        throw EngineError("incomplete execution: " + std::to_string(state.tasks_active) +
                          " of " + std::to_string(workflow.task_count()) + " tasks ran");
    }
    if (state.reads_active != workflow.item_count() ||
        state.writes_active != workflow.item_count()) {
        throw EngineError("communication imbalance: " + std::to_string(state.writes_active) +
                          " writes and " + std::to_string(state.reads_active) + " reads for " +
                          std::to_string(workflow.item_count()) + " items");
    }
    if (!state.item_locality.empty()) {
        throw EngineError(std::to_string(state.item_locality.size()) +
                          " data items were written but never consumed");
    }
}

RunArtifact build_artifact(const PlatformSpec& platform, const WorkflowGraph& workflow,
                           const SimState& state) {
    RunArtifact artifact;
    artifact.flops_per_cycle = platform.flops_per_cycle;
    artifact.clock = platform.clock;
    artifact.distance_lat_ns = platform.distance.latency_ns;
    artifact.distance_bw_gbps = platform.distance.bandwidth_gbps;

    artifact.execs_count = workflow.task_count();
    artifact.reads_count = workflow.item_count();
    artifact.writes_count = workflow.item_count();

    artifact.tasks_active_count = state.tasks_active;
    artifact.reads_active_count = state.reads_active;
    artifact.writes_active_count = state.writes_active;
    for (int core : platform.topology.enabled_cores()) {
        artifact.core_availability.emplace_back(core, state.core_avail[core]);
    }

    auto item_key = [&](int item) {
        const DataItemSpec& spec = workflow.item(item);
        return spec.producer + "->" + spec.consumer;
    };
    for (const TaskRecord& record : state.records) {
        const std::string& name = workflow.task(record.task).name;
        artifact.localities.push_back({name, record.numa_id, record.core, 0, 0, 0});
        for (const CommRecord& read : record.reads) {
            artifact.read_offsets.push_back(
                {item_key(read.item), read.numa_id, read.span, workflow.item(read.item).bytes});
        }
        for (const CommRecord& write : record.writes) {
            artifact.write_offsets.push_back({item_key(write.item), write.numa_id, write.span,
                                              workflow.item(write.item).bytes});
        }
        artifact.compute_offsets.push_back(
            {name, record.compute, workflow.task(record.task).flops});
        artifact.total_offsets.push_back({name, record.total, workflow.task(record.task).flops});
        artifact.makespan = std::max(artifact.makespan, record.total.end);
        artifact.dispatch_order.push_back(name);
    }
    return artifact;
}

RunArtifact run(const RunConfig& config) {
    if (config.mapper_type != "simulation") {
        throw EngineError("mapper '" + config.mapper_type +
                          "' is not supported; only simulation runs are");
    }
    WorkflowGraph full = parse_workflow_dot(read_text_file(config.dag_file));
    WorkflowGraph workflow = strip_boundary(full);
    PlatformSpec platform = load_platform(config);
    std::unique_ptr<Scheduler> scheduler = make_scheduler(config, workflow, platform);
    SimState state = run_simulation(workflow, platform, *scheduler);
    return build_artifact(platform, workflow, state);
}

} // namespace wfsim

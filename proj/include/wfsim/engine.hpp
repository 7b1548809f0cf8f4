#pragma once

#include "wfsim/platform.hpp"
#include "wfsim/scheduler.hpp"
#include "wfsim/trace.hpp"
#include "wfsim/workflow.hpp"

#include <optional>
#include <unordered_map>
#include <vector>

namespace wfsim {

// One communication phase entry: which item moved, on which NUMA node the
// data lives, and when the transfer ran.
struct CommRecord {
    int item = -1;
    int numa_id = 0;
    Interval span;
};

// Everything observed while executing one task.
struct TaskRecord {
    int task = -1;
    int core = -1;
    int numa_id = 0;
    Interval total;
    Interval compute;
    std::vector<CommRecord> reads;  // input item order
    std::vector<CommRecord> writes; // output item order
};

// Mutable state of one simulated run.
struct SimState {
    std::vector<double> core_avail;               // by core id
    std::vector<std::optional<double>> task_aft;  // by task id
    std::unordered_map<int, int> item_locality;   // written, unconsumed items
    long tasks_active = 0;
    long reads_active = 0;
    long writes_active = 0;
    std::vector<TaskRecord> records;              // dispatch order
    std::vector<ScheduleDecision> dispatch_log;   // dispatch order

    SchedulerView view(const WorkflowGraph& workflow, const PlatformSpec& platform,
                       double now) const;
};

// Creates the initial state: zero availability for all cores, no finish
// times, no localities.
SimState make_initial_state(const WorkflowGraph& workflow, const PlatformSpec& platform);

// Runs one task to completion under the virtual clock. Input transfers all
// start at the task start; compute follows the slowest read; output writes
// all start when compute ends and stay on the executing core's NUMA node
// (first touch). Consumed inputs leave the locality map, the core's
// availability and the task's finish time advance to the total end.
const TaskRecord& execute_task(const ScheduleDecision& decision, SimState& state,
                               const WorkflowGraph& workflow, const PlatformSpec& platform);

// Drives the scheduler until every task has been dispatched. Whenever the
// policy cannot dispatch, the virtual clock jumps to the earliest pending
// core availability; if no completion is pending the run is deadlocked.
SimState run_simulation(const WorkflowGraph& workflow, const PlatformSpec& platform,
                        Scheduler& scheduler);

// Checks the finished state against the workflow: every task executed, every
// item written and consumed exactly once.
void finalize_run(const SimState& state, const WorkflowGraph& workflow);

// Assembles the serializable artifact from a finished run.
RunArtifact build_artifact(const PlatformSpec& platform, const WorkflowGraph& workflow,
                           const SimState& state);

// Full pipeline: load the workflow and platform named by the config, strip
// the boundary vertices, simulate under the configured scheduler and return
// the artifact. Only the simulation mapper is supported.
RunArtifact run(const RunConfig& config);

} // namespace wfsim

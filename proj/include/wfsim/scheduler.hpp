#pragma once

#include "wfsim/platform.hpp"
#include "wfsim/workflow.hpp"

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace wfsim {

// One scheduling step. An absent task means nothing is ready; an absent core
// means the selected task has no usable core yet. When both are present the
// estimated finish time is filled in.
struct ScheduleDecision {
    std::optional<std::string> task;
    std::optional<int> core;
    std::optional<double> estimated_finish_time;
};

// Read-only view of the runtime state offered to scheduling policies.
// core_avail is indexed by core id; task_aft by task id; item_locality maps
// written, not yet consumed items to the NUMA node holding them. now is the
// virtual time up to which dispatched work has been observed.
struct SchedulerView {
    const WorkflowGraph* workflow = nullptr;
    const PlatformSpec* platform = nullptr;
    const std::vector<double>* core_avail = nullptr;
    const std::vector<std::optional<double>>* task_aft = nullptr;
    const std::unordered_map<int, int>* item_locality = nullptr;
    double now = 0.0;

    double avail(int core) const { return core_avail->at(core); }
    bool completed(int task) const { return task_aft->at(task).has_value(); }
    double aft(int task) const;
    int locality(int item) const;
    bool ready(int task) const;
};

// Earliest start time of a task on a core: the later of the core's
// availability and the finish times of every predecessor. Throws when a
// predecessor has not completed.
double est(int task, int core, const SchedulerView& view);

// Earliest finish time: est plus the slowest input transfer from its current
// NUMA node, the compute time, and the slowest output write. Outputs are
// first-touch allocations, so writes stay on the core's own node.
double eft(int task, int core, const SchedulerView& view);

class Scheduler {
public:
    virtual ~Scheduler() = default;

    // True while tasks remain undispatched.
    virtual bool has_next() const = 0;

    // Produces the next dispatch decision. A returned (task, core) pair is
    // dispatched immediately by the engine.
    virtual ScheduleDecision next(const SchedulerView& view) = 0;
};

struct FifoParams {
    bool prioritize_by_core_id = true;    // lowest free core id vs rotating pick
    bool prioritize_by_exec_order = true; // level-order + locality score vs raw release order
};

// Queue-based policy. Ready tasks enter a FIFO queue; every released batch is
// ordered by level-order rank and then by descending input-locality score.
// The head task runs on the NUMA node holding the largest share of its input
// bytes and waits for a free core there, so the decision may name a task with
// no core. Score ties across nodes rotate through the nodes to balance load.
class FifoScheduler : public Scheduler {
public:
    FifoScheduler(const WorkflowGraph& workflow, const PlatformSpec& platform,
                  FifoParams params = {});

    bool has_next() const override;
    ScheduleDecision next(const SchedulerView& view) override;

private:
    void sync_releases(const SchedulerView& view);
    void release_batch(std::vector<int> batch, const SchedulerView& view);
    std::vector<double> input_node_shares(int task, const SchedulerView& view) const;
    int pick_node(const std::vector<double>& shares);
    std::optional<int> pick_core(int node, const SchedulerView& view);

    const WorkflowGraph& workflow_;
    const PlatformSpec& platform_;
    FifoParams params_;
    std::vector<LevelRank> ranks_;
    std::deque<int> queue_;
    std::vector<bool> released_;
    std::vector<int> dispatched_order_;
    size_t release_cursor_ = 0;
    bool sources_seeded_ = false;
    int node_rotation_ = 0;
    std::vector<int> core_cursor_; // per NUMA node, used when not picking by core id
};

// Greedy policy: across every (ready task, enabled core) pair, dispatch the
// pair with the smallest estimated finish time. Queueing on busy cores is
// captured by the availability term of est. Ties prefer the lower level-order
// rank, then the lower core id.
class MinMinScheduler : public Scheduler {
public:
    MinMinScheduler(const WorkflowGraph& workflow, const PlatformSpec& platform);

    bool has_next() const override;
    ScheduleDecision next(const SchedulerView& view) override;

private:
    const WorkflowGraph& workflow_;
    const PlatformSpec& platform_;
    std::vector<LevelRank> ranks_;
    std::vector<bool> dispatched_;
    int dispatched_count_ = 0;
};

// Upward rank of every task: mean compute cost over the enabled cores plus
// the largest successor rank reached through the mean-cost communication.
std::vector<double> heft_upward_ranks(const WorkflowGraph& workflow,
                                      const PlatformSpec& platform);

// List scheduling by upward rank: among ready tasks pick the highest rank
// (ties: level-order rank, then name) and place it on the enabled core with
// the smallest estimated finish time (ties: lower core id).
class HeftScheduler : public Scheduler {
public:
    HeftScheduler(const WorkflowGraph& workflow, const PlatformSpec& platform);

    bool has_next() const override;
    ScheduleDecision next(const SchedulerView& view) override;

private:
    const WorkflowGraph& workflow_;
    const PlatformSpec& platform_;
    std::vector<LevelRank> ranks_; // computed first; validates acyclicity
    std::vector<double> upward_ranks_;
    std::vector<bool> dispatched_;
    int dispatched_count_ = 0;
};

// Builds the scheduler named by the config and validates scheduler_params.
std::unique_ptr<Scheduler> make_scheduler(const RunConfig& config,
                                          const WorkflowGraph& workflow,
                                          const PlatformSpec& platform);

} // namespace wfsim

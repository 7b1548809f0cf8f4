#include "wfsim/scheduler.hpp"

#include "wfsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <tuple>

namespace wfsim {

double SchedulerView::aft(int task) const {
    const auto& value = task_aft->at(task);
    if (!value) {
        throw EngineError("task '" + workflow->task(task).name + "' has not completed");
    }
    return *value;
}

int SchedulerView::locality(int item) const {
    auto it = item_locality->find(item);
    if (it == item_locality->end()) {
        const DataItemSpec& spec = workflow->item(item);
        throw EngineError("data item '" + spec.producer + "->" + spec.consumer +
                          "' has no recorded locality");
    }
    return it->second;
}

bool SchedulerView::ready(int task) const {
    const auto& preds = workflow->predecessors(task);
    return std::all_of(preds.begin(), preds.end(), [&](int p) { return completed(p); });
}

double est(int task, int core, const SchedulerView& view) {
    double start = view.avail(core);
    for (int pred : view.workflow->predecessors(task)) {
        start = std::max(start, view.aft(pred));
    }
    return start;
}

double eft(int task, int core, const SchedulerView& view) {
    const WorkflowGraph& wf = *view.workflow;
    const PlatformSpec& platform = *view.platform;
    int node = platform.topology.numa_of(core);

    double start = est(task, core, view);
    double max_read = 0.0;
    for (int item : wf.in_items(task)) {
        max_read = std::max(
            max_read, comm_cost(wf.item(item).bytes, view.locality(item), node,
                                platform.distance));
    }
    double compute = compute_cost(wf.task(task).flops, core, platform);
    double max_write = 0.0;
    for (int item : wf.out_items(task)) {
        max_write = std::max(max_write,
                             comm_cost(wf.item(item).bytes, node, node, platform.distance));
    }
    return ((start + max_read) + compute) + max_write;
}

// --- FIFO ---------------------------------------------------------------

FifoScheduler::FifoScheduler(const WorkflowGraph& workflow, const PlatformSpec& platform,
                             FifoParams params)
    : workflow_(workflow),
      platform_(platform),
      params_(params),
      ranks_(level_order_ranks(workflow)),
      released_(workflow.task_count(), false),
      core_cursor_(platform.topology.numa_nodes(), 0) {}

bool FifoScheduler::has_next() const {
    return dispatched_order_.size() < static_cast<size_t>(workflow_.task_count());
}

void FifoScheduler::release_batch(std::vector<int> batch, const SchedulerView& view) {
    if (batch.empty()) {
        return;
    }
    if (params_.prioritize_by_exec_order) {
        std::vector<double> score(batch.size(), 0.0);
        for (size_t i = 0; i < batch.size(); ++i) {
            auto shares = input_node_shares(batch[i], view);
            score[i] = shares.empty() ? 0.0 : *std::max_element(shares.begin(), shares.end());
        }
        std::vector<size_t> order(batch.size());
        for (size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            if (score[a] != score[b]) {
                return score[a] > score[b];
            }
            return ranks_[batch[a]] < ranks_[batch[b]];
        });
        std::vector<int> sorted;
        sorted.reserve(batch.size());
        for (size_t i : order) {
            sorted.push_back(batch[i]);
        }
        batch = std::move(sorted);
    }
    for (int task : batch) {
        released_[task] = true;
        queue_.push_back(task);
    }
}

void FifoScheduler::sync_releases(const SchedulerView& view) {
    if (!sources_seeded_) {
        sources_seeded_ = true;
        std::vector<int> sources;
        for (int t = 0; t < workflow_.task_count(); ++t) {
            if (workflow_.predecessors(t).empty()) {
                sources.push_back(t);
            }
        }
        release_batch(std::move(sources), view);
    }
    // Each completed dispatch releases the successors it enabled, one batch
    // per completing task.
    while (release_cursor_ < dispatched_order_.size()) {
        int done = dispatched_order_[release_cursor_];
        if (!view.completed(done)) {
            break;
        }
        ++release_cursor_;
        std::vector<int> batch;
        for (int succ : workflow_.successors(done)) {
            if (!released_[succ] && view.ready(succ)) {
                batch.push_back(succ);
            }
        }
        release_batch(std::move(batch), view);
    }
}

std::vector<double> FifoScheduler::input_node_shares(int task, const SchedulerView& view) const {
    std::vector<double> shares(platform_.topology.numa_nodes(), 0.0);
    for (int item : workflow_.in_items(task)) {
        shares[view.locality(item)] += workflow_.item(item).bytes;
    }
    return shares;
}

int FifoScheduler::pick_node(const std::vector<double>& shares) {
    const CoreTopology& topo = platform_.topology;
    int nodes = topo.numa_nodes();
    double best_share = -1.0;
    std::vector<bool> tied(nodes, false);
    int tied_count = 0;
    int best_node = -1;
    for (int node = 0; node < nodes; ++node) {
        if (topo.enabled_cores_of(node).empty()) {
            continue;
        }
        if (shares[node] > best_share) {
            best_share = shares[node];
            std::fill(tied.begin(), tied.end(), false);
            tied[node] = true;
            tied_count = 1;
            best_node = node;
        } else if (shares[node] == best_share) {
            tied[node] = true;
            ++tied_count;
        }
    }
    if (tied_count <= 1) {
        return best_node;
    }
    // Rotate node priority across tied nodes to balance task placement.
    for (int offset = 0; offset < nodes; ++offset) {
        int node = (node_rotation_ + offset) % nodes;
        if (tied[node]) {
            node_rotation_ = (node + 1) % nodes;
            return node;
        }
    }
    return best_node;
}

std::optional<int> FifoScheduler::pick_core(int node, const SchedulerView& view) {
    const std::vector<int>& cores = platform_.topology.enabled_cores_of(node);
    if (params_.prioritize_by_core_id) {
        for (int core : cores) {
            if (view.avail(core) <= view.now) {
                return core;
            }
        }
        return std::nullopt;
    }
    int count = static_cast<int>(cores.size());
    for (int offset = 0; offset < count; ++offset) {
        int position = (core_cursor_[node] + offset) % count;
        if (view.avail(cores[position]) <= view.now) {
            core_cursor_[node] = (position + 1) % count;
            return cores[position];
        }
    }
    return std::nullopt;
}

ScheduleDecision FifoScheduler::next(const SchedulerView& view) {
    sync_releases(view);
    if (queue_.empty()) {
        return {};
    }
    int task = queue_.front();
    int node = pick_node(input_node_shares(task, view));
    std::optional<int> core = pick_core(node, view);
    if (!core) {
        return {workflow_.task(task).name, std::nullopt, std::nullopt};
    }
    queue_.pop_front();
    dispatched_order_.push_back(task);
    return {workflow_.task(task).name, core, eft(task, *core, view)};
}

// --- Min-Min ------------------------------------------------------------

MinMinScheduler::MinMinScheduler(const WorkflowGraph& workflow, const PlatformSpec& platform)
    : workflow_(workflow),
      platform_(platform),
      ranks_(level_order_ranks(workflow)),
      dispatched_(workflow.task_count(), false) {}

bool MinMinScheduler::has_next() const {
    return dispatched_count_ < workflow_.task_count();
}

ScheduleDecision MinMinScheduler::next(const SchedulerView& view) {
    int best_task = -1;
    int best_core = -1;
    double best_finish = std::numeric_limits<double>::infinity();
    for (int task = 0; task < workflow_.task_count(); ++task) {
        if (dispatched_[task] || !view.ready(task)) {
            continue;
        }
        for (int core : platform_.topology.enabled_cores()) {
            double finish = eft(task, core, view);
            auto candidate = std::make_tuple(finish, ranks_[task].level, ranks_[task].sibling,
                                             core);
            auto incumbent = best_task < 0
                                 ? std::make_tuple(best_finish, 0, 0, 0)
                                 : std::make_tuple(best_finish, ranks_[best_task].level,
                                                   ranks_[best_task].sibling, best_core);
            if (best_task < 0 || candidate < incumbent) {
                best_task = task;
                best_core = core;
                best_finish = finish;
            }
        }
    }
    if (best_task < 0) {
        return {};
    }
    dispatched_[best_task] = true;
    ++dispatched_count_;
    return {workflow_.task(best_task).name, best_core, best_finish};
}

// --- HEFT ---------------------------------------------------------------

std::vector<double> heft_upward_ranks(const WorkflowGraph& workflow,
                                      const PlatformSpec& platform) {
    const auto& cores = platform.topology.enabled_cores();
    std::vector<double> mean_compute(workflow.task_count(), 0.0);
    for (int task = 0; task < workflow.task_count(); ++task) {
        double total = 0.0;
        for (int core : cores) {
            total += compute_cost(workflow.task(task).flops, core, platform);
        }
        mean_compute[task] = total / static_cast<double>(cores.size());
    }

    std::vector<double> ranks(workflow.task_count(),
                              std::numeric_limits<double>::quiet_NaN());
    std::function<double(int)> rank_of = [&](int task) -> double {
        if (!std::isnan(ranks[task])) {
            return ranks[task];
        }
        double best_successor = 0.0;
        for (int item : workflow.out_items(task)) {
            double through = mean_comm_cost(workflow.item(item).bytes, platform.distance) +
                             rank_of(workflow.item_consumer(item));
            best_successor = std::max(best_successor, through);
        }
        ranks[task] = mean_compute[task] + best_successor;
        return ranks[task];
    };
    for (int task = 0; task < workflow.task_count(); ++task) {
        rank_of(task);
    }
    return ranks;
}

HeftScheduler::HeftScheduler(const WorkflowGraph& workflow, const PlatformSpec& platform)
    : workflow_(workflow),
      platform_(platform),
      ranks_(level_order_ranks(workflow)),
      upward_ranks_(heft_upward_ranks(workflow, platform)),
      dispatched_(workflow.task_count(), false) {}

bool HeftScheduler::has_next() const {
    return dispatched_count_ < workflow_.task_count();
}

ScheduleDecision HeftScheduler::next(const SchedulerView& view) {
    int best_task = -1;
    for (int task = 0; task < workflow_.task_count(); ++task) {
        if (dispatched_[task] || !view.ready(task)) {
            continue;
        }
        if (best_task < 0) {
            best_task = task;
            continue;
        }
        auto candidate = std::make_tuple(-upward_ranks_[task], ranks_[task].level,
                                         ranks_[task].sibling, workflow_.task(task).name);
        auto incumbent = std::make_tuple(-upward_ranks_[best_task], ranks_[best_task].level,
                                         ranks_[best_task].sibling,
                                         workflow_.task(best_task).name);
        if (candidate < incumbent) {
            best_task = task;
        }
    }
    if (best_task < 0) {
        return {};
    }
    int best_core = -1;
    double best_finish = std::numeric_limits<double>::infinity();
    for (int core : platform_.topology.enabled_cores()) {
        double finish = eft(best_task, core, view);
        if (finish < best_finish) {
            best_finish = finish;
            best_core = core;
        }
    }
    dispatched_[best_task] = true;
    ++dispatched_count_;
    return {workflow_.task(best_task).name, best_core, best_finish};
}

// --- Factory ------------------------------------------------------------

std::unique_ptr<Scheduler> make_scheduler(const RunConfig& config,
                                          const WorkflowGraph& workflow,
                                          const PlatformSpec& platform) {
    auto parse_flag = [](const std::string& key, const std::string& value) {
        if (value == "yes") {
            return true;
        }
        if (value == "no") {
            return false;
        }
        throw ParseError("scheduler_params key '" + key + "' expects yes or no, got '" +
                         value + "'");
    };

    if (config.scheduler_type == "fifo") {
        FifoParams params;
        for (const auto& [key, value] : config.scheduler_params) {
            if (key == "fifo_prioritize_by_core_id") {
                params.prioritize_by_core_id = parse_flag(key, value);
            } else if (key == "fifo_prioritize_by_exec_order") {
                params.prioritize_by_exec_order = parse_flag(key, value);
            } else {
                throw ParseError("unknown scheduler_params key '" + key + "'");
            }
        }
        return std::make_unique<FifoScheduler>(workflow, platform, params);
    }
    if (!config.scheduler_params.empty()) {
        throw ParseError("unknown scheduler_params key '" +
                         config.scheduler_params.front().first + "'");
    }
    if (config.scheduler_type == "min-min") {
        return std::make_unique<MinMinScheduler>(workflow, platform);
    }
    if (config.scheduler_type == "heft") {
        return std::make_unique<HeftScheduler>(workflow, platform);
    }
    throw ParseError("unknown scheduler_type '" + config.scheduler_type + "'");
}

} // namespace wfsim

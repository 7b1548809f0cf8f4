#pragma once

#include <string>
#include <vector>

namespace wfsim {

inline constexpr const char* kBoundaryEntryName = "root";
inline constexpr const char* kBoundaryExitName = "end";

struct TaskSpec {
    std::string name;
    double flops = 0.0;
};

// One produced-once, consumed-once communication between two tasks.
struct DataItemSpec {
    std::string producer;
    std::string consumer;
    double bytes = 0.0;
};

// Directed acyclic workflow graph. Tasks and data items keep their
// declaration order; per-task adjacency follows item declaration order.
class WorkflowGraph {
public:
    // Both builders validate names and reject duplicates; add_item requires
    // previously added endpoint tasks and rejects self edges.
    int add_task(const std::string& name, double flops);
    int add_item(const std::string& producer, const std::string& consumer, double bytes);

    int task_count() const { return static_cast<int>(tasks_.size()); }
    int item_count() const { return static_cast<int>(items_.size()); }
    const TaskSpec& task(int index) const { return tasks_.at(index); }
    const DataItemSpec& item(int index) const { return items_.at(index); }
    const std::vector<TaskSpec>& tasks() const { return tasks_; }
    const std::vector<DataItemSpec>& items() const { return items_; }

    bool has_task(const std::string& name) const;
    bool has_item(const std::string& producer, const std::string& consumer) const;
    int task_index(const std::string& name) const;

    int item_producer(int item) const { return producer_task_.at(item); }
    int item_consumer(int item) const { return consumer_task_.at(item); }

    // Item ids entering / leaving a task, in declaration order.
    const std::vector<int>& in_items(int task) const { return in_items_.at(task); }
    const std::vector<int>& out_items(int task) const { return out_items_.at(task); }

    // Task ids, in item declaration order (distinct by construction).
    const std::vector<int>& predecessors(int task) const { return pred_tasks_.at(task); }
    const std::vector<int>& successors(int task) const { return succ_tasks_.at(task); }

private:
    std::vector<TaskSpec> tasks_;
    std::vector<DataItemSpec> items_;
    std::vector<int> producer_task_;
    std::vector<int> consumer_task_;
    std::vector<std::vector<int>> in_items_;
    std::vector<std::vector<int>> out_items_;
    std::vector<std::vector<int>> pred_tasks_;
    std::vector<std::vector<int>> succ_tasks_;
};

// Parses the restricted DOT dialect used for workflow descriptions:
//
//   strict digraph {
//       root    [size=2];    // '//' comments run to end of line
//       Task_1  [size=10];
//       root -> Task_1  [size=2];
//   }
//
// Vertices must be declared before edges reference them, every statement
// carries exactly one size attribute, and the mandatory boundary vertices
// "root" and "end" must both be present. Cycles, duplicate declarations,
// self edges and non-positive sizes on non-boundary elements are rejected;
// errors carry the offending line number.
WorkflowGraph parse_workflow_dot(const std::string& text);

// Renders a graph back to the restricted DOT dialect. Parsing the result
// yields an identical graph.
std::string serialize_workflow_dot(const WorkflowGraph& graph);

// Removes the boundary vertices and every edge touching them, preserving the
// declaration order of what remains.
WorkflowGraph strip_boundary(const WorkflowGraph& graph);

// Position of a task in a level-order traversal: level is the longest-path
// depth from the source frontier (sources sit at level 0) and sibling is the
// declaration-order position within the level.
struct LevelRank {
    int level = 0;
    int sibling = 0;

    friend bool operator==(const LevelRank&, const LevelRank&) = default;
};

inline bool operator<(const LevelRank& a, const LevelRank& b) {
    return a.level != b.level ? a.level < b.level : a.sibling < b.sibling;
}

// Ranks for every task of a boundary-stripped graph, indexed by task id.
std::vector<LevelRank> level_order_ranks(const WorkflowGraph& graph);

} // namespace wfsim

#include "wfsim/engine.hpp"

#include "support.hpp"
#include "wfsim/error.hpp"
#include "wfsim/scheduler.hpp"

#include <doctest.h>

#include <string>
#include <vector>

using namespace wfsim;
using test::contains;
using test::thrown_message;
using test::two_node_platform;
using test::two_node_workflow;

namespace {

// Scheduler stub that claims work remains but never produces a decision.
class StuckScheduler : public Scheduler {
public:
    bool has_next() const override { return true; }
    ScheduleDecision next(const SchedulerView&) override { return {}; }
};

} // namespace

TEST_CASE("initial state is empty") {
    const auto workflow = two_node_workflow();
    const auto platform = two_node_platform();
    const SimState state = make_initial_state(workflow, platform);

    CHECK(state.core_avail == std::vector<double>(26, 0.0));
    CHECK(state.task_aft.size() == 3);
    CHECK_FALSE(state.task_aft[0].has_value());
    CHECK(state.item_locality.empty());
    CHECK(state.tasks_active == 0);
    CHECK(state.records.empty());
}

TEST_CASE("executing a task records reads, compute and first-touch writes") {
    const auto workflow = two_node_workflow();
    const auto platform = two_node_platform();
    SimState state = make_initial_state(workflow, platform);

    const TaskRecord& first = execute_task({"Task_1", 0, {}}, state, workflow, platform);
    CHECK(first.task == 0);
    CHECK(first.core == 0);
    CHECK(first.numa_id == 0);
    CHECK(first.reads.empty());
    CHECK(first.compute.start == 0.0);
    CHECK(first.compute.end == 10.0);
    REQUIRE(first.writes.size() == 1);
    CHECK(first.writes[0].item == 0);
    CHECK(first.writes[0].numa_id == 0);
    CHECK(first.writes[0].span.start == 10.0);
    CHECK(first.writes[0].span.end == 12.0);
    CHECK(first.total.end == 12.0);
    CHECK(state.core_avail[0] == 12.0);
    CHECK(state.task_aft[0] == 12.0);
    CHECK(state.item_locality.at(0) == 0);
    CHECK(state.writes_active == 1);

    execute_task({"Task_2", 24, {}}, state, workflow, platform);
    const TaskRecord& last = execute_task({"Task_3", 24, {}}, state, workflow, platform);
    CHECK(last.total.start == 14.0);
    REQUIRE(last.reads.size() == 2);
    CHECK(last.reads[0].numa_id == 0);
    CHECK(last.reads[0].span.end == 19.0);
    CHECK(last.reads[1].numa_id == 1);
    CHECK(last.reads[1].span.end == 18.0);
    CHECK(last.compute.start == 19.0);
    CHECK(last.total.end == 29.0);
    CHECK(state.item_locality.empty());
    CHECK(state.reads_active == 2);
    CHECK(state.tasks_active == 3);
}

TEST_CASE("execution rejects inconsistent decisions") {
    const auto workflow = two_node_workflow();
    const auto platform = two_node_platform();
    SimState state = make_initial_state(workflow, platform);

    CHECK(contains(thrown_message([&] { execute_task({}, state, workflow, platform); }),
                   "incomplete schedule decision"));
    CHECK(contains(
        thrown_message([&] { execute_task({"Task_1", 7, {}}, state, workflow, platform); }),
        "core 7 is not enabled"));

    execute_task({"Task_1", 0, {}}, state, workflow, platform);
    CHECK(contains(
        thrown_message([&] { execute_task({"Task_1", 0, {}}, state, workflow, platform); }),
        "'Task_1' dispatched twice"));
    CHECK(contains(
        thrown_message([&] { execute_task({"Task_3", 0, {}}, state, workflow, platform); }),
        "has not completed"));
}

TEST_CASE("execution cross-checks the scheduler's finish estimate") {
    const auto workflow = two_node_workflow();
    const auto platform = two_node_platform();
    SimState state = make_initial_state(workflow, platform);

    CHECK(contains(
        thrown_message([&] { execute_task({"Task_1", 0, 99.0}, state, workflow, platform); }),
        "estimated 99"));

    SimState fresh = make_initial_state(workflow, platform);
    const TaskRecord& record = execute_task({"Task_1", 0, 12.0}, fresh, workflow, platform);
    CHECK(record.total.end == 12.0);
}

TEST_CASE("a run with no dispatchable work and no pending completion deadlocks") {
    const auto workflow = two_node_workflow();
    const auto platform = two_node_platform();
    StuckScheduler scheduler;
    const auto message =
        thrown_message([&] { run_simulation(workflow, platform, scheduler); });
    CHECK(contains(message, "deadlock"));
    CHECK(contains(message, "Task_1"));
}

TEST_CASE("finalize verifies every counter against the workflow") {
    const auto workflow = two_node_workflow();
    const auto platform = two_node_platform();
    const SimState empty = make_initial_state(workflow, platform);
    CHECK(contains(thrown_message([&] { finalize_run(empty, workflow); }),
                   "incomplete execution"));

    SimState state = make_initial_state(workflow, platform);
    execute_task({"Task_1", 0, {}}, state, workflow, platform);
    execute_task({"Task_2", 24, {}}, state, workflow, platform);
    execute_task({"Task_3", 24, {}}, state, workflow, platform);
    CHECK_NOTHROW(finalize_run(state, workflow));
}

TEST_CASE("artifact assembly flattens the run in dispatch order") {
    const auto workflow = two_node_workflow();
    const auto platform = two_node_platform();
    FifoScheduler scheduler(workflow, platform);
    const SimState state = run_simulation(workflow, platform, scheduler);
    const RunArtifact artifact = build_artifact(platform, workflow, state);

    CHECK(artifact.flops_per_cycle == 1e6);
    CHECK(artifact.execs_count == 3);
    CHECK(artifact.reads_count == 2);
    CHECK(artifact.writes_count == 2);
    CHECK(artifact.tasks_active_count == 3);
    CHECK(artifact.threads_checksum == 0);

    REQUIRE(artifact.core_availability.size() == 2);
    CHECK(artifact.core_availability[0] == std::pair<int, double>{0, 12.0});
    CHECK(artifact.core_availability[1] == std::pair<int, double>{24, 29.0});

    REQUIRE(artifact.localities.size() == 3);
    CHECK(artifact.localities[0].task == "Task_1");
    CHECK(artifact.localities[2].task == "Task_3");
    CHECK(artifact.localities[2].core_id == 24);
    CHECK(artifact.localities[2].numa_id == 1);

    REQUIRE(artifact.read_offsets.size() == 2);
    CHECK(artifact.read_offsets[0].key == "Task_1->Task_3");
    CHECK(artifact.read_offsets[0].span.end == 19.0);
    CHECK(artifact.read_offsets[1].key == "Task_2->Task_3");
    CHECK(artifact.read_offsets[1].payload == 20.0);

    REQUIRE(artifact.total_offsets.size() == 3);
    CHECK(artifact.total_offsets[2].span.start == 14.0);
    CHECK(artifact.total_offsets[2].span.end == 29.0);

    CHECK(artifact.makespan == 29.0);
    CHECK(artifact.dispatch_order ==
          std::vector<std::string>{"Task_1", "Task_2", "Task_3"});
}

TEST_CASE("the full pipeline runs a fixture configuration") {
    const RunArtifact artifact = test::run_fixture("test_fifo_simulation", "config_4");
    CHECK(artifact.execs_count == 3);
    CHECK(artifact.makespan == 29.0);
    CHECK(artifact.dispatch_order ==
          std::vector<std::string>{"Task_1", "Task_2", "Task_3"});
}

TEST_CASE("only the simulation mapper is supported") {
    RunConfig config = test::load_fixture_config("test_fifo_simulation", "config_4");
    config.mapper_type = "bare_metal";
    CHECK(contains(thrown_message([&] { run(config); }),
                   "mapper 'bare_metal' is not supported"));
}

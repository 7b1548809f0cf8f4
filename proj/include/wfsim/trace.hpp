#pragma once

#include "wfsim/platform.hpp"

#include <string>
#include <utility>
#include <vector>

namespace wfsim {

struct Interval {
    double start = 0.0;
    double end = 0.0;
};

// Complete result of one simulated run, ready for serialization. Trace
// sequences are stored in record order (dispatch order for tasks, phase
// order for communications); the emitter lists them newest first.
struct RunArtifact {
    // user section
    double flops_per_cycle = 1.0;
    ClockSpec clock;
    SquareMatrix distance_lat_ns;
    SquareMatrix distance_bw_gbps;

    // workflow section
    int execs_count = 0;
    int reads_count = 0;
    int writes_count = 0;

    // runtime section
    long threads_checksum = 0;
    int threads_active = 0;
    long tasks_active_count = 0;
    long reads_active_count = 0;
    long writes_active_count = 0;
    std::vector<std::pair<int, double>> core_availability; // ascending core id

    // trace section
    struct ThreadLocality {
        std::string task;
        int numa_id = 0;
        int core_id = 0;
        long voluntary_cs = 0;
        long involuntary_cs = 0;
        long core_migrations = 0;
    };
    struct CommOffsets {
        std::string key; // "producer->consumer"
        int numa_id = 0;
        Interval span;
        double payload = 0.0;
    };
    struct ExecOffsets {
        std::string task;
        Interval span;
        double payload = 0.0;
    };

    std::vector<ThreadLocality> localities;   // dispatch order
    std::vector<CommOffsets> write_offsets;   // write record order
    std::vector<CommOffsets> read_offsets;    // read record order
    std::vector<ExecOffsets> compute_offsets; // dispatch order
    std::vector<ExecOffsets> total_offsets;   // dispatch order

    double makespan = 0.0;
    std::vector<std::string> dispatch_order;
};

// Renders the artifact as the YAML trace document: sections user, workflow,
// runtime and trace in that order; per-task and per-item maps listed in
// reverse record order; core availability in ascending core id; numbers in
// shortest exact decimal form. Parsing the text recovers every numeric field
// exactly.
std::string emit_trace_yaml(const RunArtifact& artifact);

// Renders the dispatch activity as a human-readable run log.
std::string render_run_log(const RunArtifact& artifact, const std::string& scheduler_type);

} // namespace wfsim

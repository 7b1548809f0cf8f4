#include "wfsim/trace.hpp"

#include "wfsim/text_util.hpp"

#include <cstdio>
#include <sstream>

namespace wfsim {

namespace {

std::string flow_list(const std::vector<double>& values) {
    std::string out = "[";
    for (size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += format_number(values[i]);
    }
    return out + "]";
}

void emit_matrix(std::ostringstream& out, const std::string& key, const SquareMatrix& matrix) {
    out << "  " << key << ":\n";
    for (int row = 0; row < matrix.n; ++row) {
        std::vector<double> values(matrix.values.begin() + row * matrix.n,
                                   matrix.values.begin() + (row + 1) * matrix.n);
        out << "    - " << flow_list(values) << "\n";
    }
}

std::string offsets_entry(const Interval& span, double payload) {
    return "{start: " + format_number(span.start) + ", end: " + format_number(span.end) +
           ", payload: " + format_number(payload) + "}";
}

std::string fixed6(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6f", value);
    return buffer;
}

} // namespace

std::string emit_trace_yaml(const RunArtifact& artifact) {
    std::ostringstream out;

    out << "user:\n";
    out << "  flops_per_cycle: " << format_number(artifact.flops_per_cycle) << "\n";
    out << "  clock_frequency_type: " << to_string(artifact.clock.type) << "\n";
    if (artifact.clock.type == ClockType::per_core) {
        out << "  clock_frequency_hz: " << flow_list(artifact.clock.hz) << "\n";
    } else {
        out << "  clock_frequency_hz: " << format_number(artifact.clock.hz.at(0)) << "\n";
    }
    emit_matrix(out, "distance_lat_ns", artifact.distance_lat_ns);
    emit_matrix(out, "distance_bw_gbps", artifact.distance_bw_gbps);

    out << "\nworkflow:\n";
    out << "  execs_count: " << artifact.execs_count << "\n";
    out << "  reads_count: " << artifact.reads_count << "\n";
    out << "  writes_count: " << artifact.writes_count << "\n";

    out << "\nruntime:\n";
    out << "  threads_checksum: " << artifact.threads_checksum << "\n";
    out << "  threads_active: " << artifact.threads_active << "\n";
    out << "  tasks_active_count: " << artifact.tasks_active_count << "\n";
    out << "  reads_active_count: " << artifact.reads_active_count << "\n";
    out << "  writes_active_count: " << artifact.writes_active_count << "\n";
    out << "  core_availability:\n";
    for (const auto& [core, avail] : artifact.core_availability) {
        out << "    " << core << ": {avail_until: " << format_number(avail) << "}\n";
    }

    out << "\ntrace:\n";
    out << "  name_to_thread_locality:\n";
    for (auto it = artifact.localities.rbegin(); it != artifact.localities.rend(); ++it) {
        out << "    " << it->task << ": {numa_id: " << it->numa_id << ", core_id: "
            << it->core_id << ", voluntary_cs: " << it->voluntary_cs << ", involuntary_cs: "
            << it->involuntary_cs << ", core_migrations: " << it->core_migrations << "}\n";
    }

    out << "\n  numa_mappings_write:\n";
    for (auto it = artifact.write_offsets.rbegin(); it != artifact.write_offsets.rend(); ++it) {
        out << "    " << it->key << ": {numa_ids: [" << it->numa_id << "]}\n";
    }

    out << "\n  numa_mappings_read:\n";
    for (auto it = artifact.read_offsets.rbegin(); it != artifact.read_offsets.rend(); ++it) {
        out << "    " << it->key << ": {numa_ids: [" << it->numa_id << "]}\n";
    }

    out << "\n  comm_name_read_offsets:\n";
    for (auto it = artifact.read_offsets.rbegin(); it != artifact.read_offsets.rend(); ++it) {
        out << "    " << it->key << ": " << offsets_entry(it->span, it->payload) << "\n";
    }

    out << "\n  comm_name_write_offsets:\n";
    for (auto it = artifact.write_offsets.rbegin(); it != artifact.write_offsets.rend(); ++it) {
        out << "    " << it->key << ": " << offsets_entry(it->span, it->payload) << "\n";
    }

    out << "\n  exec_name_compute_offsets:\n";
    for (auto it = artifact.compute_offsets.rbegin(); it != artifact.compute_offsets.rend();
         ++it) {
        out << "    " << it->task << ": " << offsets_entry(it->span, it->payload) << "\n";
    }

    out << "\n  exec_name_total_offsets:\n";
    for (auto it = artifact.total_offsets.rbegin(); it != artifact.total_offsets.rend(); ++it) {
        out << "    " << it->task << ": " << offsets_entry(it->span, it->payload) << "\n";
    }

    return out.str();
}

std::string render_run_log(const RunArtifact& artifact, const std::string& scheduler_type) {
    std::string scheduler = scheduler_type == "min-min" ? "min_min" : scheduler_type;
    scheduler += "_scheduler";

    std::ostringstream out;
    out << "[runtime/INFO] Initialize\n";
    out << "[runtime/INFO] Start\n";
    out << "[mapper_simulation/INFO] Start\n";

    // Rebuild per-task phase lines from the flat offset sequences.
    for (size_t i = 0; i < artifact.total_offsets.size(); ++i) {
        const auto& total = artifact.total_offsets[i];
        const auto& locality = artifact.localities[i];
        std::string prefix = "[mapper_simulation/INFO] Task ID: " + total.task +
                             ", Core ID: " + std::to_string(locality.core_id) + " => ";
        out << "[" << scheduler << "/INFO] selected_task: " << total.task
            << ", selected_core_id: " << locality.core_id << ", estimated_finish_time: "
            << fixed6(total.span.end) << "\n";
        out << prefix << "message: started.\n";
        for (const auto& read : artifact.read_offsets) {
            std::string consumer = read.key.substr(read.key.find("->") + 2);
            if (consumer == total.task) {
                out << prefix << "read: " << read.key << ", payload: "
                    << format_number(read.payload) << ", locality: [" << read.numa_id << "].\n";
            }
        }
        for (const auto& write : artifact.write_offsets) {
            std::string producer = write.key.substr(0, write.key.find("->"));
            if (producer == total.task) {
                out << prefix << "write: " << write.key << ", payload: "
                    << format_number(write.payload) << ", locality: [" << write.numa_id
                    << "].\n";
            }
        }
        out << prefix << "message: finished at " << fixed6(total.span.end) << ".\n";
    }

    out << "[mapper_simulation/INFO] End\n";
    out << "[runtime/INFO] End\n";
    out << "[runtime/INFO] Finalize, makespan: " << format_number(artifact.makespan) << "\n";
    return out.str();
}

} // namespace wfsim

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wfsim {

struct SquareMatrix {
    int n = 0;
    std::vector<double> values; // row-major, n*n entries

    double at(int row, int col) const { return values.at(row * n + col); }
};

// Parses "n v11 v12 ... vnn": a dimension token followed by exactly n*n
// whitespace-separated reals, row-major.
SquareMatrix parse_distance_matrix(const std::string& text);

// Pairwise NUMA distances: latencies in nanoseconds, bandwidths in GB/s.
struct DistanceMatrix {
    SquareMatrix latency_ns;
    SquareMatrix bandwidth_gbps;

    int nodes() const { return latency_ns.n; }
};

// Validates matching dimensions, non-negative latencies and positive
// bandwidths.
DistanceMatrix make_distance_matrix(SquareMatrix latency_ns, SquareMatrix bandwidth_gbps);

// Hex mask with "0x" prefix; bit i enables core i. Returns ascending core
// ids and rejects masks that enable nothing.
std::vector<int> parse_core_mask(const std::string& mask);
std::string format_core_mask(const std::vector<int>& cores);

// Core ids map onto NUMA nodes in contiguous blocks of cores_per_numa.
class CoreTopology {
public:
    CoreTopology() = default;
    CoreTopology(std::vector<int> enabled_cores, int numa_nodes, int total_cores,
                 int cores_per_numa);

    int total_cores() const { return total_cores_; }
    int cores_per_numa() const { return cores_per_numa_; }
    int numa_nodes() const { return numa_nodes_; }
    const std::vector<int>& enabled_cores() const { return enabled_cores_; }
    const std::vector<int>& enabled_cores_of(int numa) const {
        return enabled_by_node_.at(numa);
    }

    bool is_enabled(int core) const;
    int numa_of(int core) const;
    // Position of an enabled core in the ascending enabled list.
    int enabled_position(int core) const;

private:
    std::vector<int> enabled_cores_;
    std::vector<std::vector<int>> enabled_by_node_;
    int numa_nodes_ = 0;
    int total_cores_ = 0;
    int cores_per_numa_ = 0;
};

// Builds a topology for the given enabled cores and node count. When absent,
// total_cores defaults to the highest enabled core id + 1 rounded up to a
// multiple of numa_nodes, and cores_per_numa to total_cores / numa_nodes.
CoreTopology make_core_topology(std::vector<int> enabled_cores, int numa_nodes,
                                std::optional<int> total_cores = std::nullopt,
                                std::optional<int> cores_per_numa = std::nullopt);

enum class ClockType {
    static_rate, // one frequency for every core
    per_core,    // one frequency per enabled core, in ascending core-id order
    dynamic_rate // measured at run time; unsupported by the simulator
};

std::string to_string(ClockType type);

struct ClockSpec {
    ClockType type = ClockType::static_rate;
    std::vector<double> hz; // one entry when static, |enabled| entries per-core
};

struct PlatformSpec {
    DistanceMatrix distance;
    CoreTopology topology;
    double flops_per_cycle = 1.0;
    ClockSpec clock;

    double frequency_hz(int core) const;
};

// Estimated transfer time in microseconds for bytes moved between two NUMA
// nodes: latency_ns/1000 + bytes/(bandwidth_gbps*1000).
double comm_cost(double bytes, int src_numa, int dst_numa, const DistanceMatrix& distance);

// Transfer time under the arithmetic mean of all n*n latency and bandwidth
// entries, diagonal included.
double mean_comm_cost(double bytes, const DistanceMatrix& distance);

// Execution time in microseconds: flops / (flops_per_cycle * frequency_hz),
// scaled from seconds.
double compute_cost(double flops, int core, const PlatformSpec& platform);

struct RunConfig {
    std::filesystem::path dag_file;
    std::string scheduler_type;
    std::vector<std::pair<std::string, std::string>> scheduler_params;
    std::string mapper_type;
    std::string mapper_mem_policy_type = "default";
    std::vector<int> mapper_mem_bind_numa_node_ids;
    std::string core_avail_mask;
    double flops_per_cycle = 1.0;
    ClockType clock_frequency_type = ClockType::static_rate;
    std::vector<double> clock_frequency_hz;
    std::filesystem::path latency_file;
    std::filesystem::path bandwidth_file;
    std::filesystem::path out_file_name;
    std::optional<int> cores_per_numa;
    std::optional<int> total_cores;
};

// Parses and validates the JSON run configuration. Unknown keys, unknown
// scheduler/mapper names, malformed masks, non-positive frequencies and a
// dynamic clock under the simulation mapper are all rejected. Paths are kept
// as written; see resolve_config_paths.
RunConfig parse_run_config(const std::string& json_text);

// Resolves every relative path in the config against base_dir.
void resolve_config_paths(RunConfig& config, const std::filesystem::path& base_dir);

// Loads the distance matrix files and assembles the platform description.
PlatformSpec load_platform(const RunConfig& config);

} // namespace wfsim

#include "wfsim/platform.hpp"

#include "wfsim/error.hpp"
#include "wfsim/text_util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

namespace wfsim {

namespace {

using nlohmann::json;

int hex_digit_value(char c) {
    if (c >= '0' && c <= '9') {
        return c - '0';
    }
    if (c >= 'a' && c <= 'f') {
        return c - 'a' + 10;
    }
    if (c >= 'A' && c <= 'F') {
        return c - 'A' + 10;
    }
    return -1;
}

int round_up_to_multiple(int value, int factor) {
    return ((value + factor - 1) / factor) * factor;
}

} // namespace

SquareMatrix parse_distance_matrix(const std::string& text) {
    std::istringstream stream(text);
    std::vector<std::string> tokens;
    std::string token;
    while (stream >> token) {
        tokens.push_back(token);
    }
    if (tokens.empty()) {
        throw ParseError("distance matrix is empty");
    }
    auto dimension = try_parse_number(tokens[0]);
    if (!dimension || *dimension < 1.0 || *dimension != std::floor(*dimension)) {
        throw ParseError("invalid matrix dimension '" + tokens[0] + "'");
    }
    int n = static_cast<int>(*dimension);
    size_t expected = static_cast<size_t>(n) * n;
    if (tokens.size() - 1 != expected) {
        throw ParseError("expected " + std::to_string(expected) + " matrix values, got " +
                         std::to_string(tokens.size() - 1));
    }
    SquareMatrix matrix;
    matrix.n = n;
    matrix.values.reserve(expected);
    for (size_t i = 1; i < tokens.size(); ++i) {
        auto value = try_parse_number(tokens[i]);
        if (!value) {
            throw ParseError("invalid matrix value '" + tokens[i] + "'");
        }
        matrix.values.push_back(*value);
    }
    return matrix;
}

DistanceMatrix make_distance_matrix(SquareMatrix latency_ns, SquareMatrix bandwidth_gbps) {
    if (latency_ns.n != bandwidth_gbps.n) {
        throw ParseError("latency and bandwidth matrix dimensions differ: " +
                         std::to_string(latency_ns.n) + " vs " +
                         std::to_string(bandwidth_gbps.n));
    }
    for (double v : latency_ns.values) {
        if (v < 0.0) {
            throw ParseError("negative latency entry " + format_number(v));
        }
    }
    for (double v : bandwidth_gbps.values) {
        if (v <= 0.0) {
            throw ParseError("non-positive bandwidth entry " + format_number(v));
        }
    }
    return {std::move(latency_ns), std::move(bandwidth_gbps)};
}

std::vector<int> parse_core_mask(const std::string& mask) {
    if (mask.size() < 3 || mask[0] != '0' || (mask[1] != 'x' && mask[1] != 'X')) {
        throw ParseError("core mask '" + mask + "' lacks 0x prefix");
    }
    std::vector<int> cores;
    int bit = 0;
    for (size_t i = mask.size(); i > 2; --i, bit += 4) {
        int digit = hex_digit_value(mask[i - 1]);
        if (digit < 0) {
            throw ParseError(std::string("invalid hex digit '") + mask[i - 1] + "' in core mask");
        }
        for (int b = 0; b < 4; ++b) {
            if (digit & (1 << b)) {
                cores.push_back(bit + b);
            }
        }
    }
    if (cores.empty()) {
        throw ParseError("core mask '" + mask + "' enables no cores");
    }
    std::sort(cores.begin(), cores.end());
    return cores;
}

std::string format_core_mask(const std::vector<int>& cores) {
    if (cores.empty()) {
        throw ParseError("cannot format an empty core set");
    }
    int max_core = *std::max_element(cores.begin(), cores.end());
    std::vector<int> nibbles(max_core / 4 + 1, 0);
    for (int core : cores) {
        if (core < 0) {
            throw ParseError("negative core id " + std::to_string(core));
        }
        nibbles[core / 4] |= 1 << (core % 4);
    }
    std::string out = "0x";
    for (auto it = nibbles.rbegin(); it != nibbles.rend(); ++it) {
        out += "0123456789abcdef"[*it];
    }
    return out;
}

CoreTopology::CoreTopology(std::vector<int> enabled_cores, int numa_nodes, int total_cores,
                           int cores_per_numa)
    : enabled_cores_(std::move(enabled_cores)),
      numa_nodes_(numa_nodes),
      total_cores_(total_cores),
      cores_per_numa_(cores_per_numa) {
    enabled_by_node_.assign(numa_nodes_, {});
    for (int core : enabled_cores_) {
        enabled_by_node_[numa_of(core)].push_back(core);
    }
}

bool CoreTopology::is_enabled(int core) const {
    return std::binary_search(enabled_cores_.begin(), enabled_cores_.end(), core);
}

int CoreTopology::numa_of(int core) const {
    if (core < 0 || core >= total_cores_) {
        throw ParseError("core id " + std::to_string(core) + " out of range for " +
                         std::to_string(total_cores_) + " cores");
    }
    return core / cores_per_numa_;
}

int CoreTopology::enabled_position(int core) const {
    auto it = std::lower_bound(enabled_cores_.begin(), enabled_cores_.end(), core);
    if (it == enabled_cores_.end() || *it != core) {
        throw ParseError("core " + std::to_string(core) + " is not enabled");
    }
    return static_cast<int>(it - enabled_cores_.begin());
}

CoreTopology make_core_topology(std::vector<int> enabled_cores, int numa_nodes,
                                std::optional<int> total_cores,
                                std::optional<int> cores_per_numa) {
    if (numa_nodes < 1) {
        throw ParseError("NUMA node count must be positive");
    }
    if (enabled_cores.empty()) {
        throw ParseError("no enabled cores");
    }
    std::sort(enabled_cores.begin(), enabled_cores.end());
    enabled_cores.erase(std::unique(enabled_cores.begin(), enabled_cores.end()),
                        enabled_cores.end());
    if (enabled_cores.front() < 0) {
        throw ParseError("negative core id " + std::to_string(enabled_cores.front()));
    }

    int total = 0;
    int per_node = 0;
    if (cores_per_numa) {
        per_node = *cores_per_numa;
        if (per_node < 1) {
            throw ParseError("cores_per_numa must be positive");
        }
        total = total_cores.value_or(per_node * numa_nodes);
        if (total != per_node * numa_nodes) {
            throw ParseError("total_cores " + std::to_string(total) +
                             " != cores_per_numa * numa_nodes (" +
                             std::to_string(per_node * numa_nodes) + ")");
        }
    } else if (total_cores) {
        total = *total_cores;
        if (total < 1 || total % numa_nodes != 0) {
            throw ParseError("total_cores " + std::to_string(total) +
                             " is not a positive multiple of " + std::to_string(numa_nodes) +
                             " NUMA nodes");
        }
        per_node = total / numa_nodes;
    } else {
        total = round_up_to_multiple(enabled_cores.back() + 1, numa_nodes);
        per_node = total / numa_nodes;
    }
    if (enabled_cores.back() >= total) {
        throw ParseError("core id " + std::to_string(enabled_cores.back()) +
                         " out of range for " + std::to_string(total) + " cores");
    }
    return CoreTopology(std::move(enabled_cores), numa_nodes, total, per_node);
}

std::string to_string(ClockType type) {
    switch (type) {
    case ClockType::static_rate:
        return "static";
    case ClockType::per_core:
        return "per-core";
    case ClockType::dynamic_rate:
        return "dynamic";
    }
    throw std::logic_error("unreachable clock type");
}

double PlatformSpec::frequency_hz(int core) const {
    switch (clock.type) {
    case ClockType::static_rate:
        return clock.hz.at(0);
    case ClockType::per_core:
        return clock.hz.at(topology.enabled_position(core));
    case ClockType::dynamic_rate:
        break;
    }
    throw EngineError("dynamic clock frequency is unsupported in simulation");
}

double comm_cost(double bytes, int src_numa, int dst_numa, const DistanceMatrix& distance) {
    double latency_us = distance.latency_ns.at(src_numa, dst_numa) / 1000.0;
    double transfer_us = bytes / (distance.bandwidth_gbps.at(src_numa, dst_numa) * 1000.0);
    return latency_us + transfer_us;
}

double mean_comm_cost(double bytes, const DistanceMatrix& distance) {
    const auto& lat = distance.latency_ns.values;
    const auto& bw = distance.bandwidth_gbps.values;
    double lat_mean = 0.0;
    double bw_mean = 0.0;
    for (size_t i = 0; i < lat.size(); ++i) {
        lat_mean += lat[i];
        bw_mean += bw[i];
    }
    lat_mean /= static_cast<double>(lat.size());
    bw_mean /= static_cast<double>(bw.size());
    return lat_mean / 1000.0 + bytes / (bw_mean * 1000.0);
}

double compute_cost(double flops, int core, const PlatformSpec& platform) {
    double seconds = flops / (platform.flops_per_cycle * platform.frequency_hz(core));
    return seconds * 1e6;
}

namespace {

const json& require_key(const json& object, const std::string& key) {
    auto it = object.find(key);
    if (it == object.end()) {
        throw ParseError("config is missing key '" + key + "'");
    }
    return *it;
}

std::string require_string(const json& object, const std::string& key) {
    const json& value = require_key(object, key);
    if (!value.is_string()) {
        throw ParseError("config key '" + key + "' must be a string");
    }
    return value.get<std::string>();
}

double require_positive_number(const json& object, const std::string& key) {
    const json& value = require_key(object, key);
    if (!value.is_number()) {
        throw ParseError("config key '" + key + "' must be a number");
    }
    double parsed = value.get<double>();
    if (!(parsed > 0.0)) {
        throw ParseError("config key '" + key + "' must be positive");
    }
    return parsed;
}

void reject_unknown_keys(const json& object, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& entry : object.items()) {
        if (!known.contains(entry.key())) {
            throw ParseError("unknown " + where + " key '" + entry.key() + "'");
        }
    }
}

ClockType parse_clock_type(const std::string& text) {
    if (text == "static") {
        return ClockType::static_rate;
    }
    if (text == "per-core") {
        return ClockType::per_core;
    }
    if (text == "dynamic") {
        return ClockType::dynamic_rate;
    }
    throw ParseError("unknown clock_frequency_type '" + text + "'");
}

} // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid config JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw ParseError("config root must be a JSON object");
    }
    reject_unknown_keys(root,
                        {"dag_file", "scheduler_type", "scheduler_params", "mapper_type",
                         "mapper_mem_policy_type", "mapper_mem_bind_numa_node_ids",
                         "core_avail_mask", "flops_per_cycle", "clock_frequency_type",
                         "clock_frequency_hz", "distance_matrices", "out_file_name",
                         "cores_per_numa", "total_cores"},
                        "config");

    RunConfig config;
    config.dag_file = require_string(root, "dag_file");
    config.out_file_name = require_string(root, "out_file_name");

    config.scheduler_type = require_string(root, "scheduler_type");
    if (config.scheduler_type != "fifo" && config.scheduler_type != "min-min" &&
        config.scheduler_type != "heft") {
        throw ParseError("unknown scheduler_type '" + config.scheduler_type + "'");
    }
    config.mapper_type = require_string(root, "mapper_type");
    if (config.mapper_type != "simulation" && config.mapper_type != "bare-metal") {
        throw ParseError("unknown mapper_type '" + config.mapper_type + "'");
    }

    if (auto it = root.find("scheduler_params"); it != root.end()) {
        if (!it->is_array()) {
            throw ParseError("scheduler_params must be an array of \"key=value\" strings");
        }
        for (const json& entry : *it) {
            if (!entry.is_string()) {
                throw ParseError("scheduler_params entries must be strings");
            }
            std::string text = entry.get<std::string>();
            size_t eq = text.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw ParseError("malformed scheduler_params entry '" + text + "'");
            }
            config.scheduler_params.emplace_back(text.substr(0, eq), text.substr(eq + 1));
        }
    }

    if (auto it = root.find("mapper_mem_policy_type"); it != root.end()) {
        if (!it->is_string()) {
            throw ParseError("mapper_mem_policy_type must be a string");
        }
        config.mapper_mem_policy_type = it->get<std::string>();
    }
    if (config.mapper_type == "simulation" && config.mapper_mem_policy_type != "first-touch" &&
        config.mapper_mem_policy_type != "default") {
        throw ParseError("memory policy '" + config.mapper_mem_policy_type +
                         "' is unsupported in simulation");
    }

    if (auto it = root.find("mapper_mem_bind_numa_node_ids"); it != root.end()) {
        if (!it->is_array()) {
            throw ParseError("mapper_mem_bind_numa_node_ids must be an array");
        }
        for (const json& entry : *it) {
            if (!entry.is_number_integer()) {
                throw ParseError("mapper_mem_bind_numa_node_ids entries must be integers");
            }
            config.mapper_mem_bind_numa_node_ids.push_back(entry.get<int>());
        }
    }

    config.core_avail_mask = require_string(root, "core_avail_mask");
    std::vector<int> enabled = parse_core_mask(config.core_avail_mask);

    config.flops_per_cycle = require_positive_number(root, "flops_per_cycle");

    config.clock_frequency_type = parse_clock_type(require_string(root, "clock_frequency_type"));
    if (config.clock_frequency_type == ClockType::dynamic_rate &&
        config.mapper_type == "simulation") {
        throw ParseError("dynamic clock frequency is unsupported with the simulation mapper");
    }
    const json& hz = require_key(root, "clock_frequency_hz");
    if (config.clock_frequency_type == ClockType::per_core) {
        if (!hz.is_array()) {
            throw ParseError("per-core clock_frequency_hz must be an array");
        }
        for (const json& entry : hz) {
            if (!entry.is_number() || !(entry.get<double>() > 0.0)) {
                throw ParseError("clock_frequency_hz entries must be positive numbers");
            }
            config.clock_frequency_hz.push_back(entry.get<double>());
        }
        if (config.clock_frequency_hz.size() != enabled.size()) {
            throw ParseError("clock_frequency_hz lists " +
                             std::to_string(config.clock_frequency_hz.size()) +
                             " values for " + std::to_string(enabled.size()) +
                             " enabled cores");
        }
    } else {
        if (!hz.is_number() || !(hz.get<double>() > 0.0)) {
            throw ParseError("clock_frequency_hz must be a positive number");
        }
        config.clock_frequency_hz.push_back(hz.get<double>());
    }

    const json& matrices = require_key(root, "distance_matrices");
    if (!matrices.is_object()) {
        throw ParseError("distance_matrices must be an object");
    }
    reject_unknown_keys(matrices, {"latency_ns", "bandwidth_gbps"}, "distance_matrices");
    config.latency_file = require_string(matrices, "latency_ns");
    config.bandwidth_file = require_string(matrices, "bandwidth_gbps");

    for (const char* key : {"cores_per_numa", "total_cores"}) {
        if (auto it = root.find(key); it != root.end()) {
            if (!it->is_number_integer() || it->get<int>() < 1) {
                throw ParseError(std::string("config key '") + key +
                                 "' must be a positive integer");
            }
            (std::string(key) == "cores_per_numa" ? config.cores_per_numa
                                                  : config.total_cores) = it->get<int>();
        }
    }
    return config;
}

void resolve_config_paths(RunConfig& config, const std::filesystem::path& base_dir) {
    auto resolve = [&](std::filesystem::path& path) {
        if (path.is_relative()) {
            path = (base_dir / path).lexically_normal();
        }
    };
    resolve(config.dag_file);
    resolve(config.latency_file);
    resolve(config.bandwidth_file);
    resolve(config.out_file_name);
}

PlatformSpec load_platform(const RunConfig& config) {
    SquareMatrix latency = parse_distance_matrix(read_text_file(config.latency_file));
    SquareMatrix bandwidth = parse_distance_matrix(read_text_file(config.bandwidth_file));
    DistanceMatrix distance = make_distance_matrix(std::move(latency), std::move(bandwidth));

    std::vector<int> enabled = parse_core_mask(config.core_avail_mask);
    CoreTopology topology = make_core_topology(std::move(enabled), distance.nodes(),
                                               config.total_cores, config.cores_per_numa);

    if (config.clock_frequency_type == ClockType::dynamic_rate) {
        throw EngineError("dynamic clock frequency is unsupported in simulation");
    }
    PlatformSpec platform;
    platform.distance = std::move(distance);
    platform.topology = std::move(topology);
    platform.flops_per_cycle = config.flops_per_cycle;
    platform.clock = {config.clock_frequency_type, config.clock_frequency_hz};
    return platform;
}

} // namespace wfsim

#include "wfsim/validate.hpp"

#include "wfsim/text_util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

namespace wfsim {

std::string to_string(FindingKind kind) {
    switch (kind) {
    case FindingKind::value_mismatch:
        return "value-mismatch";
    case FindingKind::missing_key:
        return "missing-key";
    case FindingKind::list_length:
        return "list-length";
    case FindingKind::order_violation:
        return "order-violation";
    case FindingKind::offset_violation:
        return "offset-violation";
    case FindingKind::dependency_violation:
        return "dependency-violation";
    }
    return "unknown";
}

std::string format_findings(const ValidationReport& report, const std::string& line_prefix) {
    std::string out;
    for (const Finding& finding : report.findings) {
        out += line_prefix + to_string(finding.kind) + " at " + finding.path;
        if (!finding.detail.empty()) {
            out += ": " + finding.detail;
        }
        out += "\n";
    }
    return out;
}

namespace {

struct Span {
    double start = 0.0;
    double end = 0.0;
};

std::string kind_name(const yamlite::Node& node) {
    switch (node.kind) {
    case yamlite::Node::Kind::null:
        return "null";
    case yamlite::Node::Kind::scalar:
        return "scalar";
    case yamlite::Node::Kind::map:
        return "map";
    case yamlite::Node::Kind::list:
        return "list";
    }
    return "unknown";
}

std::optional<Span> parse_span(const std::string& path, const yamlite::Node& node,
                               ValidationReport& report) {
    if (!node.is_map()) {
        report.findings.push_back({FindingKind::value_mismatch, path,
                                   "expected a span map, found " + kind_name(node)});
        return std::nullopt;
    }
    auto field = [&](const char* key) -> std::optional<double> {
        const yamlite::Node* value = node.find(key);
        if (!value || !value->is_scalar()) {
            report.findings.push_back({FindingKind::missing_key, path + "." + key, ""});
            return std::nullopt;
        }
        auto number = try_parse_number(value->scalar);
        if (!number) {
            report.findings.push_back({FindingKind::value_mismatch, path + "." + key,
                                       "not a number: " + value->scalar});
        }
        return number;
    };
    auto start = field("start");
    auto end = field("end");
    if (!start || !end) {
        return std::nullopt;
    }
    return Span{*start, *end};
}

} // namespace

ValidationReport validate_offsets(const yamlite::Node& doc, double tolerance) {
    ValidationReport report;
    const yamlite::Node* trace = doc.find("trace");
    if (!trace || !trace->is_map()) {
        report.findings.push_back({FindingKind::missing_key, "trace", ""});
        return report;
    }

    static const yamlite::Node empty_map = [] {
        yamlite::Node node;
        node.kind = yamlite::Node::Kind::map;
        return node;
    }();
    auto section = [&](const std::string& name) -> const yamlite::Node* {
        const yamlite::Node* node = trace->find(name);
        if (!node) {
            report.findings.push_back({FindingKind::missing_key, "trace." + name, ""});
            return nullptr;
        }
        if (node->is_null()) {
            return &empty_map;
        }
        if (!node->is_map()) {
            report.findings.push_back({FindingKind::value_mismatch, "trace." + name,
                                       "expected a map, found " + kind_name(*node)});
            return nullptr;
        }
        return node;
    };
    const yamlite::Node* totals = section("exec_name_total_offsets");
    const yamlite::Node* computes = section("exec_name_compute_offsets");
    const yamlite::Node* reads = section("comm_name_read_offsets");
    const yamlite::Node* writes = section("comm_name_write_offsets");
    if (!totals || !computes || !reads || !writes) {
        return report;
    }

    std::map<std::string, Span> total_spans;
    for (const auto& [task, node] : totals->entries) {
        if (auto span = parse_span("trace.exec_name_total_offsets." + task, node, report)) {
            total_spans.emplace(task, *span);
        }
    }
    std::map<std::string, double> compute_durations;
    for (const auto& [task, node] : computes->entries) {
        if (auto span = parse_span("trace.exec_name_compute_offsets." + task, node, report)) {
            compute_durations.emplace(task, span->end - span->start);
        }
    }

    // Longest input transfer per consumer and output transfer per producer.
    std::map<std::string, double> read_longest;
    std::map<std::string, double> write_longest;
    auto collect = [&](const yamlite::Node& comms, const std::string& section_name,
                       bool by_consumer, std::map<std::string, double>& longest) {
        for (const auto& [key, node] : comms.entries) {
            std::string path = "trace." + section_name + "." + key;
            auto span = parse_span(path, node, report);
            size_t arrow = key.find("->");
            if (arrow == std::string::npos) {
                report.findings.push_back(
                    {FindingKind::value_mismatch, path, "malformed item key"});
                continue;
            }
            if (!span) {
                continue;
            }
            std::string task = by_consumer ? key.substr(arrow + 2) : key.substr(0, arrow);
            auto [it, inserted] = longest.try_emplace(task, 0.0);
            it->second = std::max(it->second, span->end - span->start);
        }
    };
    collect(*reads, "comm_name_read_offsets", true, read_longest);
    collect(*writes, "comm_name_write_offsets", false, write_longest);

    for (const auto& [task, node] : totals->entries) {
        auto total = total_spans.find(task);
        if (total == total_spans.end()) {
            continue;
        }
        auto compute = compute_durations.find(task);
        if (compute == compute_durations.end()) {
            report.findings.push_back(
                {FindingKind::missing_key, "trace.exec_name_compute_offsets." + task, ""});
            continue;
        }
        auto longest = [](const std::map<std::string, double>& map, const std::string& key) {
            auto it = map.find(key);
            return it == map.end() ? 0.0 : it->second;
        };
        double expected_end = total->second.start + longest(read_longest, task) +
                              compute->second + longest(write_longest, task);
        if (std::abs(expected_end - total->second.end) > tolerance) {
            report.findings.push_back({FindingKind::offset_violation,
                                       "trace.exec_name_total_offsets." + task,
                                       "phases add up to end " + format_number(expected_end) +
                                           ", found " + format_number(total->second.end)});
        }
    }

    for (const auto& [key, node] : reads->entries) {
        size_t arrow = key.find("->");
        if (arrow == std::string::npos) {
            continue;
        }
        std::string producer = key.substr(0, arrow);
        std::string consumer = key.substr(arrow + 2);
        auto from = total_spans.find(producer);
        auto to = total_spans.find(consumer);
        std::string path = "trace.comm_name_read_offsets." + key;
        if (from == total_spans.end() || to == total_spans.end()) {
            std::string missing = from == total_spans.end() ? producer : consumer;
            report.findings.push_back(
                {FindingKind::missing_key, "trace.exec_name_total_offsets." + missing, ""});
            continue;
        }
        if (to->second.start < from->second.end - tolerance) {
            report.findings.push_back({FindingKind::dependency_violation, path,
                                       "'" + consumer + "' starts at " +
                                           format_number(to->second.start) + " before '" +
                                           producer + "' ends at " +
                                           format_number(from->second.end)});
        }
    }
    return report;
}

namespace {

bool scalar_equal(const std::string& expected, const std::string& actual, double tolerance) {
    if (expected == actual) {
        return true;
    }
    auto e = try_parse_number(expected);
    auto a = try_parse_number(actual);
    return e && a && std::abs(*e - *a) <= tolerance;
}

void compare_node(const yamlite::Node& expected, const yamlite::Node& actual,
                  const std::string& path, double tolerance, ValidationReport& report) {
    switch (expected.kind) {
    case yamlite::Node::Kind::null:
        break;
    case yamlite::Node::Kind::scalar:
        if (!actual.is_scalar()) {
            report.findings.push_back({FindingKind::value_mismatch, path,
                                       "expected a scalar, found " + kind_name(actual)});
        } else if (!scalar_equal(expected.scalar, actual.scalar, tolerance)) {
            report.findings.push_back({FindingKind::value_mismatch, path,
                                       "expected " + expected.scalar + ", found " +
                                           actual.scalar});
        }
        break;
    case yamlite::Node::Kind::map:
        if (!actual.is_map()) {
            if (!(expected.entries.empty() && actual.is_null())) {
                report.findings.push_back({FindingKind::value_mismatch, path,
                                           "expected a map, found " + kind_name(actual)});
            }
            break;
        }
        for (const auto& [key, value] : expected.entries) {
            std::string child_path = path.empty() ? key : path + "." + key;
            const yamlite::Node* child = actual.find(key);
            if (!child) {
                report.findings.push_back({FindingKind::missing_key, child_path, ""});
                continue;
            }
            compare_node(value, *child, child_path, tolerance, report);
        }
        break;
    case yamlite::Node::Kind::list:
        if (!actual.is_list()) {
            if (!(expected.items.empty() && actual.is_null())) {
                report.findings.push_back({FindingKind::value_mismatch, path,
                                           "expected a list, found " + kind_name(actual)});
            }
            break;
        }
        if (expected.items.size() != actual.items.size()) {
            report.findings.push_back({FindingKind::list_length, path,
                                       "expected " + std::to_string(expected.items.size()) +
                                           " items, found " +
                                           std::to_string(actual.items.size())});
            break;
        }
        for (size_t i = 0; i < expected.items.size(); ++i) {
            compare_node(expected.items[i], actual.items[i],
                         path + "[" + std::to_string(i) + "]", tolerance, report);
        }
        break;
    }
}

const yamlite::Node* lookup_path(const yamlite::Node& root, const std::string& path) {
    const yamlite::Node* node = &root;
    size_t begin = 0;
    while (node) {
        size_t dot = path.find('.', begin);
        std::string key =
            dot == std::string::npos ? path.substr(begin) : path.substr(begin, dot - begin);
        node = node->find(key);
        if (dot == std::string::npos) {
            break;
        }
        begin = dot + 1;
    }
    return node;
}

void check_order(const yamlite::Node& expected_root, const yamlite::Node& actual_root,
                 const std::string& path, ValidationReport& report) {
    const yamlite::Node* expected = lookup_path(expected_root, path);
    if (!expected || !expected->is_map()) {
        return;
    }
    const yamlite::Node* actual = lookup_path(actual_root, path);
    if (!actual || !actual->is_map()) {
        return;
    }
    long last_index = -1;
    std::string last_key;
    for (const auto& [key, value] : expected->entries) {
        long index = -1;
        for (size_t i = 0; i < actual->entries.size(); ++i) {
            if (actual->entries[i].first == key) {
                index = static_cast<long>(i);
                break;
            }
        }
        if (index < 0) {
            continue;
        }
        if (index < last_index) {
            report.findings.push_back({FindingKind::order_violation, path,
                                       "'" + last_key + "' should precede '" + key + "'"});
        } else {
            last_index = index;
            last_key = key;
        }
    }
}

} // namespace

ValidationReport compare_expected(const yamlite::Node& expected, const yamlite::Node& actual,
                                  const CompareOptions& options) {
    ValidationReport report;
    compare_node(expected, actual, "", options.tolerance, report);
    for (const std::string& path : options.ordered_paths) {
        check_order(expected, actual, path, report);
    }
    return report;
}

} // namespace wfsim

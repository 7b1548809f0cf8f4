#pragma once

#include "wfsim/yamlite.hpp"

#include <string>
#include <vector>

namespace wfsim {

enum class FindingKind {
    value_mismatch,
    missing_key,
    list_length,
    order_violation,
    offset_violation,
    dependency_violation,
};

std::string to_string(FindingKind kind);

struct Finding {
    FindingKind kind = FindingKind::value_mismatch;
    std::string path;
    std::string detail;
};

struct ValidationReport {
    std::vector<Finding> findings;

    bool ok() const { return findings.empty(); }
};

// One line per finding: "<kind> at <path>: <detail>", each starting with
// line_prefix.
std::string format_findings(const ValidationReport& report, const std::string& line_prefix = "");

// Checks a run trace for internal consistency: each task's total span must
// equal its start plus the slowest read, the compute time and the slowest
// write, and no consumer may start before its producer has finished.
ValidationReport validate_offsets(const yamlite::Node& doc, double tolerance = 1e-6);

struct CompareOptions {
    double tolerance = 1e-6;
    // Maps whose expected keys must appear in the same relative order in the
    // actual document.
    std::vector<std::string> ordered_paths = {"trace.exec_name_total_offsets"};
};

// Checks that everything listed in the expected document appears in the
// actual one. A null expected value only requires the key to exist; scalars
// compare numerically when both sides parse as numbers, textually otherwise;
// lists must match element by element.
ValidationReport compare_expected(const yamlite::Node& expected, const yamlite::Node& actual,
                                  const CompareOptions& options = {});

} // namespace wfsim

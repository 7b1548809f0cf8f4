#pragma once

#include "wfsim/validate.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace wfsim {

// One discovered fixture: a run configuration plus the expected trace and
// log locations derived from the tests root.
struct TestCase {
    std::string group;
    std::string stem;
    std::filesystem::path config_path;
    std::filesystem::path expected_path;
    std::filesystem::path log_path;

    std::string name() const { return group + "/" + stem; }
};

// Scans <tests_root>/config/<group>/*.json; cases come back sorted by name.
std::vector<TestCase> discover_test_cases(const std::filesystem::path& tests_root);

// Simulates one configuration. The trace goes to trace_path when given and
// to the config's out_file_name otherwise; the run log goes to log_path when
// given. Prints the trace location and the makespan. Returns 0.
int cmd_run(const std::filesystem::path& config_path,
            const std::optional<std::filesystem::path>& trace_path,
            const std::optional<std::filesystem::path>& log_path, std::ostream& out);

// Runs every discovered case: simulates, writes the trace and the log,
// checks the trace offsets and compares against the expected document when
// one exists. Config paths resolve against the directory containing
// tests_root, so fixtures can name files as "./<root>/...". Prints one
// [PASS]/[FAIL] line per case and a summary. Returns 0 when every case
// passed, 1 otherwise.
int cmd_test(const std::filesystem::path& tests_root, std::ostream& out);

// Checks one trace file for offset and dependency consistency. Prints the
// findings. Returns 0 when consistent, 1 otherwise.
int cmd_validate_offsets(const std::filesystem::path& trace_path, std::ostream& out);

// Compares a trace against an expected document. Prints the findings.
// Returns 0 on a match, 1 otherwise.
int cmd_validate_output(const std::filesystem::path& expected_path,
                        const std::filesystem::path& actual_path, const CompareOptions& options,
                        std::ostream& out);

} // namespace wfsim

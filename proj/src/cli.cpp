#include "wfsim/cli.hpp"

#include "wfsim/engine.hpp"
#include "wfsim/text_util.hpp"
#include "wfsim/trace.hpp"

#include <algorithm>
#include <stdexcept>

namespace wfsim {

namespace fs = std::filesystem;

std::vector<TestCase> discover_test_cases(const fs::path& tests_root) {
    fs::path config_root = tests_root / "config";
    if (!fs::is_directory(config_root)) {
        throw std::runtime_error("no config directory under " + tests_root.string());
    }
    std::vector<TestCase> cases;
    for (const auto& group_entry : fs::directory_iterator(config_root)) {
        if (!group_entry.is_directory()) {
            continue;
        }
        std::string group = group_entry.path().filename().string();
        for (const auto& entry : fs::directory_iterator(group_entry.path())) {
            if (!entry.is_regular_file() || entry.path().extension() != ".json") {
                continue;
            }
            TestCase test;
            test.group = group;
            test.stem = entry.path().stem().string();
            test.config_path = entry.path();
            test.expected_path = tests_root / "expected" / group / (test.stem + ".yaml");
            test.log_path = tests_root / "log" / group / (test.stem + ".log");
            cases.push_back(std::move(test));
        }
    }
    std::sort(cases.begin(), cases.end(),
              [](const TestCase& a, const TestCase& b) { return a.name() < b.name(); });
    return cases;
}

int cmd_run(const fs::path& config_path, const std::optional<fs::path>& trace_path,
            const std::optional<fs::path>& log_path, std::ostream& out) {
    RunConfig config = parse_run_config(read_text_file(config_path));
    resolve_config_paths(config, config_path.parent_path());
    RunArtifact artifact = run(config);
    fs::path target = trace_path ? *trace_path : config.out_file_name;
    write_text_file(target, emit_trace_yaml(artifact));
    if (log_path) {
        write_text_file(*log_path, render_run_log(artifact, config.scheduler_type));
    }
    out << "trace: " << target.string() << "\n";
    out << "makespan: " << format_number(artifact.makespan) << "\n";
    return 0;
}

int cmd_test(const fs::path& tests_root, std::ostream& out) {
    std::vector<TestCase> cases = discover_test_cases(tests_root);
    if (cases.empty()) {
        throw std::runtime_error("no test cases under " + tests_root.string());
    }
    fs::path root = fs::absolute(tests_root);
    if (root.filename().empty()) {
        root = root.parent_path();
    }
    fs::path base = root.parent_path();

    size_t passed = 0;
    for (const TestCase& test : cases) {
        ValidationReport report;
        std::string error;
        try {
            RunConfig config = parse_run_config(read_text_file(test.config_path));
            resolve_config_paths(config, base);
            RunArtifact artifact = run(config);
            std::string yaml = emit_trace_yaml(artifact);
            write_text_file(config.out_file_name, yaml);
            write_text_file(test.log_path, render_run_log(artifact, config.scheduler_type));
            yamlite::Node actual = yamlite::parse(yaml);
            report = validate_offsets(actual);
            if (fs::exists(test.expected_path)) {
                yamlite::Node expected = yamlite::parse(read_text_file(test.expected_path));
                ValidationReport compared = compare_expected(expected, actual);
                report.findings.insert(report.findings.end(), compared.findings.begin(),
                                       compared.findings.end());
            }
        } catch (const std::exception& e) {
            error = e.what();
        }
        bool ok = error.empty() && report.ok();
        out << (ok ? "[PASS] " : "[FAIL] ") << test.name() << "\n";
        if (!error.empty()) {
            out << "  error: " << error << "\n";
        }
        out << format_findings(report, "  ");
        if (ok) {
            ++passed;
        }
    }
    out << passed << " of " << cases.size() << " cases passed\n";
    return passed == cases.size() ? 0 : 1;
}

int cmd_validate_offsets(const fs::path& trace_path, std::ostream& out) {
    yamlite::Node doc = yamlite::parse(read_text_file(trace_path));
    ValidationReport report = validate_offsets(doc);
    out << format_findings(report);
    if (!report.ok()) {
        out << trace_path.string() << ": " << report.findings.size() << " finding(s)\n";
        return 1;
    }
    out << trace_path.string() << ": offsets consistent\n";
    return 0;
}

int cmd_validate_output(const fs::path& expected_path, const fs::path& actual_path,
                        const CompareOptions& options, std::ostream& out) {
    yamlite::Node expected = yamlite::parse(read_text_file(expected_path));
    yamlite::Node actual = yamlite::parse(read_text_file(actual_path));
    ValidationReport report = compare_expected(expected, actual, options);
    out << format_findings(report);
    if (!report.ok()) {
        out << actual_path.string() << ": " << report.findings.size() << " finding(s)\n";
        return 1;
    }
    out << actual_path.string() << ": matches " << expected_path.string() << "\n";
    return 0;
}

} // namespace wfsim

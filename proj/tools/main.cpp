#include "wfsim/cli.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"NUMA-aware workflow schedule simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string trace_path;
    std::string log_path;
    CLI::App* run = app.add_subcommand("run", "Simulate one run configuration");
    run->add_option("--config", config_path, "Run configuration (JSON)")->required();
    run->add_option("--output", trace_path,
                    "Trace destination; defaults to the config's out_file_name");
    run->add_option("--log", log_path, "Run log destination");

    std::string tests_root;
    CLI::App* test = app.add_subcommand("test", "Run every fixture under a tests directory");
    test->add_option("tests_root", tests_root,
                     "Directory holding config/, system/, workflows/ and expected/")
        ->required();

    std::string offsets_trace;
    CLI::App* offsets =
        app.add_subcommand("validate-offsets", "Check a trace for internal consistency");
    offsets->add_option("trace", offsets_trace, "Trace file")->required();

    std::string expected_path;
    std::string actual_path;
    std::vector<std::string> ordered;
    CLI::App* output =
        app.add_subcommand("validate-output", "Compare a trace against an expected document");
    output->add_option("expected", expected_path, "Expected document")->required();
    output->add_option("actual", actual_path, "Trace file")->required();
    output->add_option("--ordered", ordered,
                       "Map path whose expected key order must hold (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) {
            std::optional<std::filesystem::path> trace;
            std::optional<std::filesystem::path> log;
            if (!trace_path.empty()) {
                trace = trace_path;
            }
            if (!log_path.empty()) {
                log = log_path;
            }
            return wfsim::cmd_run(config_path, trace, log, std::cout);
        }
        if (test->parsed()) {
            return wfsim::cmd_test(tests_root, std::cout);
        }
        if (offsets->parsed()) {
            return wfsim::cmd_validate_offsets(offsets_trace, std::cout);
        }
        wfsim::CompareOptions options;
        if (!ordered.empty()) {
            options.ordered_paths = ordered;
        }
        return wfsim::cmd_validate_output(expected_path, actual_path, options, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

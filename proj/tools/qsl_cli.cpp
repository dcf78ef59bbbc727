// qsl: run scenario configs, parameter sweeps and the built-in acceptance suite.
//
//   qsl run <config> [--output PATH] [--seed N] [--timing]
//   qsl sweep <config> [--output PATH] [--seed N] [--timing]
//   qsl check [--output PATH] [--seed N]
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure,
// 3 invariant violation.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qsl/acceptance.hpp"
#include "qsl/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) qsl::fail(qsl::ErrorKind::ValidationError, "cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& content, const std::optional<std::string>& path) {
    if (path) {
        qsl::write_atomic(*path, content);
        std::cerr << "qsl: wrote " << *path << "\n";
    } else {
        std::cout << content;
    }
}

int run_config(const std::string& config_path, bool as_sweep, const std::optional<std::string>& output,
               std::optional<std::uint64_t> seed, bool timing) {
    const auto cfg = qsl::runner::parse_config(read_file(config_path));
    qsl::runner::RunOptions opt;
    opt.include_timing = timing;
    opt.seed_override = seed;
    const auto outcome = as_sweep ? qsl::runner::sweep(cfg, opt) : qsl::runner::run(cfg, opt);
    emit(qsl::dump_report(outcome.report), output ? output : cfg.output_path);
    if (outcome.curve_csv && cfg.curve_path) {
        qsl::write_atomic(*cfg.curve_path, *outcome.curve_csv);
        std::cerr << "qsl: wrote " << *cfg.curve_path << "\n";
    }
    if (outcome.violation) std::cerr << "qsl: invariant violation recorded in report\n";
    return outcome.exit_code();
}

int run_check(const std::optional<std::string>& output, std::uint64_t seed) {
    bool all = true;
    const auto results = qsl::acceptance::run_suite(seed, [&](const qsl::acceptance::CriterionResult& r) {
        all = all && r.ok();
        std::printf("%s criterion %d: %s (%.3f s%s)\n", r.ok() ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds,
                    r.within_time ? "" : ", over time limit");
        std::fflush(stdout);
    });
    const std::string report = qsl::dump_report(qsl::acceptance::results_json(results, seed));
    if (output) {
        qsl::write_atomic(*output, report);
        std::cerr << "qsl: wrote " << *output << "\n";
    }
    return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum speed-limit toolkit"};
    app.require_subcommand(1);

    std::string config;
    std::optional<std::string> output;
    std::optional<std::uint64_t> seed;
    bool timing = false;

    auto* run = app.add_subcommand("run", "Run a scenario config");
    run->add_option("config", config, "Scenario config (JSON)")->required();
    run->add_option("-o,--output", output, "Report path (overrides output_path)");
    run->add_option("-s,--seed", seed, "Random seed (overrides the config)");
    run->add_flag("--timing", timing, "Include elapsed wall time in the report");

    auto* sweep = app.add_subcommand("sweep", "Run a config over its parameter grid");
    sweep->add_option("config", config, "Scenario config with a grid (JSON)")->required();
    sweep->add_option("-o,--output", output, "Report path (overrides output_path)");
    sweep->add_option("-s,--seed", seed, "Random seed (overrides the config)");
    sweep->add_flag("--timing", timing, "Include elapsed wall time in the report");

    std::uint64_t check_seed = 0;
    auto* check = app.add_subcommand("check", "Run the built-in acceptance suite");
    check->add_option("-o,--output", output, "Report path");
    check->add_option("-s,--seed", check_seed, "Random seed (default 0)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*run) return run_config(config, false, output, seed, timing);
        if (*sweep) return run_config(config, true, output, seed, timing);
        return run_check(output, check_seed);
    } catch (const qsl::Error& e) {
        std::cerr << "qsl: " << qsl::to_string(e.kind()) << ": " << e.what() << "\n";
        return qsl::runner::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "qsl: internal error: " << e.what() << "\n";
        return 2;
    }
}

// cyclores: run the builtin experiments or a scenario file, list builtins, check invariants.
#include <filesystem>
#include <iostream>
#include <set>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "cyclores/errors.hpp"
#include "cyclores/harness.hpp"

using namespace cyclores;

namespace {

ScenarioConfig resolve(const std::string& target) {
    if (std::filesystem::is_regular_file(target)) return load_config(target);
    return builtin_scenario(target);
}

void print_invariants(const std::vector<InvariantResult>& results, bool failures_only) {
    for (const auto& r : results) {
        if (failures_only && r.passed) continue;
        fmt::print("  [{}] {:<40} {:.3e} (limit {:.1e})\n", r.passed ? "ok" : "FAIL", r.name, r.value, r.limit);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasienergy spectra and spectral evolution near cyclotron resonance"};
    app.require_subcommand(1);

    int threads = 0;
    bool serial = false;
    app.add_option("-j,--threads", threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
    app.add_flag("--serial", serial, "use the single-threaded reference kernels");

    auto* list = app.add_subcommand("list", "list builtin scenarios");

    std::string run_target;
    std::string out_dir;
    std::string root;
    std::size_t samples = 0;
    std::size_t scan_points = 0;
    bool verbose = false;
    auto* run = app.add_subcommand("run", "run a builtin scenario or a config file");
    run->add_option("target", run_target, "builtin name (see list) or path to a config file")->required();
    run->add_option("-o,--out", out_dir, "output directory (default <root>/<scenario>)");
    run->add_option("--root", root, "output root (default $CYCLORES_OUTPUT_ROOT or ./runs)");
    run->add_option("-s,--samples", samples, "time samples for series and averages")->check(CLI::Range(2, 1000000));
    run->add_option("--scan-points", scan_points, "grid points of a 1/h scan")->check(CLI::Range(1, 1000000));
    run->add_flag("-v,--verbose", verbose, "print every invariant, not only failures");

    std::string show_target;
    auto* show = app.add_subcommand("show", "print a scenario as a config file");
    show->add_option("target", show_target, "builtin name or config path")->required();

    std::vector<std::string> check_targets;
    auto* check = app.add_subcommand("check", "run the invariant suite only (no output files)");
    check->add_option("targets", check_targets, "builtin names or config paths (default: all builtins)");

    CLI11_PARSE(app, argc, argv);
    set_thread_count(threads);
    const Execution exec = serial ? Execution::serial : Execution::parallel;

    try {
        if (*list) {
            for (const auto& s : list_scenarios()) fmt::print("{:<8} {}\n", s.name, s.description);
            return 0;
        }
        if (*show) {
            std::cout << format_config(resolve(show_target));
            return 0;
        }
        if (*run) {
            const auto config = resolve(run_target);
            RunOptions opts;
            opts.output_root = root.empty() ? default_output_root() : std::filesystem::path(root);
            if (!out_dir.empty()) opts.output_dir = out_dir;
            if (samples) opts.samples = samples;
            if (scan_points) opts.scan_points = scan_points;
            opts.exec = exec;
            const auto report = run_scenario(config, opts);
            fmt::print("{}: wrote {} files to {}\n", report.scenario, report.files.size(), report.output_dir.string());
            for (const auto& w : report.warnings) fmt::print("  warning: {}\n", w);
            print_invariants(report.invariants, !verbose);
            fmt::print("{}\n", report.passed() ? "invariants: all passed" : "invariants: FAILED");
            return report.passed() ? 0 : 1;
        }
        if (*check) {
            std::vector<ScenarioConfig> configs;
            if (check_targets.empty()) {
                for (const auto& s : list_scenarios())
                    if (s.name != "custom") configs.push_back(builtin_scenario(s.name));
            } else {
                for (const auto& t : check_targets) configs.push_back(resolve(t));
            }
            bool ok = true;
            std::set<std::string> seen;
            for (const auto& c : configs) {
                const auto key = fmt::format("h={} v0={} delta={} N={}", c.params.h, c.params.v0, c.params.delta,
                                             c.params.levels);
                if (!seen.insert(key).second) continue;
                const auto results = invariant_suite(c.params, exec);
                fmt::print("{} ({})\n", c.name, key);
                print_invariants(results, false);
                for (const auto& r : results) ok &= r.passed;
            }
            fmt::print("{}\n", ok ? "invariants: all passed" : "invariants: FAILED");
            return ok ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 3;
    }
    return 0;
}

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cyclores/kernels.hpp"
#include "cyclores/model.hpp"

namespace cyclores {

/// Initial state of a run. Cells are numbered from 1 as in all outputs.
struct InitialState {
    enum class Kind { level, cell_center, eigenstate, amplitudes };
    Kind kind = Kind::cell_center;
    std::size_t index = 1;            ///< level n', cell number, or eigenstate q
    std::vector<double> amplitudes;   ///< Kind::amplitudes only; normalized on use
};

enum class Observable { snapshot, cells, time_average, penetration, scan, spread_boundary, husimi, spectrum };

struct Schedule {
    std::vector<double> snapshot_times;     ///< periods
    double series_t_min = 1e2;
    double series_t_max = 1e6;
    std::size_t series_samples = 200;
    double average_t_min = 1e3;
    double average_t_max = 1e6;
    std::size_t average_samples = 200;
    std::vector<double> average_h;          ///< time averages per h; empty uses params.h
    double evaluation_time = 4e4;           ///< penetration time
};

struct ScanSettings {
    double inv_h_min = 1.6;
    double inv_h_max = 1.7;
    std::size_t points = 400;
    std::size_t start_cell = 2;    ///< initial delta state at this cell's center
    std::size_t barrier_cell = 3;  ///< penetration into this cell and beyond
};

struct HusimiSettings {
    std::vector<std::string> states = {"bottom", "top"};  ///< bottom, top, initial, or eigenstate index
    std::size_t resolution = 256;
    bool default_levels = true;
    std::vector<double> levels;    ///< used when default_levels is false; may be empty
};

struct ScenarioConfig {
    std::string name = "custom";
    std::string description;
    ModelParams params;
    InitialState initial;
    Schedule schedule;
    std::vector<Observable> observables;
    ScanSettings scan;
    HusimiSettings husimi;
    std::filesystem::path output_dir;  ///< empty: <output root>/<name>

    bool wants(Observable o) const;
    /// Throws ConfigError naming the offending field.
    void validate() const;
};

std::string to_string(Observable o);

/// INI-style text: [section] headers and key = value lines; ';' and '#' start comments.
/// Throws ConfigError with a `section.key` path on any malformed or unknown entry.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::filesystem::path& path);
/// The same format, suitable for parse_config.
std::string format_config(const ScenarioConfig& config);

struct ScenarioInfo {
    std::string name;
    std::string description;
};

/// fig1..fig6 then custom, in that order.
std::vector<ScenarioInfo> list_scenarios();
/// Throws ConfigError("scenario", ...) for unknown names.
ScenarioConfig builtin_scenario(const std::string& name);

struct InvariantResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double limit = 0.0;
    std::string detail;
};

/// Module invariants for one parameter set: coupling, cells, spectrum, propagator, Husimi.
std::vector<InvariantResult> invariant_suite(const ModelParams& params,
                                             Execution exec = Execution::parallel);

struct RunOptions {
    std::filesystem::path output_root = "runs";
    std::optional<std::filesystem::path> output_dir;  ///< overrides config and root
    std::optional<std::size_t> samples;               ///< series and average samples
    std::optional<std::size_t> scan_points;
    Execution exec = Execution::parallel;
};

struct RunReport {
    std::string scenario;
    std::filesystem::path output_dir;
    std::vector<std::string> files;
    std::vector<InvariantResult> invariants;
    std::vector<std::string> warnings;

    bool passed() const;
};

/// build -> solve -> evolve -> observables; writes CSVs and manifest.json into the output dir.
RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// $CYCLORES_OUTPUT_ROOT, or "runs" when unset.
std::filesystem::path default_output_root();

}  // namespace cyclores

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>

#include <boost/version.hpp>
#include <fmt/core.h>

#include "json.hpp"

#include "cyclores/csv.hpp"
#include "cyclores/errors.hpp"
#include "cyclores/evolution.hpp"
#include "cyclores/harness.hpp"
#include "cyclores/phase_space.hpp"
#include "cyclores/special_functions.hpp"
#include "cyclores/spectrum.hpp"

#ifndef CYCLORES_VERSION
#define CYCLORES_VERSION "0.0.0"
#endif

namespace cyclores {
namespace {

using json = nlohmann::json;

InvariantResult below(std::string name, double value, double limit, std::string detail = {}) {
    return {std::move(name), value <= limit, value, limit, std::move(detail)};
}

Matrix<complex> multiply(const Matrix<complex>& a, const Matrix<complex>& b) {
    Matrix<complex> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const complex aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

double max_abs_diff(const Matrix<complex>& a, const Matrix<complex>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
    return d;
}

std::vector<InvariantResult> coupling_invariants(const CouplingChain& chain) {
    const auto& p = chain.params;
    std::vector<InvariantResult> out;
    if (p.levels > p.n_switch + 1) {
        double worst = 0.0;
        for (std::size_t n = p.n_switch; n + 1 < p.levels; ++n)
            worst = std::max(worst, branch_mismatch(n, p.h, p.v0));
        out.push_back(below("coupling.branch_agreement", worst, kBranchTolerance,
                            "max |exact - Bessel limit| / envelope over the tail"));
    }

    ModelParams doubled = p;
    doubled.v0 = 2.0 * p.v0;
    const auto twice = build_chain(doubled);
    double scale = 0.0;
    for (std::size_t n = 0; n < chain.off_diagonal.size(); ++n)
        scale = std::max(scale, std::abs(twice.off_diagonal[n] - 2.0 * chain.off_diagonal[n]));
    out.push_back(below("coupling.scale_covariance", scale, 0.0, "f(2 v0) - 2 f(v0)"));
    return out;
}

std::vector<InvariantResult> cell_invariants(const CouplingChain& chain, const CellPartition& cells) {
    const double h = chain.params.h;
    double worst = 0.0;
    for (std::size_t b : cells.boundaries) {
        const double x = std::sqrt(2.0 * static_cast<double>(b) * h);
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k <= cells.count() + 2; ++k)
            nearest = std::min(nearest, std::abs(x - bessel_j1_zero(k)));
        worst = std::max(worst, nearest / std::sqrt(2.0 * h));
    }
    return {below("cells.boundary_law", worst, 1.0, "max_b min_k |sqrt(2 b h) - b_k| / sqrt(2h)")};
}

std::vector<InvariantResult> spectrum_invariants(const QeSpectrum& spectrum, Execution exec) {
    std::vector<InvariantResult> out;
    const auto d = diagnose(spectrum);
    out.push_back(below("spectrum.orthonormality", d.orthonormality, 1e-10));
    out.push_back(below("spectrum.completeness", d.completeness, 1e-10));
    out.push_back(below("spectrum.residual", d.residual, 1e-9 * std::max(d.residual_scale, 1e-300)));
    out.push_back(below("spectrum.trace", d.trace, 1e-8));

    const auto& p = spectrum.chain().params;
    if (p.delta == 0.0) {
        const auto parity = check_parity_symmetry(spectrum, 1e-8);
        out.push_back(below("spectrum.parity", parity.max_defect(), 1e-8));

        const double fmax = spectrum.chain().max_coupling();
        double worst = 0.0;
        for (double n0 : resonance_centers(p)) worst = std::max(worst, std::abs(coupling_first_derivative(n0, p)));
        out.push_back(below("model.extrema_stationary", worst, 1e-8 * fmax, "max |f'(n0)| at delta = 0"));
    }

    const double t = 1e3;
    const auto g = propagator(spectrum, t, exec);
    out.push_back(below("evolution.unitarity", g.unitarity_defect(), 1e-10, "t = 1e3"));
    const auto g0 = propagator(spectrum, 0.0, exec);
    out.push_back(below("evolution.identity_at_zero", max_abs_diff(g0.matrix, Matrix<complex>::identity(spectrum.size())), 1e-12));
    const auto g1 = propagator(spectrum, 137.5, exec);
    const auto g2 = propagator(spectrum, 4096.0, exec);
    const auto g12 = propagator(spectrum, 137.5 + 4096.0, exec);
    out.push_back(below("evolution.group_property", max_abs_diff(multiply(g1.matrix, g2.matrix), g12.matrix), 1e-9,
                        "G(137.5) G(4096) vs G(4233.5)"));

    const std::size_t q = spectrum.size() - 1;
    const auto eig = StateVector::eigenstate(spectrum, q);
    double stationarity = 0.0;
    for (double ts : {1.0, 1e3, 1e6}) {
        const auto probs = evolve(eig, spectrum, ts, exec).probabilities();
        const auto ref = eig.probabilities();
        for (std::size_t n = 0; n < probs.size(); ++n) stationarity = std::max(stationarity, std::abs(probs[n] - ref[n]));
    }
    out.push_back(below("evolution.stationarity", stationarity, 1e-10, "top eigenstate, t in {1, 1e3, 1e6}"));
    return out;
}

InvariantResult norm_invariant(const std::string& name, const StateVector& state) {
    return below(name, std::abs(state.norm_squared() - 1.0), kNormTolerance);
}

std::string tag(double x) { return fmt::format("{:g}", x); }

std::size_t resolve_cell_center(const ScenarioConfig& c, const CellPartition& cells) {
    if (c.initial.index > cells.count()) {
        throw ConfigError("initial.index", fmt::format("cell {} does not exist; h = {} gives {} cells", c.initial.index,
                                                       c.params.h, cells.count()));
    }
    return cells.cells[c.initial.index - 1].center();
}

StateVector initial_state(const ScenarioConfig& c, const QeSpectrum& spectrum,
                          const std::optional<CellPartition>& cells) {
    const auto& init = c.initial;
    switch (init.kind) {
        case InitialState::Kind::level: return StateVector::basis(c.params.levels, init.index);
        case InitialState::Kind::eigenstate: return StateVector::eigenstate(spectrum, init.index);
        case InitialState::Kind::amplitudes: return StateVector::normalized(init.amplitudes);
        case InitialState::Kind::cell_center:
            if (!cells) throw ConfigError("initial.kind", "cell_center needs a nonzero coupling (v0 > 0)");
            return StateVector::basis(c.params.levels, resolve_cell_center(c, *cells));
    }
    throw ConfigError("initial.kind", "unhandled kind");
}

json invariant_json(const InvariantResult& r) {
    json j{{"name", r.name}, {"passed", r.passed}, {"value", r.value}, {"limit", r.limit}};
    if (!r.detail.empty()) j["detail"] = r.detail;
    return j;
}

json versions() {
    return json{
        {"cyclores", CYCLORES_VERSION},
        {"compiler", __VERSION__},
        {"fmt", FMT_VERSION},
        {"boost", BOOST_LIB_VERSION},
#ifdef _OPENMP
        {"openmp", _OPENMP},
#endif
        {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                      NLOHMANN_JSON_VERSION_PATCH)},
    };
}

json params_json(const ModelParams& p) {
    return json{{"h", p.h}, {"v0", p.v0}, {"delta", p.delta}, {"levels", p.levels}, {"n_switch", p.n_switch}};
}

// log P_{i+1} - log P_i for each boundary, and the least-squares slope of log P_i over i.
json profile_summary(const std::vector<double>& avg) {
    json slopes = json::array();
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < avg.size(); ++i) {
        if (avg[i] > 0.0) {
            xs.push_back(static_cast<double>(i + 1));
            ys.push_back(std::log(avg[i]));
        }
        if (i + 1 < avg.size() && avg[i] > 0.0 && avg[i + 1] > 0.0) slopes.push_back(std::log(avg[i + 1] / avg[i]));
    }
    double fit = 0.0;
    if (xs.size() >= 2) {
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        fit = sxy / sxx;
    }
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < std::min<std::size_t>(avg.size(), 5); ++i) decreasing &= avg[i + 1] < avg[i];
    return json{{"mean_probability", avg},
                {"boundary_log_slopes", slopes},
                {"fit_log_slope", fit},
                {"ratio_2_over_1", avg.size() > 1 && avg[0] > 0.0 ? avg[1] / avg[0] : 0.0},
                {"decreasing_cells_1_to_5", decreasing}};
}

class OutputDir {
public:
    OutputDir(std::filesystem::path dir, RunReport& report) : dir_(std::move(dir)), report_(report) {
        std::filesystem::create_directories(dir_);
    }

    template <class Writer>
    void write(const std::string& name, Writer&& writer) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", (dir_ / name).string()));
        writer(out);
        report_.files.push_back(name);
    }

private:
    std::filesystem::path dir_;
    RunReport& report_;
};

}  // namespace

bool RunReport::passed() const {
    return std::all_of(invariants.begin(), invariants.end(), [](const auto& r) { return r.passed; });
}

std::filesystem::path default_output_root() {
    if (const char* env = std::getenv("CYCLORES_OUTPUT_ROOT"); env && *env) return env;
    return "runs";
}

std::vector<InvariantResult> invariant_suite(const ModelParams& params, Execution exec) {
    const auto chain = build_chain(params);
    auto out = coupling_invariants(chain);
    if (params.v0 > 0.0) {
        const auto cells = cell_partition(chain);
        const auto more = cell_invariants(chain, cells);
        out.insert(out.end(), more.begin(), more.end());
    }
    const auto spectrum = solve(chain);
    const auto more = spectrum_invariants(spectrum, exec);
    out.insert(out.end(), more.begin(), more.end());

    const auto top = StateVector::eigenstate(spectrum, spectrum.size() - 1);
    const auto grid = husimi(top, GridSpec::covering(params.levels, 128), exec);
    out.push_back(below("phase_space.normalization", std::abs(grid.mass - 1.0), 0.02, "top eigenstate, 128x128 grid"));
    const double qmin = *std::min_element(grid.values.begin(), grid.values.end());
    out.push_back({"phase_space.nonnegative", qmin >= 0.0, qmin, 0.0, "min Q"});
    return out;
}

RunReport run_scenario(const ScenarioConfig& input, const RunOptions& options) {
    ScenarioConfig c = input;
    if (options.samples) {
        c.schedule.series_samples = *options.samples;
        c.schedule.average_samples = *options.samples;
    }
    if (options.scan_points) c.scan.points = *options.scan_points;
    c.validate();

    RunReport report;
    report.scenario = c.name;
    report.output_dir = options.output_dir   ? *options.output_dir
                        : !c.output_dir.empty() ? c.output_dir
                                                : options.output_root / c.name;
    OutputDir out(report.output_dir, report);
    const Execution exec = options.exec;
    json results;

    const auto chain = build_chain(c.params);
    std::optional<CellPartition> cells;
    if (c.params.v0 > 0.0) cells = cell_partition(chain);
    const auto spectrum = solve(chain);

    auto add = [&](std::vector<InvariantResult> more) {
        report.invariants.insert(report.invariants.end(), more.begin(), more.end());
    };
    add(coupling_invariants(chain));
    if (cells) {
        add(cell_invariants(chain, *cells));
        std::vector<std::size_t> bounds = cells->boundaries;
        results["cells"] = json{{"count", cells->count()}, {"boundaries", bounds}};
    }
    add(spectrum_invariants(spectrum, exec));

    const auto needs_cells = [&](const char* what) {
        if (!cells) throw ConfigError("observables.list", fmt::format("{} needs a nonzero coupling (v0 > 0)", what));
    };

    const StateVector start = initial_state(c, spectrum, cells);
    {
        const auto probs = start.probabilities();
        results["initial_state"] = json{
            {"peak_level", std::distance(probs.begin(), std::max_element(probs.begin(), probs.end()))}};
    }

    if (c.wants(Observable::spectrum)) {
        out.write("spectrum.csv", [&](std::ostream& o) { csv::write_spectrum(o, spectrum); });
        out.write("eigenvectors.csv", [&](std::ostream& o) { csv::write_eigenvectors(o, spectrum); });
        if (cells) {
            const auto profile = localization_profile(spectrum, *cells);
            const auto& top = profile.back();
            const auto& bottom = profile.front();
            results["spectrum"] = json{
                {"min", spectrum.eigenvalues().front()},
                {"max", spectrum.eigenvalues().back()},
                {"bottom_max_cell_weight", *std::max_element(bottom.cell_weights.begin(), bottom.cell_weights.end())},
                {"top_max_cell_weight", *std::max_element(top.cell_weights.begin(), top.cell_weights.end())},
            };
        }
    }

    if (c.wants(Observable::snapshot) || c.wants(Observable::spread_boundary)) {
        json snaps = json::array();
        for (std::size_t i = 0; i < c.schedule.snapshot_times.size(); ++i) {
            const double t = c.schedule.snapshot_times[i];
            const auto state = evolve(start, spectrum, t, exec);
            report.invariants.push_back(norm_invariant(fmt::format("evolution.norm[t={}]", tag(t)), state));
            json entry{{"t", t}};
            if (c.wants(Observable::snapshot)) {
                const std::string file = fmt::format("snapshot_t{}.csv", tag(t));
                out.write(file, [&](std::ostream& o) { csv::write_snapshot(o, state); });
                entry["file"] = file;
                if (cells) entry["cell_probabilities"] = cell_probabilities(state, *cells);
            }
            if (c.wants(Observable::spread_boundary)) {
                const std::size_t boundary = spread_boundary(state);
                entry["spread_boundary"] = boundary;
                const std::size_t cut = std::min<std::size_t>(66, c.params.levels - 2);
                entry["probability_above_66"] = penetration_coefficient(state, cut);
                if (c.params.delta != 0.0) entry["v0_over_delta"] = c.params.v0 / std::abs(c.params.delta);
            }
            snaps.push_back(entry);
        }
        results["snapshots"] = snaps;
        if (c.wants(Observable::spread_boundary) && c.params.delta != 0.0) {
            ModelParams resonant = c.params;
            resonant.delta = 0.0;
            const auto ref = cell_partition(build_chain(resonant));
            std::vector<std::size_t> bounds = ref.boundaries;
            results["resonant_cell_boundaries"] = bounds;
            results["resonance_centers"] = resonance_centers(c.params);
        }
    }

    if (c.wants(Observable::cells)) {
        needs_cells("cells");
        const auto times = log_spaced_times(c.schedule.series_t_min, c.schedule.series_t_max, c.schedule.series_samples);
        const auto rows = cell_probability_series(start, spectrum, *cells, times, exec);
        out.write("series.csv", [&](std::ostream& o) { csv::write_series(o, times, rows); });
        double min_p1 = 1.0;
        double worst_sum = 0.0;
        for (const auto& row : rows) {
            min_p1 = std::min(min_p1, row[0]);
            worst_sum = std::max(worst_sum, std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0));
        }
        report.invariants.push_back(below("evolution.cell_sum", worst_sum, 1e-10, "|sum_i P_i - 1| over the series"));
        double min_gap = std::numeric_limits<double>::infinity();
        const auto& e = spectrum.eigenvalues();
        for (std::size_t q = 1; q < e.size(); ++q) min_gap = std::min(min_gap, e[q] - e[q - 1]);
        results["series"] = json{{"samples", times.size()}, {"min_first_cell_probability", min_p1},
                                 {"min_qe_gap", min_gap}, {"min_gap_period", 1.0 / min_gap}};
    }

    if (c.wants(Observable::time_average)) {
        const std::vector<double> hs = c.schedule.average_h.empty() ? std::vector<double>{c.params.h} : c.schedule.average_h;
        json profiles = json::array();
        for (double h : hs) {
            ModelParams p = c.params;
            p.h = h;
            const auto ch = build_chain(p);
            if (p.v0 == 0.0) needs_cells("time_average");
            const auto part = cell_partition(ch);
            const auto sp = h == c.params.h ? spectrum : solve(ch);
            ScenarioConfig local = c;
            local.params = p;
            const auto s0 = initial_state(local, sp, part);
            const auto avg = time_averaged_cells(s0, sp, part, c.schedule.average_t_min, c.schedule.average_t_max,
                                                 c.schedule.average_samples, exec);
            const std::string file = hs.size() == 1 ? "profile.csv" : fmt::format("profile_h{}.csv", tag(h));
            out.write(file, [&](std::ostream& o) { csv::write_profile(o, avg); });
            json entry = profile_summary(avg);
            entry["h"] = h;
            entry["file"] = file;
            profiles.push_back(entry);
        }
        results["time_average"] = profiles;
    }

    if (c.wants(Observable::penetration)) {
        needs_cells("penetration");
        if (c.scan.barrier_cell > cells->count()) {
            throw ConfigError("scan.barrier_cell", fmt::format("h = {} gives only {} cells", c.params.h, cells->count()));
        }
        const std::size_t n0 = barrier_level(chain, *cells, c.scan.barrier_cell - 1);
        const auto state = evolve(start, spectrum, c.schedule.evaluation_time, exec);
        report.invariants.push_back(norm_invariant("evolution.norm[penetration]", state));
        results["penetration"] = json{{"t", c.schedule.evaluation_time},
                                      {"barrier_level", n0},
                                      {"value", penetration_coefficient(state, n0)}};
    }

    if (c.wants(Observable::scan)) {
        std::vector<double> grid(c.scan.points);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            grid[i] = grid.size() == 1 ? c.scan.inv_h_min
                                       : c.scan.inv_h_min + (c.scan.inv_h_max - c.scan.inv_h_min) * static_cast<double>(i) /
                                                                static_cast<double>(grid.size() - 1);
        }
        ScanOptions so;
        so.time = c.schedule.evaluation_time;
        so.start_cell = c.scan.start_cell - 1;
        so.barrier_cell = c.scan.barrier_cell - 1;
        const auto scan = scan_penetration(c.params, grid, so, exec);
        report.warnings.insert(report.warnings.end(), scan.warnings.begin(), scan.warnings.end());
        out.write("scan.csv", [&](std::ostream& o) { csv::write_scan(o, scan.points); });
        const auto dips = locate_dips(scan.points, 0.1, 0.01);
        const double b2 = bessel_j1_zero(2);
        results["scan"] = json{{"points", scan.points.size()},
                               {"skipped", scan.warnings.size()},
                               {"dip_positions", dips.positions},
                               {"dip_depths", dips.depths},
                               {"mean_dip_spacing", dips.mean_spacing()},
                               {"expected_spacing", 2.0 / (b2 * b2)}};
    }

    if (c.wants(Observable::husimi)) {
        const auto spec_grid = GridSpec::covering(c.params.levels, c.husimi.resolution);
        json entries = json::array();
        for (const auto& token : c.husimi.states) {
            const StateVector state = token == "bottom"    ? StateVector::eigenstate(spectrum, 0)
                                      : token == "top"     ? StateVector::eigenstate(spectrum, spectrum.size() - 1)
                                      : token == "initial" ? start
                                                           : StateVector::eigenstate(spectrum, std::stoul(token));
            const auto q = husimi(state, spec_grid, exec);
            if (q.warning) report.warnings.push_back(*q.warning);
            report.invariants.push_back(
                below(fmt::format("phase_space.normalization[{}]", token), std::abs(q.mass - 1.0), 0.02));

            std::vector<double> requested = c.husimi.default_levels ? default_contour_levels(q) : c.husimi.levels;
            const auto contours = husimi_contour_export(q, requested);
            report.warnings.insert(report.warnings.end(), contours.warnings.begin(), contours.warnings.end());

            csv::Metadata meta = {
                {"state", token},
                {"h", csv::number(c.params.h)},
                {"v0", csv::number(c.params.v0)},
                {"delta", csv::number(c.params.delta)},
                {"levels", std::to_string(c.params.levels)},
                {"grid", fmt::format("{}x{}", spec_grid.nx, spec_grid.np)},
                {"mass", csv::number(q.mass)},
                {"normalization_defect", csv::number(q.mass - 1.0)},
            };
            const std::string file = fmt::format("husimi_{}.csv", token);
            out.write(file, [&](std::ostream& o) { csv::write_husimi(o, q, meta); });
            const std::string levels_file = fmt::format("husimi_{}_levels.csv", token);
            out.write(levels_file, [&](std::ostream& o) { csv::write_contour_levels(o, contours.levels); });

            json closed = json::array();
            for (double level : contours.levels) closed.push_back(contour_closed(q, level));
            entries.push_back(json{{"state", token}, {"file", file}, {"mass", q.mass}, {"max", q.max()},
                                   {"levels", contours.levels}, {"closed", closed}});
        }
        results["husimi"] = entries;
    }

    json manifest;
    manifest["scenario"] = c.name;
    manifest["description"] = c.description;
    manifest["params"] = params_json(c.params);
    manifest["config"] = format_config(c);
    manifest["versions"] = versions();
    manifest["files"] = report.files;
    manifest["results"] = results;
    manifest["invariants"] = json::array();
    for (const auto& r : report.invariants) manifest["invariants"].push_back(invariant_json(r));
    manifest["warnings"] = report.warnings;
    manifest["passed"] = report.passed();
    out.write("manifest.json", [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
    return report;
}

}  // namespace cyclores

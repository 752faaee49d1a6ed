#include "cyclores/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>

#include <fmt/core.h>

#include "cyclores/errors.hpp"

namespace cyclores {

StateVector::StateVector(std::vector<complex> amplitudes, double time)
    : amplitudes_(std::move(amplitudes)), time_(time) {
    if (amplitudes_.empty()) throw PreconditionError("StateVector: empty amplitude list");
    const double defect = std::abs(norm_squared() - 1.0);
    if (!(defect < kNormTolerance)) {
        throw PreconditionError(fmt::format("StateVector: norm defect {:.3e}", defect));
    }
}

StateVector StateVector::basis(std::size_t levels, std::size_t level) {
    if (level >= levels) throw IndexError(fmt::format("basis: level {} >= {}", level, levels));
    std::vector<complex> amps(levels);
    amps[level] = 1.0;
    return StateVector(std::move(amps));
}

StateVector StateVector::normalized(std::span<const complex> amplitudes) {
    double norm = 0.0;
    for (const auto& c : amplitudes) norm += std::norm(c);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw PreconditionError("StateVector::normalized: zero or non-finite amplitudes");
    }
    const double scale = 1.0 / std::sqrt(norm);
    std::vector<complex> amps(amplitudes.begin(), amplitudes.end());
    for (auto& c : amps) c *= scale;
    return StateVector(std::move(amps));
}

StateVector StateVector::normalized(std::span<const double> amplitudes) {
    std::vector<complex> amps(amplitudes.begin(), amplitudes.end());
    return normalized(std::span<const complex>(amps));
}

StateVector StateVector::eigenstate(const QeSpectrum& spectrum, std::size_t q) {
    const auto v = spectrum.eigenvector(q);
    return StateVector(std::vector<complex>(v.begin(), v.end()));
}

double StateVector::norm_squared() const {
    double sum = 0.0;
    for (const auto& c : amplitudes_) sum += std::norm(c);
    return sum;
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> p(amplitudes_.size());
    for (std::size_t n = 0; n < p.size(); ++n) p[n] = std::norm(amplitudes_[n]);
    return p;
}

double Propagator::unitarity_defect() const {
    const std::size_t n = matrix.rows();
    double defect = 0.0;
#pragma omp parallel for reduction(max : defect) schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            complex sum = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                sum += std::conj(matrix(k, static_cast<std::size_t>(i))) * matrix(k, j);
            }
            const double target = static_cast<std::size_t>(i) == j ? 1.0 : 0.0;
            defect = std::max(defect, std::abs(sum - target));
        }
    }
    return defect;
}

StateVector Propagator::apply(const StateVector& state) const {
    if (state.size() != matrix.rows()) {
        throw PreconditionError("Propagator::apply: dimension mismatch");
    }
    std::vector<complex> out(state.size());
    for (std::size_t r = 0; r < out.size(); ++r) {
        complex sum = 0.0;
        const auto row = matrix.row(r);
        for (std::size_t k = 0; k < row.size(); ++k) sum += row[k] * state.amplitudes()[k];
        out[r] = sum;
    }
    return StateVector(std::move(out), state.time() + time);
}

Propagator propagator(const QeSpectrum& spectrum, double t, Execution exec) {
    if (!std::isfinite(t)) throw DomainError("propagator: non-finite time");
    const auto phases = kernels::spectral_phases(spectrum.eigenvalues(), t);
    Propagator g;
    g.time = t;
    g.matrix = exec == Execution::parallel
                   ? kernels::spectral_propagator(spectrum.eigenvectors(), phases)
                   : kernels::serial::spectral_propagator(spectrum.eigenvectors(), phases);
    return g;
}

StateVector evolve(const StateVector& initial, const QeSpectrum& spectrum, double t, Execution exec) {
    if (initial.size() != spectrum.size()) {
        throw PreconditionError(fmt::format("evolve: state has {} levels, spectrum {}",
                                            initial.size(), spectrum.size()));
    }
    if (!std::isfinite(t)) throw DomainError("evolve: non-finite time");
    const auto phases = kernels::spectral_phases(spectrum.eigenvalues(), t);
    std::vector<complex> out(initial.size());
    if (exec == Execution::parallel) {
        kernels::spectral_apply(spectrum.eigenvectors(), spectrum.eigenvectors_transposed(), phases,
                                initial.amplitudes(), out);
    } else {
        kernels::serial::spectral_apply(spectrum.eigenvectors(), phases, initial.amplitudes(), out);
    }
    return StateVector(std::move(out), initial.time() + t);
}

std::vector<double> cell_probabilities(const StateVector& state, const CellPartition& cells) {
    std::vector<double> p;
    p.reserve(cells.count());
    const auto& amps = state.amplitudes();
    for (const auto& cell : cells.cells) {
        if (cell.last >= amps.size()) {
            throw PreconditionError("cell_probabilities: partition exceeds the state's levels");
        }
        double sum = 0.0;
        for (std::size_t n = cell.first; n <= cell.last; ++n) sum += std::norm(amps[n]);
        p.push_back(sum);
    }
    return p;
}

std::vector<double> log_spaced_times(double t_min, double t_max, std::size_t samples) {
    if (!(t_min > 0.0 && t_max > t_min) || samples < 2) {
        throw PreconditionError("log_spaced_times: need 0 < t_min < t_max and samples >= 2");
    }
    std::vector<double> t(samples);
    const double a = std::log(t_min);
    const double b = std::log(t_max);
    for (std::size_t i = 0; i < samples; ++i) {
        t[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(samples - 1));
    }
    t.front() = t_min;
    t.back() = t_max;
    return t;
}

std::vector<std::vector<double>> cell_probability_series(const StateVector& initial,
                                                         const QeSpectrum& spectrum,
                                                         const CellPartition& cells,
                                                         std::span<const double> times,
                                                         Execution exec) {
    std::vector<std::vector<double>> rows(times.size());
    const auto one = [&](std::size_t i) {
        rows[i] = cell_probabilities(evolve(initial, spectrum, times[i], Execution::serial), cells);
    };
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(times.size()); ++i) {
            one(static_cast<std::size_t>(i));
        }
    } else {
        for (std::size_t i = 0; i < times.size(); ++i) one(i);
    }
    return rows;
}

std::vector<double> time_averaged_cells(const StateVector& initial, const QeSpectrum& spectrum,
                                        const CellPartition& cells, double t_min, double t_max,
                                        std::size_t samples, Execution exec) {
    const auto times = log_spaced_times(t_min, t_max, samples);
    const auto rows = cell_probability_series(initial, spectrum, cells, times, exec);
    std::vector<double> mean(cells.count(), 0.0);
    for (const auto& row : rows)
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += row[i];
    for (auto& m : mean) m /= static_cast<double>(rows.size());
    return mean;
}

double penetration_coefficient(const StateVector& state, std::size_t n0) {
    if (n0 + 1 >= state.size()) {
        throw IndexError(fmt::format("penetration_coefficient: n0 = {} must be < N-1 = {}", n0,
                                     state.size() - 1));
    }
    double sum = 0.0;
    const auto& amps = state.amplitudes();
    for (std::size_t n = n0 + 1; n < amps.size(); ++n) sum += std::norm(amps[n]);
    return std::clamp(sum, 0.0, 1.0);
}

std::size_t barrier_level(const CouplingChain& chain, const CellPartition& cells,
                          std::size_t upper_cell) {
    if (upper_cell == 0 || upper_cell >= cells.count()) {
        throw IndexError(fmt::format("barrier_level: cell {} has no lower boundary", upper_cell));
    }
    const std::size_t b = cells.boundaries[upper_cell - 1];
    const auto& f = chain.off_diagonal;
    if (b >= f.size()) return b - 1;
    return std::abs(f[b - 1]) <= std::abs(f[b]) ? b - 1 : b;
}

std::size_t spread_boundary(const StateVector& state, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw DomainError("spread_boundary: threshold must lie in (0, 1)");
    }
    const auto& amps = state.amplitudes();
    for (std::size_t n = amps.size(); n-- > 0;) {
        if (std::norm(amps[n]) >= threshold) return n;
    }
    return 0;
}

namespace {

std::optional<ScanPoint> scan_point(const ModelParams& base, double inv_h, const ScanOptions& options) {
    ModelParams params = base;
    params.h = 1.0 / inv_h;
    const auto chain = build_chain(params);
    const auto cells = cell_partition(chain);
    if (cells.count() <= std::max(options.barrier_cell, options.start_cell)) return std::nullopt;
    const auto spectrum = solve(chain);
    ScanPoint point;
    point.inv_h = inv_h;
    point.h = params.h;
    point.cell_count = cells.count();
    point.start_level = cells.cells[options.start_cell].center();
    point.barrier = barrier_level(chain, cells, options.barrier_cell);
    const auto state = evolve(StateVector::basis(params.levels, point.start_level), spectrum,
                              options.time, Execution::serial);
    point.penetration = penetration_coefficient(state, point.barrier);
    return point;
}

}  // namespace

ScanResult scan_penetration(const ModelParams& base, std::span<const double> inv_h_grid,
                            const ScanOptions& options, Execution exec) {
    if (inv_h_grid.empty()) throw PreconditionError("scan_penetration: empty grid");
    for (double x : inv_h_grid) {
        if (!(std::isfinite(x) && x > 0.0)) throw DomainError("scan_penetration: 1/h must be > 0");
    }
    std::vector<std::optional<ScanPoint>> slots(inv_h_grid.size());
    std::exception_ptr failure;

    const auto run = [&](std::size_t i) {
        try {
            slots[i] = scan_point(base, inv_h_grid[i], options);
        } catch (...) {
#pragma omp critical(cyclores_scan_failure)
            if (!failure) failure = std::current_exception();
        }
    };
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(slots.size()); ++i) {
            run(static_cast<std::size_t>(i));
        }
    } else {
        for (std::size_t i = 0; i < slots.size(); ++i) run(i);
    }
    if (failure) std::rethrow_exception(failure);

    ScanResult result;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i]) {
            result.points.push_back(*slots[i]);
        } else {
            result.warnings.push_back(fmt::format(
                "1/h = {:.17g}: fewer than {} cells, point skipped", inv_h_grid[i],
                std::max(options.barrier_cell, options.start_cell) + 1));
        }
    }
    return result;
}

double DipAnalysis::mean_spacing() const {
    if (spacings.empty()) return 0.0;
    double sum = 0.0;
    for (double s : spacings) sum += s;
    return sum / static_cast<double>(spacings.size());
}

DipAnalysis locate_dips(std::span<const ScanPoint> points, double depth_ratio, double min_separation) {
    DipAnalysis out;
    if (points.size() < 3) return out;
    std::vector<double> values;
    values.reserve(points.size());
    for (const auto& p : points) values.push_back(p.penetration);
    auto sorted = values;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double threshold = depth_ratio * sorted[sorted.size() / 2];

    double last_candidate = -1.0;
    for (std::size_t i = 1; i + 1 < points.size(); ++i) {
        const double v = values[i];
        if (!(v <= values[i - 1] && v <= values[i + 1] && v < threshold)) continue;
        const double x = points[i].inv_h;
        const bool same_cluster = !out.positions.empty() && x - last_candidate < min_separation;
        last_candidate = x;
        if (same_cluster) {
            if (v < out.depths.back()) {
                out.positions.back() = x;
                out.depths.back() = v;
            }
            continue;
        }
        out.positions.push_back(x);
        out.depths.push_back(v);
    }
    for (std::size_t i = 1; i < out.positions.size(); ++i) {
        out.spacings.push_back(out.positions[i] - out.positions[i - 1]);
    }
    return out;
}

}  // namespace cyclores

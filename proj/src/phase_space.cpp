#include "cyclores/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "cyclores/errors.hpp"

namespace cyclores {
namespace {

constexpr double kNegligibleLog = -40.0;  // terms below e^-40 of the largest are dropped

std::vector<double> half_log_factorials(std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = 0.5 * std::lgamma(static_cast<double>(k) + 1.0);
    return out;
}

// Log-domain sum with the largest term factored out.
double husimi_at(std::span<const complex> amps, std::span<const double> half_log_fact,
                 std::span<double> scratch, double x, double p) {
    const double re = x / std::numbers::sqrt2;
    const double im = p / std::numbers::sqrt2;
    const double r2 = re * re + im * im;
    if (r2 == 0.0) return std::norm(amps[0]);

    const double log_r = 0.5 * std::log(r2);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < amps.size(); ++n) {
        scratch[n] = static_cast<double>(n) * log_r - half_log_fact[n];
        peak = std::max(peak, scratch[n]);
    }
    const double r = std::sqrt(r2);
    const complex step(re / r, -im / r);  // e^{-i theta}, the phase of conj(alpha)
    complex rotation = 1.0;
    complex sum = 0.0;
    for (std::size_t n = 0; n < amps.size(); ++n) {
        const double rel = scratch[n] - peak;
        if (rel > kNegligibleLog && amps[n] != 0.0) sum += amps[n] * rotation * std::exp(rel);
        rotation *= step;
    }
    const double log_scale = peak - 0.5 * r2;
    return std::norm(sum) * std::exp(2.0 * log_scale);
}

double grid_mass(const GridSpec& g, std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum * g.dx() * g.dp() / (2.0 * std::numbers::pi);
}

void validate(const GridSpec& g) {
    if (g.nx < 2 || g.np < 2 || !(g.x_max > g.x_min) || !(g.p_max > g.p_min)) {
        throw PreconditionError("husimi: grid needs at least 2x2 points and positive extent");
    }
}

HusimiGrid finish(const GridSpec& grid, std::vector<double> values) {
    HusimiGrid out;
    out.grid = grid;
    out.values = std::move(values);
    out.mass = grid_mass(grid, out.values);
    if (std::abs(out.mass - 1.0) > 0.02) {
        out.warning = fmt::format("husimi: grid captures mass {:.4f}; widen the grid", out.mass);
    }
    return out;
}

}  // namespace

GridSpec GridSpec::covering(std::size_t levels, std::size_t resolution) {
    const double radius = std::sqrt(2.0 * static_cast<double>(levels)) + 4.0;
    return {-radius, radius, -radius, radius, resolution, resolution};
}

double HusimiGrid::max() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double husimi_value(const StateVector& state, double x, double p) {
    const auto hlf = half_log_factorials(state.size());
    std::vector<double> scratch(state.size());
    return husimi_at(state.amplitudes(), hlf, scratch, x, p);
}

HusimiGrid husimi(const StateVector& state, const GridSpec& grid, Execution exec) {
    validate(grid);
    if (exec == Execution::serial) return finish(grid, kernels::serial::husimi_values(state, grid));

    const auto hlf = half_log_factorials(state.size());
    std::vector<double> values(grid.nx * grid.np);
#pragma omp parallel
    {
        std::vector<double> scratch(state.size());
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.nx); ++i) {
            const auto row = static_cast<std::size_t>(i);
            for (std::size_t j = 0; j < grid.np; ++j) {
                values[row * grid.np + j] =
                    husimi_at(state.amplitudes(), hlf, scratch, grid.x(row), grid.p(j));
            }
        }
    }
    return finish(grid, std::move(values));
}

double radial_mass_fraction(const HusimiGrid& grid, double rho_min, double rho_max) {
    double inside = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < grid.grid.nx; ++i) {
        for (std::size_t j = 0; j < grid.grid.np; ++j) {
            const double q = grid.at(i, j);
            const double rho = std::hypot(grid.grid.x(i), grid.grid.p(j));
            total += q;
            if (rho >= rho_min && rho < rho_max) inside += q;
        }
    }
    return total > 0.0 ? inside / total : 0.0;
}

std::vector<double> default_contour_levels(const HusimiGrid& grid) {
    const double top = grid.max();
    return {0.1 * top, 0.3 * top, 0.5 * top, 0.7 * top, 0.9 * top};
}

ContourExport husimi_contour_export(const HusimiGrid& grid, std::span<const double> levels) {
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > 0.0)) throw PreconditionError("contour levels must be positive");
        if (i > 0 && !(levels[i] > levels[i - 1])) {
            throw PreconditionError("contour levels must be strictly ascending");
        }
    }
    ContourExport out;
    const double top = grid.max();
    for (double level : levels) {
        if (level > top) {
            out.warnings.push_back(
                fmt::format("contour level {:.6g} exceeds max(Q) = {:.6g}; dropped", level, top));
        } else {
            out.levels.push_back(level);
        }
    }
    return out;
}

bool contour_closed(const HusimiGrid& grid, double level) {
    const auto& g = grid.grid;
    for (std::size_t i = 0; i < g.nx; ++i) {
        if (grid.at(i, 0) >= level || grid.at(i, g.np - 1) >= level) return false;
    }
    for (std::size_t j = 0; j < g.np; ++j) {
        if (grid.at(0, j) >= level || grid.at(g.nx - 1, j) >= level) return false;
    }
    return true;
}

namespace kernels::serial {

std::vector<double> husimi_values(const StateVector& state, const GridSpec& grid) {
    const auto hlf = half_log_factorials(state.size());
    std::vector<double> scratch(state.size());
    std::vector<double> values(grid.nx * grid.np);
    for (std::size_t i = 0; i < grid.nx; ++i)
        for (std::size_t j = 0; j < grid.np; ++j)
            values[i * grid.np + j] = husimi_at(state.amplitudes(), hlf, scratch, grid.x(i), grid.p(j));
    return values;
}

}  // namespace kernels::serial
}  // namespace cyclores

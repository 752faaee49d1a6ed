#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cyclores/evolution.hpp"
#include "cyclores/kernels.hpp"

namespace cyclores {

/// Rectangular grid in the oscillator quadratures; alpha = (x + i p) / sqrt(2).
struct GridSpec {
    double x_min = -1.0;
    double x_max = 1.0;
    double p_min = -1.0;
    double p_max = 1.0;
    std::size_t nx = 256;
    std::size_t np = 256;

    /// Square [-sqrt(2N)-4, sqrt(2N)+4]^2 at the given resolution.
    static GridSpec covering(std::size_t levels, std::size_t resolution = 256);

    double dx() const noexcept { return (x_max - x_min) / static_cast<double>(nx - 1); }
    double dp() const noexcept { return (p_max - p_min) / static_cast<double>(np - 1); }
    double x(std::size_t i) const noexcept { return x_min + static_cast<double>(i) * dx(); }
    double p(std::size_t j) const noexcept { return p_min + static_cast<double>(j) * dp(); }
};

struct HusimiGrid {
    GridSpec grid;
    std::vector<double> values;  ///< Q at (x(i), p(j)), row-major in i
    double mass = 0.0;           ///< (dx dp / 2pi) sum Q; 1 for a grid covering the state
    std::optional<std::string> warning;

    double at(std::size_t i, std::size_t j) const noexcept { return values[i * grid.np + j]; }
    double max() const;
};

/// Q(alpha) = |sum_n C_n <alpha|n>|^2 at one phase-space point, in log domain.
double husimi_value(const StateVector& state, double x, double p);

/// Q over the grid; warns with the captured mass when it is more than 2% short of 1.
HusimiGrid husimi(const StateVector& state, const GridSpec& grid, Execution exec = Execution::parallel);

/// Fraction of the grid's mass in rho_min <= sqrt(x^2 + p^2) < rho_max.
double radial_mass_fraction(const HusimiGrid& grid, double rho_min, double rho_max);

struct ContourExport {
    std::vector<double> levels;
    std::vector<std::string> warnings;
};

/// max(Q) * {0.1, 0.3, 0.5, 0.7, 0.9}
std::vector<double> default_contour_levels(const HusimiGrid& grid);

/// Validates requested iso-levels (positive, ascending) and drops those above max(Q).
/// Throws PreconditionError on invalid levels.
ContourExport husimi_contour_export(const HusimiGrid& grid, std::span<const double> levels);

/// True when the region Q >= level does not reach the grid border.
bool contour_closed(const HusimiGrid& grid, double level);

namespace kernels::serial {

/// Reference Husimi evaluation, one point at a time on the calling thread.
std::vector<double> husimi_values(const StateVector& state, const GridSpec& grid);

}  // namespace kernels::serial

}  // namespace cyclores

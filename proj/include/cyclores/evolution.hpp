#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cyclores/kernels.hpp"
#include "cyclores/matrix.hpp"
#include "cyclores/model.hpp"
#include "cyclores/spectrum.hpp"

namespace cyclores {

inline constexpr double kNormTolerance = 1e-10;

/// Amplitudes C_n over Landau levels at time `time` (wave periods), unit norm.
class StateVector {
public:
    /// Throws PreconditionError unless |sum |C_n|^2 - 1| < kNormTolerance.
    explicit StateVector(std::vector<complex> amplitudes, double time = 0.0);

    /// C_n = delta_{n, level}.
    static StateVector basis(std::size_t levels, std::size_t level);
    /// Real amplitudes, rescaled to unit norm (zero vectors are rejected).
    static StateVector normalized(std::span<const double> amplitudes);
    static StateVector normalized(std::span<const complex> amplitudes);
    /// The q-th QE eigenstate.
    static StateVector eigenstate(const QeSpectrum& spectrum, std::size_t q);

    std::size_t size() const noexcept { return amplitudes_.size(); }
    const std::vector<complex>& amplitudes() const noexcept { return amplitudes_; }
    double time() const noexcept { return time_; }
    double norm_squared() const;
    std::vector<double> probabilities() const;

private:
    std::vector<complex> amplitudes_;
    double time_ = 0.0;
};

/// G_{n,n'}(t) = sum_q A_n^q A_n'^q exp(-2 pi i E_q t).
struct Propagator {
    Matrix<complex> matrix;
    double time = 0.0;

    /// max |(G^dagger G - I)_nm|
    double unitarity_defect() const;
    StateVector apply(const StateVector& state) const;
};

Propagator propagator(const QeSpectrum& spectrum, double t, Execution exec = Execution::parallel);

/// C(t) = A (exp(-2 pi i E t) .* (A^T C(0))) in O(N^2), without forming G.
/// Throws PreconditionError on a dimension mismatch.
StateVector evolve(const StateVector& initial, const QeSpectrum& spectrum, double t,
                   Execution exec = Execution::parallel);

/// P_i = sum over cell i of |C_n|^2.
std::vector<double> cell_probabilities(const StateVector& state, const CellPartition& cells);

/// `samples` log-spaced times in [t_min, t_max].
std::vector<double> log_spaced_times(double t_min, double t_max, std::size_t samples);

/// Cell probabilities at each of `times`; row i belongs to times[i].
std::vector<std::vector<double>> cell_probability_series(const StateVector& initial,
                                                         const QeSpectrum& spectrum,
                                                         const CellPartition& cells,
                                                         std::span<const double> times,
                                                         Execution exec = Execution::parallel);

/// Mean of cell_probabilities over log-spaced samples in [t_min, t_max].
/// Throws PreconditionError unless 0 < t_min < t_max and samples >= 2.
std::vector<double> time_averaged_cells(const StateVector& initial, const QeSpectrum& spectrum,
                                        const CellPartition& cells, double t_min, double t_max,
                                        std::size_t samples, Execution exec = Execution::parallel);

/// sum_{n > n0} |C_n|^2. Throws IndexError unless n0 < N-1.
double penetration_coefficient(const StateVector& state, std::size_t n0);

/// Weakest link on either side of the sign change that opens cell `upper_cell`
/// (cells numbered from 0). P is measured above this level.
std::size_t barrier_level(const CouplingChain& chain, const CellPartition& cells,
                          std::size_t upper_cell);

/// Largest n with |C_n|^2 >= threshold. Throws DomainError unless threshold in (0, 1).
std::size_t spread_boundary(const StateVector& state, double threshold = 1e-10);

struct ScanOptions {
    double time = 4e4;               ///< evaluation time, periods
    std::size_t start_cell = 1;      ///< initial delta state at the center of this cell (0-based)
    std::size_t barrier_cell = 2;    ///< penetration into this cell and beyond
};

struct ScanPoint {
    double inv_h = 0.0;
    double h = 0.0;
    double penetration = 0.0;
    std::size_t barrier = 0;
    std::size_t start_level = 0;
    std::size_t cell_count = 0;
};

struct ScanResult {
    std::vector<ScanPoint> points;   ///< in grid order, skipped points omitted
    std::vector<std::string> warnings;
};

/// For each 1/h: rebuild the chain, solve, evolve the start state, record P.
/// Points with fewer cells than barrier_cell + 1 are skipped with a warning.
ScanResult scan_penetration(const ModelParams& base, std::span<const double> inv_h_grid,
                            const ScanOptions& options = {}, Execution exec = Execution::parallel);

struct DipAnalysis {
    std::vector<double> positions;  ///< 1/h of each dip, ascending
    std::vector<double> depths;     ///< P at each dip
    std::vector<double> spacings;   ///< consecutive differences of positions

    double mean_spacing() const;
};

/// Dips: local minima with P below depth_ratio * median(P). Minima closer than
/// min_separation are merged, keeping the deepest.
DipAnalysis locate_dips(std::span<const ScanPoint> points, double depth_ratio, double min_separation);

}  // namespace cyclores

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cyclores {

/// Dimensionless model. Energies are in units of hbar*omega, times in wave periods.
struct ModelParams {
    double h = 0.6;           ///< effective Planck constant (k a)^2, > 0
    double v0 = 0.1;          ///< wave amplitude, >= 0
    double delta = 0.0;       ///< coefficient of n on the diagonal (detuning), any sign
    std::size_t levels = 432; ///< number of Landau levels N, >= 2
    std::size_t n_switch = 50;  ///< first level evaluated with the Bessel-limit coupling

    /// Throws DomainError when an invariant is violated.
    void validate() const;
};

/// Derivative step (in levels) used for f' and f'' of the continuous coupling.
inline constexpr double kDerivativeStep = 1e-3;

/// Largest tolerated jump between the two coupling branches, in units of the local
/// Bessel envelope. Checked when a chain is built.
inline constexpr double kBranchTolerance = 1e-2;

/// Exact nearest-neighbour element (v0/2) e^{-h/4} sqrt(h/(2(n+1))) L_n^(1)(h/2).
double coupling_laguerre(std::size_t n, double h, double v0);

/// Large-n limit of coupling_laguerre: (v0/2) J1(sqrt(2(n+1)h)).
double coupling_bessel(std::size_t n, double h, double v0);

/// The commonly quoted leading-order form (v0/2) sqrt(n/(n+1)) e^{-h/4} J1(sqrt(2nh)).
/// Not used by the model; kept to quantify how far it sits from the exact element.
double coupling_bessel_leading(double n, double h, double v0);

/// Amplitude of the J1 oscillation at level n, (v0/2) min(max J1, sqrt(2/(pi x))).
double bessel_envelope(double n, double h, double v0);

/// |coupling_laguerre - coupling_bessel| at n in units of bessel_envelope.
double branch_mismatch(std::size_t n, double h, double v0);

/// f(n) = V_{n,n+1}: exact Laguerre form below n_switch, Bessel limit from n_switch on.
/// Throws IndexError unless n <= N-2.
double coupling(std::size_t n, const ModelParams& params);

/// The same coupling continued to real n (>= -0.5). The branch is selected by `branch_at`
/// so derivative stencils never straddle the switch.
double coupling_continuous(double n, const ModelParams& params, double branch_at);
inline double coupling_continuous(double n, const ModelParams& params) {
    return coupling_continuous(n, params, n);
}

/// Centered finite differences of coupling_continuous with step kDerivativeStep.
double coupling_first_derivative(double n, const ModelParams& params);
double coupling_second_derivative(double n, const ModelParams& params);

/// Tridiagonal operator: off_diagonal[n] = f(n), diagonal[n] = n * delta.
struct CouplingChain {
    std::vector<double> off_diagonal;
    std::vector<double> diagonal;
    ModelParams params;

    std::size_t size() const noexcept { return diagonal.size(); }
    double max_coupling() const;
    double max_diagonal() const;
};

/// Builds the chain and checks branch continuity at n_switch (NumericalError on failure).
CouplingChain build_chain(const ModelParams& params);

/// Copy of the chain restricted to levels [first, last]; diagonal values are kept.
CouplingChain sub_chain(const CouplingChain& chain, std::size_t first, std::size_t last);

/// Inclusive range of levels.
struct LevelRange {
    std::size_t first = 0;
    std::size_t last = 0;

    std::size_t size() const noexcept { return last - first + 1; }
    bool contains(std::size_t n) const noexcept { return n >= first && n <= last; }
    /// Integer nearest the midpoint (halves round up).
    std::size_t center() const noexcept { return (first + last + 1) / 2; }
};

/// Quantum resonance cells: maximal runs of constant coupling sign.
///
/// `boundaries[i]` is the first level of cell i+1. At a sign change f(b-1) f(b) < 0 the
/// boundary is b; an exact zero f(n) = 0 cuts the link n <-> n+1, so the boundary is n+1.
struct CellPartition {
    std::vector<std::size_t> boundaries;
    std::vector<LevelRange> cells;

    std::size_t count() const noexcept { return cells.size(); }
    /// Index of the cell containing level n.
    std::size_t cell_of(std::size_t n) const;
};

/// Throws DomainError when every coupling vanishes (no usable partition).
CellPartition cell_partition(const CouplingChain& chain);

/// Real roots n0 in (0, N-2) of delta = -2 f'(n0). At delta = 0 these are the extrema of f.
std::vector<double> resonance_centers(const ModelParams& params);

/// True when f(n0) f''(n0) < 0, i.e. the reduced harmonic problem is an oscillator.
bool is_stable_center(double n0, const ModelParams& params);

/// Level spacing 2 sqrt(|f(n0) f''(n0)|) of the harmonic reduction around n0.
/// Throws PreconditionError when f(n0) f''(n0) > 0.
double small_oscillation_frequency(double n0, const ModelParams& params);

/// Links n0 with |f(n0)| <= eps * max|f|.
std::vector<std::size_t> blocked_levels(const CouplingChain& chain, double eps);

/// h for which the coupling at `level` vanishes exactly, on the `root`-th zero of J1.
/// Solved by bisection on the model coupling; other fields of `base` are kept.
double blocking_parameter(std::size_t level, std::size_t root, const ModelParams& base);

}  // namespace cyclores

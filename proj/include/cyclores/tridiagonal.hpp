#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cyclores/matrix.hpp"

namespace cyclores {

struct TridiagonalEigen {
    std::vector<double> values;  ///< ascending
    Matrix<double> vectors;      ///< (component n, eigenvector q)
    std::size_t iterations = 0;  ///< total QL sweeps
};

/// Full eigendecomposition of the real symmetric tridiagonal matrix with the given
/// diagonal (length N) and off-diagonal (length N-1), by implicit-shift QL with
/// eigenvector accumulation. Each column is sign-normalised so that its
/// largest-magnitude component is positive.
///
/// Throws NumericalError if an eigenvalue does not converge in `max_sweeps` sweeps.
TridiagonalEigen symmetric_tridiagonal_eigen(std::span<const double> diagonal,
                                             std::span<const double> off_diagonal,
                                             std::size_t max_sweeps = 60);

}  // namespace cyclores

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "cyclores/matrix.hpp"

namespace cyclores {

using complex = std::complex<double>;

/// Whether data-parallel loops run on OpenMP threads or on the calling thread only.
enum class Execution { serial, parallel };

/// Sets the OpenMP thread count used by Execution::parallel (0 keeps the runtime default).
void set_thread_count(int threads);
int thread_count();

namespace kernels {

/// e^{-2 pi i E_q t}, with E_q t reduced mod 1 before the trigonometric evaluation.
std::vector<complex> spectral_phases(std::span<const double> eigenvalues, double t);

/// out = A (phases .* (A^T in)); `vectors` is A (n, q) and `vectors_t` its transpose.
/// Parallel over output components; each component is summed in a fixed order.
void spectral_apply(const Matrix<double>& vectors, const Matrix<double>& vectors_t,
                    std::span<const complex> phases, std::span<const complex> in,
                    std::span<complex> out);

/// G(n, m) = sum_q A(n, q) A(m, q) phases[q], parallel over rows.
Matrix<complex> spectral_propagator(const Matrix<double>& vectors, std::span<const complex> phases);

/// Reference implementations on the calling thread, kept for testing and benchmarking.
namespace serial {

void spectral_apply(const Matrix<double>& vectors, std::span<const complex> phases,
                    std::span<const complex> in, std::span<complex> out);

Matrix<complex> spectral_propagator(const Matrix<double>& vectors, std::span<const complex> phases);

}  // namespace serial
}  // namespace kernels
}  // namespace cyclores

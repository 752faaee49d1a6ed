#include "cyclores/kernels.hpp"

#include <cmath>
#include <numbers>

#include <omp.h>

namespace cyclores {

void set_thread_count(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

namespace kernels {

std::vector<complex> spectral_phases(std::span<const double> eigenvalues, double t) {
    std::vector<complex> phases(eigenvalues.size());
    for (std::size_t q = 0; q < eigenvalues.size(); ++q) {
        const double cycles = eigenvalues[q] * t;
        const double turn = cycles - std::floor(cycles);
        phases[q] = std::polar(1.0, -2.0 * std::numbers::pi * turn);
    }
    return phases;
}

void spectral_apply(const Matrix<double>& vectors, const Matrix<double>& vectors_t,
                    std::span<const complex> phases, std::span<const complex> in,
                    std::span<complex> out) {
    const auto n = static_cast<std::ptrdiff_t>(vectors.rows());
    std::vector<complex> weights(vectors.cols());

#pragma omp parallel
    {
#pragma omp for schedule(static)
        for (std::ptrdiff_t q = 0; q < n; ++q) {
            const auto column = vectors_t.row(static_cast<std::size_t>(q));
            double re = 0.0;
            double im = 0.0;
            for (std::size_t k = 0; k < column.size(); ++k) {
                re += column[k] * in[k].real();
                im += column[k] * in[k].imag();
            }
            weights[static_cast<std::size_t>(q)] = phases[static_cast<std::size_t>(q)] * complex(re, im);
        }

#pragma omp for schedule(static)
        for (std::ptrdiff_t r = 0; r < n; ++r) {
            const auto row = vectors.row(static_cast<std::size_t>(r));
            double re = 0.0;
            double im = 0.0;
            for (std::size_t q = 0; q < row.size(); ++q) {
                re += row[q] * weights[q].real();
                im += row[q] * weights[q].imag();
            }
            out[static_cast<std::size_t>(r)] = complex(re, im);
        }
    }
}

Matrix<complex> spectral_propagator(const Matrix<double>& vectors, std::span<const complex> phases) {
    const std::size_t n = vectors.rows();
    Matrix<complex> g(n, n);
    // B(q, m) = phases[q] A(m, q) so that G = A B is a plain row-by-matrix product
    Matrix<complex> scaled(n, n);
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t q = 0; q < n; ++q) scaled(q, m) = phases[q] * vectors(m, q);

#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(n); ++r) {
        const auto a_row = vectors.row(static_cast<std::size_t>(r));
        auto g_row = g.row(static_cast<std::size_t>(r));
        for (std::size_t q = 0; q < n; ++q) {
            const double a = a_row[q];
            const auto b_row = scaled.row(q);
            for (std::size_t m = 0; m < n; ++m) g_row[m] += a * b_row[m];
        }
    }
    return g;
}

namespace serial {

void spectral_apply(const Matrix<double>& vectors, std::span<const complex> phases,
                    std::span<const complex> in, std::span<complex> out) {
    const std::size_t n = vectors.rows();
    std::vector<complex> weights(n);
    for (std::size_t q = 0; q < n; ++q) {
        complex sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) sum += vectors(k, q) * in[k];
        weights[q] = phases[q] * sum;
    }
    for (std::size_t r = 0; r < n; ++r) {
        complex sum = 0.0;
        for (std::size_t q = 0; q < n; ++q) sum += vectors(r, q) * weights[q];
        out[r] = sum;
    }
}

Matrix<complex> spectral_propagator(const Matrix<double>& vectors, std::span<const complex> phases) {
    const std::size_t n = vectors.rows();
    Matrix<complex> g(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t m = 0; m < n; ++m) {
            complex sum = 0.0;
            for (std::size_t q = 0; q < n; ++q) sum += vectors(r, q) * vectors(m, q) * phases[q];
            g(r, m) = sum;
        }
    return g;
}

}  // namespace serial
}  // namespace kernels
}  // namespace cyclores

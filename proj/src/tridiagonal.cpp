#include "cyclores/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/core.h>

#include "cyclores/errors.hpp"

namespace cyclores {

TridiagonalEigen symmetric_tridiagonal_eigen(std::span<const double> diagonal,
                                             std::span<const double> off_diagonal,
                                             std::size_t max_sweeps) {
    const std::size_t n = diagonal.size();
    if (n == 0 || off_diagonal.size() + 1 != n) {
        throw PreconditionError(fmt::format(
            "symmetric_tridiagonal_eigen: {} diagonal vs {} off-diagonal entries", n,
            off_diagonal.size()));
    }
    std::vector<double> d(diagonal.begin(), diagonal.end());
    std::vector<double> e(n, 0.0);
    std::copy(off_diagonal.begin(), off_diagonal.end(), e.begin());

    // rows of z are the eigenvectors being accumulated; rotations touch two contiguous rows
    Matrix<double> z = Matrix<double>::identity(n);
    std::size_t total_sweeps = 0;

    constexpr double eps = std::numeric_limits<double>::epsilon();
    double shift_sum = 0.0;
    double tst1 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n && std::abs(e[m]) > eps * tst1) ++m;

        if (m > l) {
            std::size_t sweeps = 0;
            do {
                if (++sweeps > max_sweeps) {
                    throw NumericalError(fmt::format(
                        "tridiagonal QL: eigenvalue {} not converged after {} sweeps "
                        "(|e| = {:.3e}, scale = {:.3e}, n = {})",
                        l, max_sweeps, std::abs(e[l]), tst1, n));
                }
                ++total_sweeps;
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                shift_sum += h;

                p = d[m];
                double c = 1.0;
                double c2 = c;
                double c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0;
                double s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);

                    auto lower = z.row(ii);
                    auto upper = z.row(ii + 1);
                    for (std::size_t k = 0; k < n; ++k) {
                        const double t = upper[k];
                        upper[k] = s * lower[k] + c * t;
                        lower[k] = c * lower[k] - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += shift_sum;
        e[l] = 0.0;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

    TridiagonalEigen out;
    out.iterations = total_sweeps;
    out.values.resize(n);
    out.vectors = Matrix<double>(n, n);
    for (std::size_t q = 0; q < n; ++q) {
        const auto src = z.row(order[q]);
        out.values[q] = d[order[q]];
        std::size_t peak = 0;
        for (std::size_t k = 1; k < n; ++k) {
            if (std::abs(src[k]) > std::abs(src[peak])) peak = k;
        }
        const double sign = src[peak] < 0.0 ? -1.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, q) = sign * src[k];
    }
    return out;
}

}  // namespace cyclores

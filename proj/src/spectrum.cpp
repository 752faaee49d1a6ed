#include "cyclores/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "cyclores/errors.hpp"
#include "cyclores/tridiagonal.hpp"

namespace cyclores {

QeSpectrum::QeSpectrum(CouplingChain chain, std::vector<double> eigenvalues,
                       Matrix<double> eigenvectors)
    : chain_(std::move(chain)),
      eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      transposed_(eigenvectors_.transposed()) {}

std::vector<double> QeSpectrum::eigenvector(std::size_t q) const {
    if (q >= size()) throw IndexError(fmt::format("eigenvector: index {} >= {}", q, size()));
    const auto row = transposed_.row(q);
    return {row.begin(), row.end()};
}

QeSpectrum solve(const CouplingChain& chain) {
    if (chain.size() < 2) throw PreconditionError("solve: need at least two levels");
    auto eigen = symmetric_tridiagonal_eigen(chain.diagonal, chain.off_diagonal);
    return QeSpectrum(chain, std::move(eigen.values), std::move(eigen.vectors));
}

SpectrumDiagnostics diagnose(const QeSpectrum& spectrum) {
    const std::size_t n = spectrum.size();
    const auto& at = spectrum.eigenvectors_transposed();
    const auto& a = spectrum.eigenvectors();
    const auto& chain = spectrum.chain();
    SpectrumDiagnostics out;

    for (std::size_t q = 0; q < n; ++q) {
        const auto u = at.row(q);
        for (std::size_t p = q; p < n; ++p) {
            const auto v = at.row(p);
            double dot = 0.0;
            for (std::size_t k = 0; k < n; ++k) dot += u[k] * v[k];
            out.orthonormality = std::max(out.orthonormality, std::abs(dot - (p == q ? 1.0 : 0.0)));
        }
        const double e = spectrum.eigenvalues()[q];
        for (std::size_t k = 0; k < n; ++k) {
            double hv = chain.diagonal[k] * u[k];
            if (k > 0) hv += chain.off_diagonal[k - 1] * u[k - 1];
            if (k + 1 < n) hv += chain.off_diagonal[k] * u[k + 1];
            out.residual = std::max(out.residual, std::abs(hv - e * u[k]));
        }
    }
    for (std::size_t r = 0; r < n; ++r) {
        const auto u = a.row(r);
        for (std::size_t m = r; m < n; ++m) {
            const auto v = a.row(m);
            double dot = 0.0;
            for (std::size_t q = 0; q < n; ++q) dot += u[q] * v[q];
            out.completeness = std::max(out.completeness, std::abs(dot - (r == m ? 1.0 : 0.0)));
        }
    }
    out.residual_scale = chain.max_coupling() + chain.max_diagonal();
    double sum_e = 0.0;
    double sum_d = 0.0;
    for (double e : spectrum.eigenvalues()) sum_e += e;
    for (double d : chain.diagonal) sum_d += d;
    out.trace = std::abs(sum_e - sum_d);
    return out;
}

ParityReport check_parity_symmetry(const QeSpectrum& spectrum, double tol) {
    if (spectrum.chain().params.delta != 0.0) {
        throw PreconditionError("check_parity_symmetry: parity symmetry requires delta = 0");
    }
    const std::size_t n = spectrum.size();
    const auto& e = spectrum.eigenvalues();
    const auto& at = spectrum.eigenvectors_transposed();

    ParityReport report;
    report.partner.assign(n, n);
    std::vector<bool> taken(n, false);
    for (std::size_t q = 0; q < n; ++q) {
        if (report.partner[q] != n) continue;
        std::size_t best = n;
        double best_gap = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < n; ++p) {
            if (taken[p]) continue;
            const double gap = std::abs(e[q] + e[p]);
            if (gap < best_gap) {
                best_gap = gap;
                best = p;
            }
        }
        report.partner[q] = best;
        report.partner[best] = q;
        taken[q] = true;
        taken[best] = true;
        report.eigenvalue_defect = std::max(report.eigenvalue_defect, best_gap);
    }

    for (std::size_t q = 0; q < n; ++q) {
        const auto u = at.row(q);
        const auto v = at.row(report.partner[q]);
        double plus = 0.0;
        double minus = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double image = (k % 2 == 0 ? 1.0 : -1.0) * u[k];
            plus = std::max(plus, std::abs(image - v[k]));
            minus = std::max(minus, std::abs(image + v[k]));
        }
        report.vector_defect = std::max(report.vector_defect, std::min(plus, minus));
    }
    report.symmetric = report.max_defect() <= tol;
    return report;
}

std::vector<LocalizationRecord> localization_profile(const QeSpectrum& spectrum,
                                                     const CellPartition& cells) {
    const auto& at = spectrum.eigenvectors_transposed();
    std::vector<LocalizationRecord> out(spectrum.size());
    for (std::size_t q = 0; q < spectrum.size(); ++q) {
        const auto u = at.row(q);
        auto& record = out[q];
        record.energy = spectrum.eigenvalues()[q];
        double fourth = 0.0;
        for (double a : u) fourth += a * a * a * a;
        record.participation_ratio = 1.0 / fourth;
        record.cell_weights.reserve(cells.count());
        for (const auto& cell : cells.cells) {
            double w = 0.0;
            for (std::size_t k = cell.first; k <= cell.last; ++k) w += u[k] * u[k];
            record.cell_weights.push_back(w);
        }
    }
    return out;
}

EdgeSpacings edge_spacings(const QeSpectrum& spectrum, std::size_t k) {
    const std::size_t n = spectrum.size();
    if (k == 0 || 2 * k >= n) {
        throw PreconditionError(fmt::format("edge_spacings: need 0 < k < N/2 (k = {}, N = {})", k, n));
    }
    const auto& e = spectrum.eigenvalues();
    EdgeSpacings out;
    for (std::size_t i = 0; i < k; ++i) {
        out.lower.push_back(e[i + 1] - e[i]);
        out.upper.push_back(e[n - 1 - i] - e[n - 2 - i]);
    }
    return out;
}

}  // namespace cyclores

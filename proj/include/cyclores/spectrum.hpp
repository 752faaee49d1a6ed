#pragma once

#include <cstddef>
#include <vector>

#include "cyclores/matrix.hpp"
#include "cyclores/model.hpp"

namespace cyclores {

/// Quasienergies E_q (ascending, hbar*omega units) and orthonormal eigenvectors A_n^q
/// of the first-order chain. Immutable once built.
class QeSpectrum {
public:
    QeSpectrum(CouplingChain chain, std::vector<double> eigenvalues, Matrix<double> eigenvectors);

    std::size_t size() const noexcept { return eigenvalues_.size(); }
    const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
    /// (level n, eigenstate q)
    const Matrix<double>& eigenvectors() const noexcept { return eigenvectors_; }
    /// (eigenstate q, level n); row q is A^q.
    const Matrix<double>& eigenvectors_transposed() const noexcept { return transposed_; }
    const CouplingChain& chain() const noexcept { return chain_; }

    double energy(std::size_t q) const { return eigenvalues_.at(q); }
    std::vector<double> eigenvector(std::size_t q) const;

private:
    CouplingChain chain_;
    std::vector<double> eigenvalues_;
    Matrix<double> eigenvectors_;
    Matrix<double> transposed_;
};

/// Throws PreconditionError for N < 2 and NumericalError on non-convergence.
QeSpectrum solve(const CouplingChain& chain);

struct SpectrumDiagnostics {
    double orthonormality = 0.0;  ///< max |<A^q, A^q'> - delta_qq'|
    double completeness = 0.0;    ///< max |(A A^T - I)_nm|
    double residual = 0.0;        ///< max_q ||H A^q - E_q A^q||_inf
    double residual_scale = 0.0;  ///< max|f| + max|d|
    double trace = 0.0;           ///< |sum E_q - sum d(n)|
};

SpectrumDiagnostics diagnose(const QeSpectrum& spectrum);

struct ParityReport {
    double eigenvalue_defect = 0.0;  ///< max |E_q + E_partner(q)|
    double vector_defect = 0.0;      ///< max ||P A^q -+ A^partner||_inf
    std::vector<std::size_t> partner;
    bool symmetric = false;          ///< both defects <= tol

    double max_defect() const noexcept {
        return eigenvalue_defect > vector_defect ? eigenvalue_defect : vector_defect;
    }
};

/// Checks E -> -E, A_n -> (-1)^n A_n. Partners are matched greedily on |E_q + E_q'|.
/// Throws PreconditionError unless the chain has delta == 0.
ParityReport check_parity_symmetry(const QeSpectrum& spectrum, double tol);

struct LocalizationRecord {
    double energy = 0.0;
    double participation_ratio = 0.0;  ///< 1 / sum |A_n|^4
    std::vector<double> cell_weights;   ///< sum over each cell of |A_n|^2
};

std::vector<LocalizationRecord> localization_profile(const QeSpectrum& spectrum,
                                                     const CellPartition& cells);

struct EdgeSpacings {
    std::vector<double> lower;  ///< E_1 - E_0, E_2 - E_1, ...
    std::vector<double> upper;  ///< E_{N-1} - E_{N-2}, E_{N-2} - E_{N-3}, ...
};

/// The k lowest and k highest gaps. Throws PreconditionError unless 0 < k < N/2.
EdgeSpacings edge_spacings(const QeSpectrum& spectrum, std::size_t k);

}  // namespace cyclores

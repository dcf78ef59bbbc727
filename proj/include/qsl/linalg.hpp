// Dense complex linear algebra kernel: Hermitian eigendecomposition,
// unitary exponentials, PSD square roots and small operator helpers.
// Storage and the eigensolver come from Eigen.
#pragma once

#include <complex>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "qsl/errors.hpp"
#include "qsl/units.hpp"

namespace qsl {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kEigenClampTol = 1e-12;

struct SpectralDecomposition {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // columns

    std::size_t dim() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

inline double frobenius_norm(const Matrix& m) { return m.norm(); }

inline Matrix adjoint(const Matrix& m) { return m.adjoint(); }

inline cplx trace(const Matrix& m) { return m.trace(); }

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) fail(ErrorKind::DimMismatch, "matmul: inner dimensions differ");
    return a * b;
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return matmul(a, b) - matmul(b, a); }

inline Matrix anticommutator(const Matrix& a, const Matrix& b) { return matmul(a, b) + matmul(b, a); }

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline bool is_square(const Matrix& m) { return m.rows() == m.cols() && m.rows() >= 1; }

/// Relative Frobenius Hermiticity defect, ||M - M^dagger|| / max(1, ||M||).
inline double hermiticity_defect(const Matrix& m) {
    const double scale = std::max(1.0, m.norm());
    return (m - m.adjoint()).norm() / scale;
}

inline bool is_hermitian(const Matrix& m, double tol = kHermitianTol) {
    return is_square(m) && hermiticity_defect(m) <= tol;
}

inline void require_hermitian(const Matrix& m, const char* where) {
    if (!is_square(m)) fail(ErrorKind::DimMismatch, std::string(where) + ": matrix is not square");
    if (!all_finite(m)) fail(ErrorKind::InvalidArgument, std::string(where) + ": non-finite entries");
    if (hermiticity_defect(m) > kHermitianTol) {
        fail(ErrorKind::NotHermitian, std::string(where) + ": defect " + std::to_string(hermiticity_defect(m)));
    }
}

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline SpectralDecomposition eigh(const Matrix& m) {
    require_hermitian(m, "eigh");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
    if (solver.info() != Eigen::Success) fail(ErrorKind::ConvergenceFailure, "eigh: eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Rebuilds V f(lambda) V^dagger for a complex-valued spectral function.
template <typename F>
Matrix spectral_apply(const SpectralDecomposition& sd, F&& f) {
    const auto n = static_cast<Eigen::Index>(sd.dim());
    Vector diag(n);
    for (Eigen::Index i = 0; i < n; ++i) diag(i) = cplx(f(sd.eigenvalues(i)));
    return sd.eigenvectors * diag.asDiagonal() * sd.eigenvectors.adjoint();
}

/// U = exp(-i K angle / hbar).
inline Matrix expm_unitary(const SpectralDecomposition& sd, double angle) {
    const double scale = angle / hbar();
    return spectral_apply(sd, [scale](double lambda) { return std::exp(cplx(0.0, -lambda * scale)); });
}

inline Matrix expm_unitary(const Matrix& k, double angle) { return expm_unitary(eigh(k), angle); }

inline Matrix psd_sqrt(const Matrix& m) {
    const SpectralDecomposition sd = eigh(m);
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
        if (sd.eigenvalues(i) < -kEigenClampTol) {
            fail(ErrorKind::NotPSD, "psd_sqrt: eigenvalue " + std::to_string(sd.eigenvalues(i)));
        }
    }
    return hermitian_part(spectral_apply(sd, [](double lambda) { return std::sqrt(std::max(lambda, 0.0)); }));
}

inline Matrix identity(std::size_t dim) {
    return Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

/// Standard single-qubit matrices.
namespace pauli_matrix {
inline Matrix I() { return identity(2); }
inline Matrix X() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline Matrix Y() {
    Matrix m(2, 2);
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}
inline Matrix Z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}
}  // namespace pauli_matrix

}  // namespace qsl

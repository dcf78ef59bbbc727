// Fisher information: classical (discrete POVM on a parametrised family) and
// quantum (eigenbasis sum for a unitary family generated by K), with the
// variance bound F_Q <= 4 <(dK)^2> / hbar^2.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsl/distances.hpp"

namespace qsl {

inline constexpr double kPovmTol = 1e-10;
inline constexpr double kDegenerateGapTol = 1e-14;

class Povm {
public:
    explicit Povm(std::vector<Matrix> elements) : elements_(std::move(elements)) {
        if (elements_.empty()) fail(ErrorKind::InvalidPovm, "POVM has no elements");
        const auto n = elements_.front().rows();
        Matrix total = Matrix::Zero(n, n);
        for (auto& e : elements_) {
            if (e.rows() != n || e.cols() != n) fail(ErrorKind::InvalidPovm, "POVM elements differ in dimension");
            if (!is_hermitian(e)) fail(ErrorKind::InvalidPovm, "POVM element is not Hermitian");
            e = hermitian_part(e);
            if (eigh(e).eigenvalues(0) < -kEigenClampTol) fail(ErrorKind::InvalidPovm, "POVM element is not PSD");
            total += e;
        }
        if ((total - Matrix::Identity(n, n)).norm() > kPovmTol) {
            fail(ErrorKind::InvalidPovm, "POVM elements do not sum to the identity");
        }
    }

    /// Projective measurement onto the columns of a unitary.
    static Povm from_basis(const Matrix& basis) {
        std::vector<Matrix> elements;
        for (Eigen::Index j = 0; j < basis.cols(); ++j) elements.emplace_back(basis.col(j) * basis.col(j).adjoint());
        return Povm(std::move(elements));
    }

    std::size_t dim() const { return static_cast<std::size_t>(elements_.front().rows()); }
    std::size_t size() const { return elements_.size(); }
    const std::vector<Matrix>& elements() const { return elements_; }

private:
    std::vector<Matrix> elements_;
};

/// Hermitian generator with its spectral decomposition computed once at construction.
class Observable {
public:
    explicit Observable(const Matrix& mat) {
        require_hermitian(mat, "Observable");
        mat_ = hermitian_part(mat);
        spectral_ = eigh(mat_);
    }

    std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
    const Matrix& mat() const { return mat_; }
    const SpectralDecomposition& spectral() const { return spectral_; }
    double ground_energy() const { return spectral_.eigenvalues(0); }

    double expectation(const DensityMatrix& rho) const {
        detail::require_same_dim(dim(), rho.dim(), "Observable::expectation");
        return (rho.mat() * mat_).trace().real();
    }

private:
    Matrix mat_;
    SpectralDecomposition spectral_;
};

using DensityFamily = std::function<DensityMatrix(double)>;

inline ProbDist born_probabilities(const DensityMatrix& rho, const Povm& povm) {
    detail::require_same_dim(rho.dim(), povm.dim(), "born_probabilities");
    std::vector<double> p;
    p.reserve(povm.size());
    double total = 0.0;
    for (const auto& e : povm.elements()) {
        double pj = (e * rho.mat()).trace().real();
        if (pj < -kEigenClampTol) fail(ErrorKind::InvalidPovm, "negative outcome probability " + std::to_string(pj));
        pj = std::max(pj, 0.0);
        p.push_back(pj);
        total += pj;
    }
    if (std::abs(total - 1.0) > kPovmTol) fail(ErrorKind::InvalidPovm, "outcome probabilities sum to " + std::to_string(total));
    for (auto& pj : p) pj /= total;
    return ProbDist(std::move(p));
}

inline double default_fd_step(double theta) { return 1e-5 * std::max(1.0, std::abs(theta)); }

/// F(theta) = sum_j (dp_j/dtheta)^2 / p_j with central differences of step h.
/// An outcome with zero probability at theta but not at theta +- h has no
/// finite contribution and is reported as ZeroProbabilityOutcome.
inline double classical_fisher(const DensityFamily& rho_of_theta, const Povm& povm, double theta,
                               std::optional<double> step = std::nullopt) {
    const double h = step.value_or(default_fd_step(theta));
    if (!(h > 0.0)) fail(ErrorKind::InvalidArgument, "finite-difference step must be positive");
    const ProbDist p0 = born_probabilities(rho_of_theta(theta), povm);
    const ProbDist pp = born_probabilities(rho_of_theta(theta + h), povm);
    const ProbDist pm = born_probabilities(rho_of_theta(theta - h), povm);
    double f = 0.0;
    for (std::size_t j = 0; j < p0.size(); ++j) {
        const double dp = (pp[j] - pm[j]) / (2.0 * h);
        if (p0[j] <= kSupportTol) {
            if (pp[j] > kSupportTol || pm[j] > kSupportTol) {
                fail(ErrorKind::ZeroProbabilityOutcome, "outcome " + std::to_string(j) + " has zero probability at theta");
            }
            continue;
        }
        f += dp * dp / p0[j];
    }
    return f;
}

/// F_Q = (2/hbar^2) sum_jk (p_j - p_k)^2 / (p_j + p_k) |dK_jk|^2 in the eigenbasis of rho.
inline double qfi(const DensityMatrix& rho, const Observable& k) {
    detail::require_same_dim(rho.dim(), k.dim(), "qfi");
    const RealVector& p = rho.spectrum().eigenvalues;
    const Matrix kt = detail::to_eigenbasis(rho, k.mat());
    double sum = 0.0;
    for (Eigen::Index a = 0; a < kt.rows(); ++a) {
        for (Eigen::Index b = 0; b < kt.cols(); ++b) {
            const double s = p(a) + p(b);
            const double d = p(a) - p(b);
            if (s <= kSupportTol || std::abs(d) <= kDegenerateGapTol) continue;
            sum += d * d / s * std::norm(kt(a, b));
        }
    }
    const double hb = hbar();
    return 2.0 * sum / (hb * hb);
}

/// rho' = (1/(i hbar)) [K, rho] for the unitary family generated by K.
inline Matrix unitary_tangent(const DensityMatrix& rho, const Observable& k) {
    detail::require_same_dim(rho.dim(), k.dim(), "unitary_tangent");
    return hermitian_part(commutator(k.mat(), rho.mat()) / cplx(0.0, hbar()));
}

/// Second route to the QFI: Tr[rho' L_rho(rho')] through the metric superoperator.
inline double qfi_from_metric(const DensityMatrix& rho, const Observable& k) {
    return quantum_infinitesimal_distance_sq(rho, unitary_tangent(rho, k));
}

inline double variance(const DensityMatrix& rho, const Observable& k) {
    detail::require_same_dim(rho.dim(), k.dim(), "variance");
    const double mean = (rho.mat() * k.mat()).trace().real();
    const double second = (rho.mat() * k.mat() * k.mat()).trace().real();
    return std::max(second - mean * mean, 0.0);
}

struct QfiGap {
    double qfi;
    double bound;  // 4 variance / hbar^2

    double gap() const { return bound - qfi; }
};

inline QfiGap qfi_variance_gap(const DensityMatrix& rho, const Observable& k) {
    const double hb = hbar();
    return {qfi(rho, k), 4.0 * variance(rho, k) / (hb * hb)};
}

}  // namespace qsl

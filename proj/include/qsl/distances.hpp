// Statistical distances between classical distributions and quantum states.
//
// Classical side: the metric ds^2 = sum (dp_j)^2 / p_j on the open simplex and
// its finite geodesic through the amplitude embedding r_j = sqrt(p_j).
// Quantum side: the symmetrised-product superoperators R_rho / L_rho, the
// infinitesimal distance Tr[drho L_rho(drho)], the Wootters angle between pure
// states and the Bures angle arccos sqrt(F) built on Uhlmann fidelity.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qsl/linalg.hpp"

namespace qsl {

inline constexpr double kSimplexTol = 1e-12;
inline constexpr double kSupportTol = 1e-12;
inline constexpr double kTangentTol = 1e-10;
inline constexpr double kOffSupportTol = 1e-10;
inline constexpr double kNormTol = 1e-12;

class ProbDist {
public:
    explicit ProbDist(std::vector<double> probs) : probs_(std::move(probs)) {
        if (probs_.size() < 2) fail(ErrorKind::InvalidArgument, "ProbDist needs at least two outcomes");
        double sum = 0.0;
        for (double p : probs_) {
            if (!(p >= 0.0) || !std::isfinite(p)) fail(ErrorKind::InvalidArgument, "ProbDist entry negative or non-finite");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kSimplexTol) {
            fail(ErrorKind::InvalidArgument, "ProbDist does not sum to 1 (sum = " + std::to_string(sum) + ")");
        }
    }

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::span<const double> probs() const { return probs_; }

private:
    std::vector<double> probs_;
};

class PureState {
public:
    explicit PureState(Vector amps) : amps_(std::move(amps)) {
        if (amps_.size() < 1) fail(ErrorKind::InvalidState, "empty state vector");
        if (!amps_.allFinite()) fail(ErrorKind::InvalidState, "non-finite amplitudes");
        if (std::abs(amps_.norm() - 1.0) > kNormTol) {
            fail(ErrorKind::InvalidState, "state is not normalised (norm = " + std::to_string(amps_.norm()) + ")");
        }
    }

    static PureState normalized(Vector amps) {
        const double n = amps.norm();
        if (!(n > 0.0)) fail(ErrorKind::InvalidState, "cannot normalise the zero vector");
        return PureState(amps / n);
    }

    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
    const Vector& amps() const { return amps_; }
    Matrix projector() const { return amps_ * amps_.adjoint(); }

private:
    Vector amps_;
};

/// Validated density operator with its spectral decomposition cached.
class DensityMatrix {
public:
    explicit DensityMatrix(const Matrix& mat) {
        require_hermitian(mat, "DensityMatrix");
        mat_ = hermitian_part(mat);
        const double tr = mat_.trace().real();
        if (std::abs(tr - 1.0) > kNormTol) fail(ErrorKind::InvalidState, "trace is " + std::to_string(tr));
        spectrum_ = eigh(mat_);
        if (spectrum_.eigenvalues(0) < -kEigenClampTol) {
            fail(ErrorKind::NotPSD, "density matrix eigenvalue " + std::to_string(spectrum_.eigenvalues(0)));
        }
    }

    explicit DensityMatrix(const PureState& psi) : DensityMatrix(psi.projector()) { pure_ = psi.amps(); }

    std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
    const Matrix& mat() const { return mat_; }
    const SpectralDecomposition& spectrum() const { return spectrum_; }
    double purity() const { return (mat_ * mat_).trace().real(); }

    /// A state vector when the operator is rank one (largest eigenvalue within 1e-12 of 1).
    std::optional<Vector> pure_vector() const {
        if (pure_) return pure_;
        const auto n = spectrum_.eigenvalues.size();
        if (spectrum_.eigenvalues(n - 1) >= 1.0 - kNormTol) return Vector(spectrum_.eigenvectors.col(n - 1));
        return std::nullopt;
    }

private:
    Matrix mat_;
    SpectralDecomposition spectrum_;
    std::optional<Vector> pure_;
};

enum class DistanceConvention { FisherAngle, WoottersAngle };

/// Factor converting a Wootters-convention angle to the requested convention.
constexpr double convention_scale(DistanceConvention conv) {
    return conv == DistanceConvention::FisherAngle ? 2.0 : 1.0;
}

constexpr const char* to_string(DistanceConvention conv) {
    return conv == DistanceConvention::FisherAngle ? "fisher" : "wootters";
}

// ---------------------------------------------------------------- classical

inline double classical_infinitesimal_distance_sq(const ProbDist& p, std::span<const double> dp) {
    if (dp.size() != p.size()) fail(ErrorKind::LengthMismatch, "tangent length differs from distribution length");
    const double total = std::accumulate(dp.begin(), dp.end(), 0.0);
    if (std::abs(total) > kTangentTol) {
        fail(ErrorKind::OffSimplexTangent, "tangent components sum to " + std::to_string(total));
    }
    double ds2 = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] <= 0.0) {
            if (dp[j] != 0.0) fail(ErrorKind::DivergentDirection, "tangent leaves the support at outcome " + std::to_string(j));
            continue;
        }
        ds2 += dp[j] * dp[j] / p[j];
    }
    return ds2;
}

/// s = 2 arccos(sum sqrt(p_j q_j)), evaluated as twice the angle between the
/// amplitude vectors via atan2 so that nearby distributions keep full precision.
inline double classical_geodesic_distance(const ProbDist& p, const ProbDist& q) {
    if (p.size() != q.size()) fail(ErrorKind::LengthMismatch, "distributions have different lengths");
    double diff2 = 0.0;
    double sum2 = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double a = std::sqrt(p[j]);
        const double b = std::sqrt(q[j]);
        diff2 += (a - b) * (a - b);
        sum2 += (a + b) * (a + b);
    }
    return 4.0 * std::atan2(std::sqrt(diff2), std::sqrt(sum2));
}

// ---------------------------------------------------------------- quantum

namespace detail {
inline void require_same_dim(std::size_t a, std::size_t b, const char* where) {
    if (a != b) fail(ErrorKind::DimMismatch, std::string(where) + ": dimension " + std::to_string(a) + " vs " + std::to_string(b));
}

inline Matrix to_eigenbasis(const DensityMatrix& rho, const Matrix& b) {
    const Matrix& v = rho.spectrum().eigenvectors;
    return v.adjoint() * b * v;
}

inline Matrix from_eigenbasis(const DensityMatrix& rho, const Matrix& b) {
    const Matrix& v = rho.spectrum().eigenvectors;
    return v * b * v.adjoint();
}

/// Entries of b (in the eigenbasis of rho) weighted by w(p_j + p_k); rejects
/// weight outside the support of rho.
template <typename W>
Matrix weight_in_eigenbasis(const DensityMatrix& rho, const Matrix& b, W&& weight, bool reject_off_support) {
    const RealVector& p = rho.spectrum().eigenvalues;
    Matrix bt = to_eigenbasis(rho, b);
    for (Eigen::Index j = 0; j < bt.rows(); ++j) {
        for (Eigen::Index k = 0; k < bt.cols(); ++k) {
            const double s = p(j) + p(k);
            if (reject_off_support && s <= kSupportTol) {
                if (std::abs(bt(j, k)) > kOffSupportTol) {
                    fail(ErrorKind::OutsideSupport, "operator has weight " + std::to_string(std::abs(bt(j, k))) +
                                                        " outside the support of rho");
                }
                bt(j, k) = 0.0;
                continue;
            }
            bt(j, k) *= weight(s);
        }
    }
    return bt;
}
}  // namespace detail

/// R_rho(B) = (1/2){rho, B}, evaluated as (1/2)(p_j + p_k) B_jk in the eigenbasis of rho.
inline Matrix raising_superop(const DensityMatrix& rho, const Matrix& b) {
    require_hermitian(b, "raising_superop");
    detail::require_same_dim(rho.dim(), static_cast<std::size_t>(b.rows()), "raising_superop");
    const Matrix bt = detail::weight_in_eigenbasis(rho, b, [](double s) { return 0.5 * s; }, false);
    return hermitian_part(detail::from_eigenbasis(rho, bt));
}

/// L_rho(B) = R_rho^{-1}(B), entries 2 B_jk / (p_j + p_k) on the support of rho.
inline Matrix lowering_superop(const DensityMatrix& rho, const Matrix& b) {
    require_hermitian(b, "lowering_superop");
    detail::require_same_dim(rho.dim(), static_cast<std::size_t>(b.rows()), "lowering_superop");
    const Matrix bt = detail::weight_in_eigenbasis(rho, b, [](double s) { return 2.0 / s; }, true);
    return hermitian_part(detail::from_eigenbasis(rho, bt));
}

/// ds^2 = Tr[drho L_rho(drho)] = sum_jk 2 |drho_jk|^2 / (p_j + p_k).
inline double quantum_infinitesimal_distance_sq(const DensityMatrix& rho, const Matrix& drho) {
    require_hermitian(drho, "quantum_infinitesimal_distance_sq");
    detail::require_same_dim(rho.dim(), static_cast<std::size_t>(drho.rows()), "quantum_infinitesimal_distance_sq");
    const double tr = drho.trace().real();
    if (std::abs(tr) > kTangentTol) fail(ErrorKind::OffSimplexTangent, "drho has trace " + std::to_string(tr));
    const RealVector& p = rho.spectrum().eigenvalues;
    const Matrix dt = detail::to_eigenbasis(rho, drho);
    double ds2 = 0.0;
    for (Eigen::Index j = 0; j < dt.rows(); ++j) {
        for (Eigen::Index k = 0; k < dt.cols(); ++k) {
            const double s = p(j) + p(k);
            if (s <= kSupportTol) {
                if (std::abs(dt(j, k)) > kOffSupportTol) {
                    fail(ErrorKind::OutsideSupport, "drho has weight outside the support of rho");
                }
                continue;
            }
            ds2 += 2.0 * std::norm(dt(j, k)) / s;
        }
    }
    return ds2;
}

/// arccos |<psi|phi>|, computed as atan2(|phi_perp|, |<psi|phi>|).
inline double wootters_distance(const Vector& psi, const Vector& phi) {
    detail::require_same_dim(static_cast<std::size_t>(psi.size()), static_cast<std::size_t>(phi.size()), "wootters_distance");
    const cplx overlap = psi.dot(phi);
    const double perp = (phi - overlap * psi).norm();
    return std::atan2(perp, std::abs(overlap));
}

inline double wootters_distance(const PureState& psi, const PureState& phi) {
    return wootters_distance(psi.amps(), phi.amps());
}

/// F = [Tr sqrt(rho^{1/2} sigma rho^{1/2})]^2, clamped to [0, 1].
/// A rank-one argument short-circuits to <psi|other|psi>.
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    detail::require_same_dim(rho.dim(), sigma.dim(), "fidelity");
    double f = 0.0;
    if (const auto psi = rho.pure_vector()) {
        if (const auto phi = sigma.pure_vector()) {
            f = std::norm(psi->dot(*phi));
        } else {
            f = psi->dot(sigma.mat() * *psi).real();
        }
    } else if (const auto phi = sigma.pure_vector()) {
        f = phi->dot(rho.mat() * *phi).real();
    } else {
        const Matrix root = psd_sqrt(rho.mat());
        const Matrix inner = hermitian_part(root * sigma.mat() * root);
        const SpectralDecomposition sd = eigh(inner);
        // Eigenvalues at the rounding floor of the solver are zero; their square
        // roots would otherwise add O(1e-8) per null direction.
        const auto n = sd.eigenvalues.size();
        const double floor = 16.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
                             std::max(sd.eigenvalues(n - 1), 0.0);
        double tr = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (sd.eigenvalues(i) < -kEigenClampTol) fail(ErrorKind::NotPSD, "fidelity: negative eigenvalue");
            if (sd.eigenvalues(i) > floor) tr += std::sqrt(sd.eigenvalues(i));
        }
        f = tr * tr;
    }
    return std::clamp(f, 0.0, 1.0);
}

/// arccos sqrt(F) in [0, pi/2] (Wootters) or twice that (Fisher). Rank-one
/// pairs go through wootters_distance.
inline double bures_angle(const DensityMatrix& rho, const DensityMatrix& sigma,
                          DistanceConvention conv = DistanceConvention::WoottersAngle) {
    detail::require_same_dim(rho.dim(), sigma.dim(), "bures_angle");
    double angle = 0.0;
    const auto psi = rho.pure_vector();
    const auto phi = sigma.pure_vector();
    if (psi && phi) {
        angle = wootters_distance(*psi, *phi);
    } else {
        angle = std::acos(std::sqrt(fidelity(rho, sigma)));
    }
    return convention_scale(conv) * angle;
}

}  // namespace qsl

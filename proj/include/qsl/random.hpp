// Seeded sampling of states, generators and POVMs for property sweeps.
//
// The generator is std::mt19937_64 (whose output sequence is fixed by the
// standard). Uniform doubles take the top 53 bits of each draw and normals use
// Box-Muller, so a given seed yields the same samples on every platform.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "qsl/linalg.hpp"

namespace qsl {

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi].
    std::size_t index(std::size_t lo, std::size_t hi) {
        return lo + static_cast<std::size_t>(uniform() * static_cast<double>(hi - lo + 1));
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    cplx complex_normal() {
        const double re = normal();
        const double im = normal();
        return {re, im};
    }

    Matrix ginibre(std::size_t rows, std::size_t cols) {
        Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = complex_normal();
        return m;
    }

    Vector unit_vector(std::size_t dim) {
        Vector v = ginibre(dim, 1).col(0);
        return v / v.norm();
    }

    /// GUE-like Hermitian matrix with entries of order `scale`.
    Matrix hermitian(std::size_t dim, double scale = 1.0) {
        const Matrix a = ginibre(dim, dim);
        return hermitian_part(a) * scale;
    }

    /// Density matrix W W^dagger / Tr with W of shape dim x rank.
    Matrix density(std::size_t dim, std::size_t rank) {
        const Matrix w = ginibre(dim, rank);
        Matrix rho = w * w.adjoint();
        rho /= rho.trace().real();
        return hermitian_part(rho);
    }

    /// POVM E_j = S^{-1/2} A_j S^{-1/2} with A_j random PSD and S = sum A_j.
    std::vector<Matrix> povm(std::size_t dim, std::size_t outcomes) {
        std::vector<Matrix> parts;
        Matrix total = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (std::size_t j = 0; j < outcomes; ++j) {
            const Matrix w = ginibre(dim, dim);
            parts.push_back(hermitian_part(w * w.adjoint()));
            total += parts.back();
        }
        const SpectralDecomposition sd = eigh(hermitian_part(total));
        const Matrix inv_sqrt = spectral_apply(sd, [](double lambda) { return 1.0 / std::sqrt(lambda); });
        for (auto& e : parts) e = hermitian_part(inv_sqrt * e * inv_sqrt);
        return parts;
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Independent stream seed for trial `index` of a run seeded with `seed`
/// (splitmix64 finalizer), so parallel trials do not depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace qsl

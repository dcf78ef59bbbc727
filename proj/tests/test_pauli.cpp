#include <cmath>
#include <numbers>

#include "qsl/pauli.hpp"
#include "qsl/random.hpp"
#include "qsl/statevector.hpp"
#include "test_helpers.hpp"

using namespace qsl;

namespace {

constexpr double pi = std::numbers::pi;

// Dense single-qubit gate g acting on qubit q of n (qubit 0 leftmost).
Matrix embed(const Matrix& g, std::size_t q, std::size_t n) {
    Matrix out = Matrix::Identity(1, 1);
    for (std::size_t i = 0; i < n; ++i) out = kron(out, i == q ? g : identity(2));
    return out;
}

Matrix dense_cz(std::size_t a, std::size_t b, std::size_t n) {
    const std::size_t dim = std::size_t{1} << n;
    Matrix out = identity(dim);
    const std::size_t ma = std::size_t{1} << (n - 1 - a), mb = std::size_t{1} << (n - 1 - b);
    for (std::size_t i = 0; i < dim; ++i)
        if ((i & ma) && (i & mb)) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = -1.0;
    return out;
}

Matrix hadamard() {
    Matrix h(2, 2);
    h << 1, 1, 1, -1;
    return h / std::numbers::sqrt2;
}

Matrix phase_gate(double phi) {
    Matrix p = Matrix::Zero(2, 2);
    p(0, 0) = 1.0;
    p(1, 1) = std::exp(cplx(0.0, phi));
    return p;
}

PauliString random_string(Rng& rng, std::size_t n) {
    PauliString p(n);
    for (std::size_t q = 0; q < n; ++q) p.set(q, static_cast<PauliLetter>(rng.index(0, 3)));
    return p;
}

PauliSum random_sum(Rng& rng, std::size_t n, int terms) {
    PauliSum s(n);
    for (int i = 0; i < terms; ++i) s.add(random_string(rng, n), rng.complex_normal());
    return s;
}

}  // namespace

TEST(PauliString, ParseAndPrint) {
    const auto p = PauliString::parse("XIZY");
    EXPECT_EQ(p.num_qubits(), 4U);
    EXPECT_EQ(p.str(), "XIZY");
    EXPECT_EQ(p.weight(), 3U);
    EXPECT_FALSE(p.is_diagonal());
    EXPECT_TRUE(PauliString::parse("ZIZ").is_diagonal());
    EXPECT_TRUE(PauliString::parse("III").is_identity());
    EXPECT_QSL_ERROR(PauliString::parse("XQ"), ErrorKind::ParseError);
}

TEST(PauliString, TooManyQubits) {
    EXPECT_QSL_ERROR(PauliString(65), ErrorKind::TooManyQubits);
}

TEST(PauliString, SingleQubitMultiplicationTable) {
    const char* letters = "IXYZ";
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const auto pa = PauliString::parse(std::string(1, letters[a]));
            const auto pb = PauliString::parse(std::string(1, letters[b]));
            const auto [phase, r] = multiply(pa, pb);
            const Matrix expect = pa.to_matrix() * pb.to_matrix();
            EXPECT_LT((phase * r.to_matrix() - expect).norm(), 1e-15) << letters[a] << letters[b];
        }
    }
    const auto [ph, r] = multiply(PauliString::parse("X"), PauliString::parse("Y"));
    EXPECT_EQ(r.str(), "Z");
    EXPECT_EQ(ph, cplx(0.0, 1.0));
}

TEST(PauliString, MultiplyMatchesDenseRandom) {
    Rng rng(81);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.index(0, 3);
        const auto a = random_string(rng, n), b = random_string(rng, n);
        const auto [phase, r] = multiply(a, b);
        EXPECT_LT((phase * r.to_matrix() - a.to_matrix() * b.to_matrix()).norm(), 1e-13);
        const Matrix comm = a.to_matrix() * b.to_matrix() - b.to_matrix() * a.to_matrix();
        EXPECT_EQ(a.commutes_with(b), comm.norm() < 1e-12);
    }
}

TEST(PauliSum, AlgebraMatchesDense) {
    Rng rng(82);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.index(0, 2);
        const auto a = random_sum(rng, n, 4), b = random_sum(rng, n, 4);
        const Matrix ma = a.to_matrix(), mb = b.to_matrix();
        EXPECT_LT(((a + b).to_matrix() - (ma + mb)).norm(), 1e-12);
        EXPECT_LT(((a * b).to_matrix() - ma * mb).norm(), 1e-12);
        EXPECT_LT((commutator(a, b).to_matrix() - (ma * mb - mb * ma)).norm(), 1e-12);
        // Hilbert-Schmidt inner product normalized by dimension.
        const double dim = std::pow(2.0, static_cast<double>(n));
        EXPECT_NEAR(std::abs(inner(a, b) - (ma.adjoint() * mb).trace() / dim), 0.0, 1e-12);
        EXPECT_NEAR(a.norm_sq(), ma.squaredNorm() / dim, 1e-12);
    }
}

TEST(PauliSum, PrunesCancelledTerms) {
    PauliSum s(2);
    s.add(PauliString::parse("XZ"), 0.5);
    s.add(PauliString::parse("XZ"), -0.5);
    EXPECT_TRUE(s.empty());
    EXPECT_QSL_ERROR(s.add(PauliString::parse("X"), 1.0), ErrorKind::DimMismatch);
}

TEST(Rotate, MatchesDenseConjugation) {
    Rng rng(83);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.index(0, 2);
        const auto s = random_sum(rng, n, 5);
        const auto p = random_string(rng, n);
        const double alpha = rng.uniform(-pi, pi);
        const Matrix u = expm_unitary(p.to_matrix(), alpha * hbar());  // exp(-i alpha P)
        const Matrix expect = u * s.to_matrix() * u.adjoint();
        EXPECT_LT((rotate(s, p, alpha).to_matrix() - expect).norm(), 1e-12);
    }
}

TEST(Conjugation, HadamardRules) {
    const PauliSum x(PauliString::parse("X")), y(PauliString::parse("Y")), z(PauliString::parse("Z"));
    EXPECT_EQ(conjugate_hadamard(x, 0).str(), z.str());
    EXPECT_EQ(conjugate_hadamard(z, 0).str(), x.str());
    EXPECT_LT(distance(conjugate_hadamard(y, 0), y * cplx(-1.0)), 1e-15);
}

TEST(Conjugation, CzRules) {
    // X_a -> X_a Z_b, Z unchanged.
    const PauliSum xi(PauliString::parse("XI"));
    EXPECT_LT(distance(conjugate_cz(xi, 0, 1), PauliSum(PauliString::parse("XZ"))), 1e-15);
    const PauliSum zi(PauliString::parse("ZI"));
    EXPECT_LT(distance(conjugate_cz(zi, 0, 1), zi), 1e-15);
}

TEST(Conjugation, PhaseRule) {
    const double phi = 0.37;
    const PauliSum x(PauliString::parse("X"));
    PauliSum expect(1);
    expect.add(PauliString::parse("X"), std::cos(phi));
    expect.add(PauliString::parse("Y"), std::sin(phi));
    EXPECT_LT(distance(conjugate_phase(x, 0, phi), expect), 1e-15);
}

TEST(Conjugation, AllGatesMatchDense) {
    Rng rng(84);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng.index(0, 1);
        const auto s = random_sum(rng, n, 5);
        const std::size_t a = rng.index(0, n - 1);
        std::size_t b = rng.index(0, n - 2);
        if (b >= a) ++b;
        const double phi = rng.uniform(-pi, pi);
        const Matrix h = embed(hadamard(), a, n), cz = dense_cz(a, b, n), ph = embed(phase_gate(phi), a, n);
        const Matrix m = s.to_matrix();
        EXPECT_LT((conjugate_hadamard(s, a).to_matrix() - h * m * h.adjoint()).norm(), 1e-12);
        EXPECT_LT((conjugate_cz(s, a, b).to_matrix() - cz * m * cz.adjoint()).norm(), 1e-12);
        EXPECT_LT((conjugate_phase(s, a, phi).to_matrix() - ph * m * ph.adjoint()).norm(), 1e-12);
    }
}

TEST(ReduceByStabilizers, ActsIdenticallyOnStabilizedState) {
    // |+>^{n} is stabilized by every X_j; reducing X_0 X_1 by X_1 gives X_0.
    PauliSum s(2);
    s.add(PauliString::parse("XX"), 0.6);
    s.add(PauliString::parse("YX"), 0.8);
    const auto red = reduce_by_stabilizers(s, {PauliString::single(2, 1, PauliLetter::X)});
    PauliSum expect(2);
    expect.add(PauliString::parse("XI"), 0.6);
    expect.add(PauliString::parse("YI"), 0.8);
    EXPECT_LT(distance(red, expect), 1e-15);

    const auto plus = StateVector::plus_state(2);
    const auto a = plus.applied(s), b = plus.applied(red);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(std::abs(a[i] - b[i]), 1e-15);
    EXPECT_QSL_ERROR(reduce_by_stabilizers(s, {PauliString::parse("XX")}), ErrorKind::InvalidArgument);
}

TEST(DiagonalHamiltonian, HeisenbergMatchesDense) {
    Rng rng(85);
    for (double hb : {1.0, 0.5}) {
        const ScopedHbar units(hb);
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t n = 2 + rng.index(0, 1);
            PauliSum h(n);
            for (int i = 0; i < 4; ++i) {
                PauliString p(n);
                for (std::size_t q = 0; q < n; ++q)
                    if (rng.uniform() < 0.5) p.set(q, PauliLetter::Z);
                h.add(p, rng.normal());
            }
            const DiagonalHamiltonian ham(h);
            const auto s = random_sum(rng, n, 4);
            const double t = rng.uniform(-3.0, 3.0);
            const Matrix u = expm_unitary(h.to_matrix(), t);
            EXPECT_LT((ham.heisenberg(s, t).to_matrix() - u.adjoint() * s.to_matrix() * u).norm(), 1e-11);
            const Matrix hm = h.to_matrix(), sm = s.to_matrix();
            const Matrix deriv = cplx(0.0, 1.0 / hb) * (hm * sm - sm * hm);
            EXPECT_LT((ham.time_derivative(s).to_matrix() - deriv).norm(), 1e-11);
        }
    }
}

TEST(DiagonalHamiltonian, RejectsNonDiagonal) {
    EXPECT_QSL_ERROR(DiagonalHamiltonian(PauliSum(PauliString::parse("XZ"))), ErrorKind::InvalidArgument);
}

TEST(StateVector, GatesMatchDense) {
    Rng rng(86);
    const std::size_t n = 3;
    for (int trial = 0; trial < 20; ++trial) {
        StateVector sv = StateVector::plus_state(n);
        Vector dense = Vector::Constant(8, cplx(1.0 / std::sqrt(8.0), 0.0));
        for (int g = 0; g < 6; ++g) {
            const std::size_t a = rng.index(0, n - 1);
            std::size_t b = rng.index(0, n - 2);
            if (b >= a) ++b;
            switch (rng.index(0, 2)) {
                case 0: sv.apply_h(a); dense = embed(hadamard(), a, n) * dense; break;
                case 1: sv.apply_cz(a, b); dense = dense_cz(a, b, n) * dense; break;
                default: {
                    const double phi = rng.uniform(-pi, pi);
                    sv.apply_phase(a, phi);
                    dense = embed(phase_gate(phi), a, n) * dense;
                }
            }
        }
        for (std::size_t i = 0; i < 8; ++i) EXPECT_LT(std::abs(sv[i] - dense(static_cast<Eigen::Index>(i))), 1e-14);
        const auto p = random_string(rng, n);
        const auto ap = sv.applied(p);
        const Vector dp = p.to_matrix() * dense;
        for (std::size_t i = 0; i < 8; ++i) EXPECT_LT(std::abs(ap[i] - dp(static_cast<Eigen::Index>(i))), 1e-14);
    }
}

TEST(StateVector, PlusStateStabilizers) {
    const auto plus = StateVector::plus_state(4);
    for (std::size_t q = 0; q < 4; ++q) {
        EXPECT_LT(plus.stabilizer_residual(PauliSum(PauliString::single(4, q, PauliLetter::X))), 1e-15);
        EXPECT_GT(plus.stabilizer_residual(PauliSum(PauliString::single(4, q, PauliLetter::Z))), 1.0);
    }
    EXPECT_QSL_ERROR(StateVector(23), ErrorKind::TooManyQubits);
}

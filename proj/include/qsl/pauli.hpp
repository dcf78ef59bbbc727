// Pauli strings and real/complex linear combinations of them.
//
// A PauliString stores its letters as x/z bit masks (bit q = qubit q, so at
// most 64 qubits): X = (1,0), Z = (0,1), Y = (1,1). Products carry an explicit
// phase in {1, i, -1, -i}. PauliSum keeps one complex coefficient per distinct
// pattern; Hermitian operators have real coefficients.
#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qsl/linalg.hpp"

namespace qsl {

enum class PauliLetter : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

class PauliString {
public:
    PauliString() = default;
    explicit PauliString(std::size_t num_qubits) : n_(num_qubits) {
        if (num_qubits == 0) fail(ErrorKind::InvalidArgument, "PauliString needs at least one qubit");
        if (num_qubits > 64) fail(ErrorKind::TooManyQubits, "PauliString supports at most 64 qubits");
    }

    /// Parses letters qubit 0 first, e.g. "XIZ" = X_0 Z_2.
    static PauliString parse(std::string_view letters) {
        PauliString p(letters.size());
        for (std::size_t q = 0; q < letters.size(); ++q) {
            switch (letters[q]) {
                case 'I': break;
                case 'X': p.set(q, PauliLetter::X); break;
                case 'Y': p.set(q, PauliLetter::Y); break;
                case 'Z': p.set(q, PauliLetter::Z); break;
                default: fail(ErrorKind::ParseError, std::string("bad Pauli letter '") + letters[q] + "'");
            }
        }
        return p;
    }

    static PauliString single(std::size_t num_qubits, std::size_t q, PauliLetter letter) {
        PauliString p(num_qubits);
        p.set(q, letter);
        return p;
    }

    std::size_t num_qubits() const { return n_; }
    std::uint64_t x_mask() const { return x_; }
    std::uint64_t z_mask() const { return z_; }
    std::size_t weight() const { return static_cast<std::size_t>(std::popcount(x_ | z_)); }
    bool is_identity() const { return (x_ | z_) == 0; }
    bool is_diagonal() const { return x_ == 0; }

    PauliLetter letter(std::size_t q) const {
        check(q);
        const unsigned bits = static_cast<unsigned>((x_ >> q) & 1U) | (static_cast<unsigned>((z_ >> q) & 1U) << 1U);
        return static_cast<PauliLetter>(bits);
    }

    void set(std::size_t q, PauliLetter letter) {
        check(q);
        const auto bits = static_cast<unsigned>(letter);
        const std::uint64_t m = std::uint64_t{1} << q;
        x_ = (bits & 1U) ? (x_ | m) : (x_ & ~m);
        z_ = (bits & 2U) ? (z_ | m) : (z_ & ~m);
    }

    bool commutes_with(const PauliString& o) const {
        return std::popcount((x_ & o.z_) ^ (z_ & o.x_)) % 2 == 0;
    }

    std::string str() const {
        std::string s(n_, 'I');
        for (std::size_t q = 0; q < n_; ++q) s[q] = "IXZY"[static_cast<unsigned>(letter(q))];
        return s;
    }

    auto operator<=>(const PauliString&) const = default;

    /// Dense matrix; qubit 0 is the most significant tensor factor.
    Matrix to_matrix() const {
        Matrix m = Matrix::Identity(1, 1);
        for (std::size_t q = 0; q < n_; ++q) {
            switch (letter(q)) {
                case PauliLetter::I: m = kron(m, pauli_matrix::I()); break;
                case PauliLetter::X: m = kron(m, pauli_matrix::X()); break;
                case PauliLetter::Y: m = kron(m, pauli_matrix::Y()); break;
                case PauliLetter::Z: m = kron(m, pauli_matrix::Z()); break;
            }
        }
        return m;
    }

private:
    void check(std::size_t q) const {
        if (q >= n_) fail(ErrorKind::IndexOutOfRange, "qubit " + std::to_string(q) + " of " + std::to_string(n_));
    }

    std::size_t n_ = 0;
    std::uint64_t x_ = 0;
    std::uint64_t z_ = 0;
};

/// a * b = phase * result.
inline std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b) {
    if (a.num_qubits() != b.num_qubits()) fail(ErrorKind::DimMismatch, "Pauli strings on different qubit counts");
    // Per-qubit phase exponent (powers of i) for letters ordered I, X, Z, Y.
    static constexpr int table[4][4] = {
        {0, 0, 0, 0},  // I * {I,X,Z,Y}
        {0, 0, 3, 1},  // X * {I,X,Z,Y}: XZ = -iY, XY = iZ
        {0, 1, 0, 3},  // Z * {I,X,Z,Y}: ZX = iY, ZY = -iX
        {0, 3, 1, 0},  // Y * {I,X,Z,Y}: YX = -iZ, YZ = iX
    };
    int power = 0;
    for (std::size_t q = 0; q < a.num_qubits(); ++q) {
        power += table[static_cast<unsigned>(a.letter(q))][static_cast<unsigned>(b.letter(q))];
    }
    PauliString out(a.num_qubits());
    for (std::size_t q = 0; q < a.num_qubits(); ++q) {
        const unsigned bits = static_cast<unsigned>(a.letter(q)) ^ static_cast<unsigned>(b.letter(q));
        out.set(q, static_cast<PauliLetter>(bits));
    }
    static const cplx phases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return {phases[power % 4], out};
}

inline constexpr double kPauliPruneTol = 1e-14;

class PauliSum {
public:
    using Terms = std::map<PauliString, cplx>;

    PauliSum() = default;
    explicit PauliSum(std::size_t num_qubits) : n_(num_qubits) {}
    PauliSum(const PauliString& p, cplx coeff = 1.0) : n_(p.num_qubits()) { add(p, coeff); }

    std::size_t num_qubits() const { return n_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    void add(const PauliString& p, cplx coeff) {
        if (n_ == 0) n_ = p.num_qubits();
        if (p.num_qubits() != n_) fail(ErrorKind::DimMismatch, "PauliSum term on a different qubit count");
        auto [it, inserted] = terms_.try_emplace(p, coeff);
        if (!inserted) {
            it->second += coeff;
            if (std::abs(it->second) <= kPauliPruneTol) terms_.erase(it);
        } else if (std::abs(coeff) <= kPauliPruneTol) {
            terms_.erase(it);
        }
    }

    cplx coefficient(const PauliString& p) const {
        const auto it = terms_.find(p);
        return it == terms_.end() ? cplx(0.0) : it->second;
    }

    PauliSum& operator+=(const PauliSum& o) {
        for (const auto& [p, c] : o.terms_) add(p, c);
        return *this;
    }
    PauliSum& operator-=(const PauliSum& o) {
        for (const auto& [p, c] : o.terms_) add(p, -c);
        return *this;
    }
    PauliSum& operator*=(cplx s) {
        Terms next;
        for (const auto& [p, c] : terms_)
            if (std::abs(c * s) > kPauliPruneTol) next.emplace(p, c * s);
        terms_ = std::move(next);
        return *this;
    }

    friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
    friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
    friend PauliSum operator*(PauliSum a, cplx s) { return a *= s; }
    friend PauliSum operator*(cplx s, PauliSum a) { return a *= s; }

    friend PauliSum operator*(const PauliSum& a, const PauliSum& b) {
        PauliSum out(a.n_ ? a.n_ : b.n_);
        for (const auto& [pa, ca] : a.terms_) {
            for (const auto& [pb, cb] : b.terms_) {
                const auto [phase, p] = multiply(pa, pb);
                out.add(p, phase * ca * cb);
            }
        }
        return out;
    }

    /// Sum of |c|^2, i.e. Tr(A^dagger A) / 2^n.
    double norm_sq() const {
        double s = 0.0;
        for (const auto& [p, c] : terms_) s += std::norm(c);
        return s;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& [p, c] : terms_) m = std::max(m, std::abs(c));
        return m;
    }

    bool is_hermitian(double tol = 1e-12) const {
        for (const auto& [p, c] : terms_)
            if (std::abs(c.imag()) > tol) return false;
        return true;
    }

    Matrix to_matrix() const {
        const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_);
        Matrix m = Matrix::Zero(dim, dim);
        for (const auto& [p, c] : terms_) m += c * p.to_matrix();
        return m;
    }

    std::string str() const {
        std::string s;
        for (const auto& [p, c] : terms_) {
            if (!s.empty()) s += " + ";
            s += "(" + std::to_string(c.real());
            if (c.imag() != 0.0) s += (c.imag() < 0 ? "-" : "+") + std::to_string(std::abs(c.imag())) + "i";
            s += ")" + p.str();
        }
        return s.empty() ? "0" : s;
    }

private:
    std::size_t n_ = 0;
    Terms terms_;
};

/// <a, b> = sum conj(a_P) b_P (normalised Hilbert-Schmidt product).
inline cplx inner(const PauliSum& a, const PauliSum& b) {
    cplx s = 0.0;
    for (const auto& [p, c] : a.terms()) s += std::conj(c) * b.coefficient(p);
    return s;
}

inline double distance(const PauliSum& a, const PauliSum& b) { return std::sqrt((a - b).norm_sq()); }

inline PauliSum commutator(const PauliSum& a, const PauliSum& b) { return a * b - b * a; }

// ---------------------------------------------------------------- conjugations

/// exp(-i alpha P) S exp(i alpha P) for a Pauli string P. Terms anticommuting
/// with P map to cos(2 alpha) Q + i sin(2 alpha) Q P.
inline PauliSum rotate(const PauliSum& s, const PauliString& p, double alpha) {
    PauliSum out(s.num_qubits());
    const double c2 = std::cos(2.0 * alpha);
    const double s2 = std::sin(2.0 * alpha);
    for (const auto& [q, c] : s.terms()) {
        if (q.commutes_with(p)) {
            out.add(q, c);
            continue;
        }
        out.add(q, c * c2);
        const auto [phase, qp] = multiply(q, p);
        out.add(qp, c * cplx(0.0, s2) * phase);
    }
    return out;
}

/// H_q S H_q.
inline PauliSum conjugate_hadamard(const PauliSum& s, std::size_t q) {
    PauliSum out(s.num_qubits());
    for (const auto& [p, c] : s.terms()) {
        PauliString r = p;
        cplx coeff = c;
        switch (p.letter(q)) {
            case PauliLetter::X: r.set(q, PauliLetter::Z); break;
            case PauliLetter::Z: r.set(q, PauliLetter::X); break;
            case PauliLetter::Y: coeff = -coeff; break;
            case PauliLetter::I: break;
        }
        out.add(r, coeff);
    }
    return out;
}

/// CZ S CZ^dagger, using CZ = exp(i pi/4 (I - Z_a - Z_b + Z_a Z_b)).
inline PauliSum conjugate_cz(const PauliSum& s, std::size_t a, std::size_t b) {
    const std::size_t n = s.num_qubits();
    PauliString zz(n);
    zz.set(a, PauliLetter::Z);
    zz.set(b, PauliLetter::Z);
    PauliSum out = rotate(s, zz, -std::numbers::pi / 4.0);
    out = rotate(out, PauliString::single(n, a, PauliLetter::Z), std::numbers::pi / 4.0);
    return rotate(out, PauliString::single(n, b, PauliLetter::Z), std::numbers::pi / 4.0);
}

/// P S P^dagger for the phase gate P = diag(1, e^{i phi}) = e^{i phi/2} exp(-i phi Z / 2).
inline PauliSum conjugate_phase(const PauliSum& s, std::size_t q, double phi) {
    return rotate(s, PauliString::single(s.num_qubits(), q, PauliLetter::Z), phi / 2.0);
}

/// Replaces each term T by T * G for every single-qubit stabilizer G whose
/// letter T carries on that qubit. Right-multiplying by a stabilizer leaves
/// the action on the stabilized state unchanged.
inline PauliSum reduce_by_stabilizers(const PauliSum& s, const std::vector<PauliString>& single_qubit_stabilizers) {
    PauliSum out(s.num_qubits());
    for (const auto& [p, c] : s.terms()) {
        PauliString cur = p;
        cplx coeff = c;
        for (const auto& g : single_qubit_stabilizers) {
            if (g.weight() != 1) fail(ErrorKind::InvalidArgument, "reduce_by_stabilizers expects weight-one stabilizers");
            const auto q = static_cast<std::size_t>(std::countr_zero(g.x_mask() | g.z_mask()));
            if (cur.letter(q) != g.letter(q)) continue;
            const auto [phase, next] = multiply(cur, g);
            cur = next;
            coeff *= phase;
        }
        out.add(cur, coeff);
    }
    return out;
}

// ---------------------------------------------------------------- Heisenberg evolution

/// Hamiltonian made of commuting Z-type strings (computational-basis diagonal).
class DiagonalHamiltonian {
public:
    explicit DiagonalHamiltonian(PauliSum h) : h_(std::move(h)) {
        for (const auto& [p, c] : h_.terms()) {
            if (!p.is_diagonal()) fail(ErrorKind::InvalidArgument, "DiagonalHamiltonian term " + p.str() + " is not Z-type");
            if (std::abs(c.imag()) > 1e-14) fail(ErrorKind::NotHermitian, "DiagonalHamiltonian needs real coefficients");
        }
    }

    const PauliSum& terms() const { return h_; }

    /// S(t) = U^dagger S U with U = exp(-i H t / hbar).
    PauliSum heisenberg(const PauliSum& s, double t) const {
        PauliSum out = s;
        const double hb = hbar();
        for (const auto& [p, c] : h_.terms()) {
            if (p.is_identity()) continue;
            out = rotate(out, p, -c.real() * t / hb);
        }
        return out;
    }

    /// dS/dt = (i/hbar) [H, S].
    PauliSum time_derivative(const PauliSum& s) const {
        return commutator(h_, s) * cplx(0.0, 1.0 / hbar());
    }

private:
    PauliSum h_;
};

}  // namespace qsl

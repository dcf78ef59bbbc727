// Qubit statevector with the handful of gates the counterexample circuit
// needs. Qubit 0 is the most significant bit of the basis index.
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "qsl/pauli.hpp"

namespace qsl {

inline constexpr std::size_t kMaxStatevectorQubits = 22;

class StateVector {
public:
    /// |+>^{n}.
    static StateVector plus_state(std::size_t num_qubits) {
        StateVector s(num_qubits);
        const double a = std::pow(2.0, -0.5 * static_cast<double>(num_qubits));
        std::fill(s.amps_.begin(), s.amps_.end(), cplx(a, 0.0));
        return s;
    }

    explicit StateVector(std::size_t num_qubits) : n_(num_qubits) {
        if (num_qubits == 0 || num_qubits > kMaxStatevectorQubits) {
            fail(ErrorKind::TooManyQubits, "statevector supports 1.." + std::to_string(kMaxStatevectorQubits) + " qubits");
        }
        amps_.assign(std::size_t{1} << n_, cplx(0.0));
        amps_[0] = 1.0;
    }

    std::size_t num_qubits() const { return n_; }
    std::size_t size() const { return amps_.size(); }
    const std::vector<cplx>& amps() const { return amps_; }
    cplx operator[](std::size_t i) const { return amps_[i]; }

    std::uint64_t bit(std::size_t q) const { return std::uint64_t{1} << (n_ - 1 - q); }

    void apply_h(std::size_t q) {
        const std::uint64_t m = bit(q);
        const double r = 1.0 / std::numbers::sqrt2;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & m) continue;
            const cplx a = amps_[i];
            const cplx b = amps_[i | m];
            amps_[i] = r * (a + b);
            amps_[i | m] = r * (a - b);
        }
    }

    void apply_cz(std::size_t a, std::size_t b) {
        const std::uint64_t m = bit(a) | bit(b);
        for (std::size_t i = 0; i < amps_.size(); ++i)
            if ((i & m) == m) amps_[i] = -amps_[i];
    }

    /// diag(1, e^{i phi}) on qubit q.
    void apply_phase(std::size_t q, double phi) {
        const std::uint64_t m = bit(q);
        const cplx w = std::exp(cplx(0.0, phi));
        for (std::size_t i = 0; i < amps_.size(); ++i)
            if (i & m) amps_[i] *= w;
    }

    /// P |psi>.
    StateVector applied(const PauliString& p) const {
        if (p.num_qubits() != n_) fail(ErrorKind::DimMismatch, "Pauli string and state differ in qubit count");
        std::uint64_t xm = 0;
        std::uint64_t zm = 0;
        for (std::size_t q = 0; q < n_; ++q) {
            const auto l = static_cast<unsigned>(p.letter(q));
            if (l & 1U) xm |= bit(q);
            if (l & 2U) zm |= bit(q);
        }
        static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        const cplx phase = ipow[std::popcount(xm & zm) % 4];
        StateVector out(*this);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            const double sign = (std::popcount(i & zm) % 2) ? -1.0 : 1.0;
            out.amps_[i ^ xm] = phase * sign * amps_[i];
        }
        return out;
    }

    /// A |psi> for a Pauli sum A.
    std::vector<cplx> applied(const PauliSum& a) const {
        std::vector<cplx> out(amps_.size(), cplx(0.0));
        for (const auto& [p, c] : a.terms()) {
            const StateVector t = applied(p);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * t.amps_[i];
        }
        return out;
    }

    /// || A|psi> - |psi> ||.
    double stabilizer_residual(const PauliSum& a) const {
        const auto v = applied(a);
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += std::norm(v[i] - amps_[i]);
        return std::sqrt(s);
    }

    /// Reduced density matrix of qubit q.
    Matrix reduced_qubit(std::size_t q) const {
        const std::uint64_t m = bit(q);
        Matrix rho = Matrix::Zero(2, 2);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & m) continue;
            const cplx a0 = amps_[i];
            const cplx a1 = amps_[i | m];
            rho(0, 0) += std::norm(a0);
            rho(1, 1) += std::norm(a1);
            rho(0, 1) += a0 * std::conj(a1);
        }
        rho(1, 0) = std::conj(rho(0, 1));
        return rho;
    }

    /// Norm of (<bra|_q (x) I)|psi>. Avoids the cancellation of forming <bra|rho|bra>.
    double projected_norm(std::size_t q, cplx bra0, cplx bra1) const {
        const std::uint64_t m = bit(q);
        double s = 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & m) continue;
            s += std::norm(std::conj(bra0) * amps_[i] + std::conj(bra1) * amps_[i | m]);
        }
        return std::sqrt(s);
    }

    /// Probability that qubits other than q are all in |+>.
    double plus_overlap_excluding(std::size_t q) const {
        const std::uint64_t m = bit(q);
        const double norm = std::pow(2.0, -0.5 * static_cast<double>(n_ - 1));
        cplx a0 = 0.0;
        cplx a1 = 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & m) a1 += amps_[i];
            else a0 += amps_[i];
        }
        return std::norm(a0 * norm) + std::norm(a1 * norm);
    }

private:
    std::size_t n_;
    std::vector<cplx> amps_;
};

}  // namespace qsl

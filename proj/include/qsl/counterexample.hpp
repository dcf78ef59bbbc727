// Non-unitary speed-limit violation: a central qubit (gap e0) is entangled
// with n satellite qubits (gap eq) by CZ gates, the satellites pick up phases
// phi, and a second CZ layer disentangles them. The central qubit ends up
// rotated by n*phi about Z, so n*phi = pi makes it orthogonal to its initial
// |+> state after a time tau = 2 t_cz + 2 t_h + t_phi that can undercut the
// unitary limit pi*hbar/e0.
//
// Three views are provided: a statevector run of the gate circuit, symbolic
// stabilizer generators after each of the six stages (a)-(f), and continuous
// Heisenberg evolution of the generators under H = g sum_j (I - Z_0)(I - Z_j).
#pragma once

#include <array>
#include <limits>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qsl/distances.hpp"
#include "qsl/statevector.hpp"

namespace qsl {

inline constexpr std::size_t kMaxCounterexampleSatellites = 20;
inline constexpr std::size_t kMaxStageCheckSatellites = 12;
inline constexpr double kStageTol = 1e-10;

struct CounterexampleParams {
    double e0 = 1.0;   // central-qubit gap
    double eq = 3.0;   // satellite gap
    double g = 6.0;    // CZ coupling
    std::size_t n = 8;  // satellites
    double phi = std::numbers::pi / 8.0;

    /// Parameters with phi = pi / n.
    static CounterexampleParams canonical(double e0, double eq, double g, std::size_t n) {
        return {e0, eq, g, n, std::numbers::pi / static_cast<double>(n)};
    }

    void validate() const {
        if (!(e0 > 0.0) || !(eq > 0.0) || !(g > 0.0)) fail(ErrorKind::InvalidArgument, "e0, eq and g must be positive");
        if (n == 0) fail(ErrorKind::InvalidArgument, "need at least one satellite");
        if (!std::isfinite(phi)) fail(ErrorKind::InvalidArgument, "phi must be finite");
    }

    bool orthogonalizing(double tol = 1e-12) const {
        return std::abs(static_cast<double>(n) * phi - std::numbers::pi) <= tol;
    }
};

struct ScheduleTiming {
    double t_cz = 0.0;
    double t_h = 0.0;
    double t_phi = 0.0;
    double tau = 0.0;
};

/// Which CZ gate time enters the budget: pi*hbar/g as stated for the scheme,
/// or the first return time measured from the Heisenberg trajectory.
enum class CzConstant { Stated, Measured };

constexpr const char* to_string(CzConstant c) { return c == CzConstant::Stated ? "stated" : "measured"; }

// ---------------------------------------------------------------- stabilizers

struct StabilizerStage {
    char label;
    std::vector<PauliSum> generators;  // [0] = S_0 (central), [j] = S_j
    std::optional<PauliSum> s0_unreduced;  // stage (f) only: S_0 before reduction by the S_j
};

namespace detail {
inline PauliSum single(std::size_t nq, std::size_t q, PauliLetter l) { return PauliSum(PauliString::single(nq, q, l)); }

template <typename F>
std::vector<PauliSum> map_all(const std::vector<PauliSum>& gens, F&& f) {
    std::vector<PauliSum> out;
    out.reserve(gens.size());
    for (const auto& s : gens) out.push_back(f(s));
    return out;
}
}  // namespace detail

/// Generators after each stage: (a) |+>^{n+1}, (b) CZ(0,j), (c) H on satellites,
/// (d) phase diag(1, e^{i phi}) on satellites, (e) H on satellites, (f) CZ(0,j).
/// Stage (f) reports S_0 reduced by the satellite stabilizers X_j, which gives
/// cos(n phi) X_0 + sin(n phi) Y_0.
inline std::vector<StabilizerStage> stabilizer_stage_sequence(std::size_t n, double phi) {
    if (n == 0) fail(ErrorKind::InvalidArgument, "need at least one satellite");
    if (n + 1 > 64) fail(ErrorKind::TooManyQubits, "stabilizer tracking supports at most 63 satellites");
    const std::size_t nq = n + 1;
    std::vector<PauliSum> gens;
    for (std::size_t q = 0; q < nq; ++q) gens.push_back(detail::single(nq, q, PauliLetter::X));

    const auto cz_layer = [&](const PauliSum& s) {
        PauliSum out = s;
        for (std::size_t j = 1; j < nq; ++j) out = conjugate_cz(out, 0, j);
        return out;
    };
    const auto h_layer = [&](const PauliSum& s) {
        PauliSum out = s;
        for (std::size_t j = 1; j < nq; ++j) out = conjugate_hadamard(out, j);
        return out;
    };
    const auto phase_layer = [&](const PauliSum& s) {
        PauliSum out = s;
        for (std::size_t j = 1; j < nq; ++j) out = conjugate_phase(out, j, phi);
        return out;
    };

    std::vector<StabilizerStage> stages;
    stages.push_back({'a', gens, std::nullopt});
    gens = detail::map_all(gens, cz_layer);
    stages.push_back({'b', gens, std::nullopt});
    gens = detail::map_all(gens, h_layer);
    stages.push_back({'c', gens, std::nullopt});
    gens = detail::map_all(gens, phase_layer);
    stages.push_back({'d', gens, std::nullopt});
    gens = detail::map_all(gens, h_layer);
    stages.push_back({'e', gens, std::nullopt});
    gens = detail::map_all(gens, cz_layer);

    std::vector<PauliString> satellites;
    for (std::size_t j = 1; j < nq; ++j) {
        const PauliString xj = PauliString::single(nq, j, PauliLetter::X);
        if (gens[j].size() != 1 || std::abs(gens[j].coefficient(xj) - cplx(1.0)) > kStageTol) {
            fail(ErrorKind::CrossCheckMismatch, "satellite generator " + std::to_string(j) + " did not return to X_j");
        }
        satellites.push_back(xj);
    }
    StabilizerStage f{'f', gens, gens[0]};
    f.generators[0] = reduce_by_stabilizers(gens[0], satellites);
    stages.push_back(std::move(f));
    return stages;
}

/// Largest ||[A, B]|| over all generator pairs.
inline double max_pairwise_commutator(const std::vector<PauliSum>& gens) {
    double worst = 0.0;
    for (std::size_t a = 0; a < gens.size(); ++a)
        for (std::size_t b = a + 1; b < gens.size(); ++b)
            worst = std::max(worst, std::sqrt(commutator(gens[a], gens[b]).norm_sq()));
    return worst;
}

// ---------------------------------------------------------------- statevector

/// States after each of the stages (a)-(f).
inline std::vector<StateVector> circuit_stages(std::size_t n, double phi) {
    if (n == 0) fail(ErrorKind::InvalidArgument, "need at least one satellite");
    if (n > kMaxCounterexampleSatellites) fail(ErrorKind::TooManyQubits, "statevector run supports at most 20 satellites");
    const std::size_t nq = n + 1;
    std::vector<StateVector> out;
    StateVector s = StateVector::plus_state(nq);
    out.push_back(s);
    for (std::size_t j = 1; j < nq; ++j) s.apply_cz(0, j);
    out.push_back(s);
    for (std::size_t j = 1; j < nq; ++j) s.apply_h(j);
    out.push_back(s);
    for (std::size_t j = 1; j < nq; ++j) s.apply_phase(j, phi);
    out.push_back(s);
    for (std::size_t j = 1; j < nq; ++j) s.apply_h(j);
    out.push_back(s);
    for (std::size_t j = 1; j < nq; ++j) s.apply_cz(0, j);
    out.push_back(s);
    return out;
}

struct StatevectorResult {
    DensityMatrix final_central{Matrix(identity(2) * 0.5)};
    double satellite_overlap = 0.0;     // probability the satellites are back in |+>^n
    double overlap_with_initial = 0.0;  // |<+|psi_f>| on the central qubit
};

inline StatevectorResult statevector_run(const CounterexampleParams& params) {
    params.validate();
    const auto stages = circuit_stages(params.n, params.phi);
    const StateVector& fin = stages.back();
    DensityMatrix rho(hermitian_part(fin.reduced_qubit(0)));
    const double r = 1.0 / std::numbers::sqrt2;
    return {std::move(rho), fin.plus_overlap_excluding(0), fin.projected_norm(0, r, r)};
}

// ---------------------------------------------------------------- Heisenberg picture

/// H = g sum_j (I_0 - Z_0)(I_j - Z_j) over n satellites.
inline DiagonalHamiltonian cz_hamiltonian(std::size_t n, double g) {
    const std::size_t nq = n + 1;
    PauliSum h(nq);
    for (std::size_t j = 1; j < nq; ++j) {
        PauliString zz(nq);
        zz.set(0, PauliLetter::Z);
        zz.set(j, PauliLetter::Z);
        h.add(PauliString(nq), g);
        h.add(PauliString::single(nq, 0, PauliLetter::Z), -g);
        h.add(PauliString::single(nq, j, PauliLetter::Z), -g);
        h.add(zz, g);
    }
    return DiagonalHamiltonian(std::move(h));
}

inline std::vector<PauliSum> initial_generators(std::size_t n) {
    std::vector<PauliSum> gens;
    for (std::size_t q = 0; q <= n; ++q) gens.push_back(detail::single(n + 1, q, PauliLetter::X));
    return gens;
}

struct TrajectoryPoint {
    double t;
    std::vector<PauliSum> generators;  // S_0(t), S_1(t), ...
    double max_commutator;
};

struct StabilizerTrajectory {
    std::vector<TrajectoryPoint> points;
    double max_commutator = 0.0;
    double max_norm_drift = 0.0;  // | sum c^2 - 1 | over all generators and times
};

/// Evolves X_0, X_1, ..., X_n by exact conjugation S(t) = U^dagger(t) S U(t).
inline StabilizerTrajectory heisenberg_stabilizer_evolution(std::size_t n, double g, const std::vector<double>& t_grid) {
    if (t_grid.empty() || t_grid.front() != 0.0) fail(ErrorKind::InvalidArgument, "time grid must start at 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) fail(ErrorKind::InvalidArgument, "time grid must be ascending");
    const DiagonalHamiltonian h = cz_hamiltonian(n, g);
    const auto init = initial_generators(n);
    StabilizerTrajectory traj;
    for (double t : t_grid) {
        TrajectoryPoint pt{t, {}, 0.0};
        for (const auto& s : init) {
            pt.generators.push_back(h.heisenberg(s, t));
            traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(pt.generators.back().norm_sq() - 1.0));
        }
        pt.max_commutator = max_pairwise_commutator(pt.generators);
        traj.max_commutator = std::max(traj.max_commutator, pt.max_commutator);
        traj.points.push_back(std::move(pt));
    }
    return traj;
}

/// First t in (0, t_max] at which every generator S_k(t) equals target_k within
/// kStageTol. The overlap G(t) = sum_k Re<target_k, S_k(t)> peaks there, so the
/// scan brackets sign changes (+ to -) of G'(t) = sum_k Re<target_k, (i/hbar)[H, S_k(t)]>
/// and bisects them.
inline std::optional<double> first_return_time(const DiagonalHamiltonian& h, const std::vector<PauliSum>& initial,
                                               const std::vector<PauliSum>& target, double t_max,
                                               std::size_t scan_points = 4096) {
    if (initial.size() != target.size()) fail(ErrorKind::DimMismatch, "initial and target generator counts differ");
    const auto slope = [&](double t) {
        double s = 0.0;
        for (std::size_t k = 0; k < initial.size(); ++k) s += inner(target[k], h.time_derivative(h.heisenberg(initial[k], t))).real();
        return s;
    };
    const auto mismatch = [&](double t) {
        double worst = 0.0;
        for (std::size_t k = 0; k < initial.size(); ++k) worst = std::max(worst, distance(h.heisenberg(initial[k], t), target[k]));
        return worst;
    };
    const double dt = t_max / static_cast<double>(scan_points);
    double prev = slope(dt);
    for (std::size_t i = 2; i <= scan_points; ++i) {
        const double t = dt * static_cast<double>(i);
        const double cur = slope(t);
        if (prev > 0.0 && cur <= 0.0) {
            double a = t - dt;
            double b = t;
            for (int iter = 0; iter < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * b; ++iter) {
                const double m = 0.5 * (a + b);
                if (slope(m) > 0.0) a = m;
                else b = m;
            }
            const double root = 0.5 * (a + b);
            if (mismatch(root) <= kStageTol) return root;
        }
        prev = cur;
    }
    return std::nullopt;
}

/// Common period of the S_k(t) trajectories, searched over two stated CZ periods 2*(2 pi hbar / g).
inline std::optional<double> measured_period(std::size_t n, double g) {
    const auto init = initial_generators(n);
    return first_return_time(cz_hamiltonian(n, g), init, init, 4.0 * std::numbers::pi * hbar() / g);
}

/// First time at which the continuous evolution reproduces the stage-(b) generators.
inline std::optional<double> measured_cz_time(std::size_t n, double g) {
    const auto stages = stabilizer_stage_sequence(n, 0.0);
    return first_return_time(cz_hamiltonian(n, g), stages[0].generators, stages[1].generators,
                             2.0 * std::numbers::pi * hbar() / g);
}

// ---------------------------------------------------------------- timing

inline double stated_cz_time(double g) { return std::numbers::pi * hbar() / g; }

inline double cz_time(double g, CzConstant which) {
    if (which == CzConstant::Stated) return stated_cz_time(g);
    const auto t = measured_cz_time(1, g);
    if (!t) fail(ErrorKind::ConvergenceFailure, "could not measure the CZ gate time");
    return *t;
}

/// t_h = pi hbar / (2 eq), t_cz per `which`, tau = 2 t_cz + 2 t_h + t_phi.
inline ScheduleTiming gate_time_budget(const CounterexampleParams& params, double t_phi = 0.0,
                                       CzConstant which = CzConstant::Stated) {
    params.validate();
    if (!(t_phi >= 0.0)) fail(ErrorKind::InvalidArgument, "t_phi must be non-negative");
    ScheduleTiming t;
    t.t_cz = cz_time(params.g, which);
    t.t_h = std::numbers::pi * hbar() / (2.0 * params.eq);
    t.t_phi = t_phi;
    t.tau = 2.0 * t.t_cz + 2.0 * t.t_h + t.t_phi;
    return t;
}

/// Coupling above which tau < pi hbar / e0 when t_phi -> 0, for a CZ time
/// kappa * pi * hbar / g: g > 2 kappa e0 eq / (eq - e0). Requires eq > e0.
inline double regime_threshold(double e0, double eq, double kappa = 1.0) {
    if (!(eq > e0)) fail(ErrorKind::DegenerateRegime, "no violating coupling exists unless eq > e0");
    return 2.0 * kappa * e0 * eq / (eq - e0);
}

struct ViolationVerdict {
    ScheduleTiming timing;
    double unitary_limit = 0.0;  // pi hbar / e0
    bool violated = false;       // tau < unitary_limit
    bool regime_ok = false;      // eq > e0 and g above threshold
    std::optional<double> g_threshold;
    CzConstant cz = CzConstant::Stated;
};

inline ViolationVerdict violation_verdict(const CounterexampleParams& params, double t_phi = 0.0,
                                          CzConstant which = CzConstant::Stated) {
    ViolationVerdict v;
    v.cz = which;
    v.timing = gate_time_budget(params, t_phi, which);
    v.unitary_limit = std::numbers::pi * hbar() / params.e0;
    v.violated = v.timing.tau < v.unitary_limit;
    if (params.eq > params.e0) {
        const double kappa = v.timing.t_cz * params.g / (std::numbers::pi * hbar());
        v.g_threshold = regime_threshold(params.e0, params.eq, kappa);
        v.regime_ok = params.g > *v.g_threshold;
    }
    return v;
}

// ---------------------------------------------------------------- end to end

struct CounterexampleReport {
    CounterexampleParams params;
    StatevectorResult statevector;
    bool orthogonal = false;            // overlap_with_initial <= 1e-9
    bool satellites_restored = false;   // satellite_overlap >= 1 - 1e-10
    bool stage_check_performed = false;
    std::array<double, 6> stage_residuals{};  // max ||S|psi> - |psi>|| per stage
    std::array<double, 6> stage_commutators{};
    ViolationVerdict stated;
    ViolationVerdict measured;
    double tau_small_tphi = 0.0;  // stated budget with t_phi = 0.01 pi hbar / e0
    double t_cz_stated = 0.0;
    double t_cz_measured = 0.0;
    double period_measured = 0.0;
    bool bounds_violated = false;  // orthogonal and tau < pi hbar / e0 (stated constants)
};

inline constexpr double kOrthogonalOverlap = 1e-9;
inline constexpr double kRestoredTol = 1e-10;

inline CounterexampleReport end_to_end_counterexample(const CounterexampleParams& params, double t_phi = 0.0) {
    params.validate();
    if (params.n > kMaxCounterexampleSatellites) fail(ErrorKind::TooManyQubits, "at most 20 satellites");
    CounterexampleReport rep;
    rep.params = params;
    const auto states = circuit_stages(params.n, params.phi);
    rep.statevector = statevector_run(params);
    rep.orthogonal = rep.statevector.overlap_with_initial <= kOrthogonalOverlap;
    rep.satellites_restored = rep.statevector.satellite_overlap >= 1.0 - kRestoredTol;

    // Bloch angle of the central qubit implied by the symbolic stage-(f) generator.
    double bloch = static_cast<double>(params.n) * params.phi;
    if (params.n <= kMaxStageCheckSatellites) {
        rep.stage_check_performed = true;
        const auto stages = stabilizer_stage_sequence(params.n, params.phi);
        for (std::size_t s = 0; s < stages.size(); ++s) {
            double worst = 0.0;
            for (const auto& gen : stages[s].generators) worst = std::max(worst, states[s].stabilizer_residual(gen));
            if (stages[s].s0_unreduced) worst = std::max(worst, states[s].stabilizer_residual(*stages[s].s0_unreduced));
            rep.stage_residuals[s] = worst;
            rep.stage_commutators[s] = max_pairwise_commutator(stages[s].generators);
            if (worst > kStageTol || rep.stage_commutators[s] > kStageTol) {
                fail(ErrorKind::CrossCheckMismatch, std::string("stage (") + stages[s].label + ") residual " +
                                                        std::to_string(worst));
            }
        }
        const auto& s0 = stages.back().generators[0];
        const std::size_t nq = params.n + 1;
        bloch = std::atan2(s0.coefficient(PauliString::single(nq, 0, PauliLetter::Y)).real(),
                           s0.coefficient(PauliString::single(nq, 0, PauliLetter::X)).real());
    }

    // |<+|psi_f>| = |cos(bloch / 2)| must agree with the statevector verdict.
    const double symbolic_overlap = std::abs(std::cos(0.5 * bloch));
    if ((symbolic_overlap <= kOrthogonalOverlap) != rep.orthogonal) {
        fail(ErrorKind::CrossCheckMismatch, "statevector and stabilizer disagree on orthogonality");
    }

    rep.stated = violation_verdict(params, t_phi, CzConstant::Stated);
    rep.measured = violation_verdict(params, t_phi, CzConstant::Measured);
    rep.tau_small_tphi = gate_time_budget(params, 0.01 * std::numbers::pi * hbar() / params.e0, CzConstant::Stated).tau;
    rep.t_cz_stated = rep.stated.timing.t_cz;
    rep.t_cz_measured = rep.measured.timing.t_cz;
    const auto period = measured_period(std::min<std::size_t>(params.n, 4), params.g);
    rep.period_measured = period.value_or(std::numeric_limits<double>::quiet_NaN());
    rep.bounds_violated = rep.orthogonal && rep.stated.violated;
    return rep;
}

}  // namespace qsl

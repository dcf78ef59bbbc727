// Unitary evolution, orthogonality times and the Mandelstam-Tamm /
// Margolus-Levitin bounds.
//
//   MT:  theta_perp >= (pi/2) hbar / dK,          dK = sqrt(<K^2> - <K>^2)
//   ML:  theta_perp >= (pi/2) hbar / <K - E_min>  (ground referenced)
//
// Both are checked against the first orthogonality time found on the orbit
// exp(-i K theta / hbar) and, infinitesimally, against the sampled rate of the
// Wootters-convention Bures angle.
#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qsl/information.hpp"

namespace qsl {

using QuantumState = std::variant<PureState, DensityMatrix>;

inline constexpr double kInfiniteBound = std::numeric_limits<double>::infinity();
inline constexpr double kOrthogonalityFidelity = 1e-9;
inline constexpr double kRateTol = 1e-6;

inline std::size_t state_dim(const QuantumState& s) {
    return std::visit([](const auto& v) { return v.dim(); }, s);
}

inline DensityMatrix to_density(const QuantumState& s) {
    if (const auto* psi = std::get_if<PureState>(&s)) return DensityMatrix(*psi);
    return std::get<DensityMatrix>(s);
}

inline bool is_pure(const QuantumState& s) { return std::holds_alternative<PureState>(s); }

// ---------------------------------------------------------------- evolution

inline PureState evolve(const PureState& psi, const Observable& k, double theta) {
    detail::require_same_dim(psi.dim(), k.dim(), "evolve");
    const auto& sd = k.spectral();
    Vector coeffs = sd.eigenvectors.adjoint() * psi.amps();
    const double scale = theta / hbar();
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs(i) *= std::exp(cplx(0.0, -sd.eigenvalues(i) * scale));
    Vector out = sd.eigenvectors * coeffs;
    return PureState(out / out.norm());
}

inline DensityMatrix evolve(const DensityMatrix& rho, const Observable& k, double theta) {
    detail::require_same_dim(rho.dim(), k.dim(), "evolve");
    const Matrix u = expm_unitary(k.spectral(), theta);
    return DensityMatrix(hermitian_part(u * rho.mat() * u.adjoint()));
}

inline QuantumState evolve(const QuantumState& s, const Observable& k, double theta) {
    return std::visit([&](const auto& v) -> QuantumState { return evolve(v, k, theta); }, s);
}

// ---------------------------------------------------------------- bounds

namespace detail {
inline double moment_floor(const Observable& k) {
    const auto& ev = k.spectral().eigenvalues;
    return 1e-12 * std::max(1.0, ev(ev.size() - 1) - ev(0));
}
}  // namespace detail

/// (pi/2) hbar / dK; +infinity for an eigenstate.
inline double mt_bound(const QuantumState& state, const Observable& k) {
    const double dk = std::sqrt(variance(to_density(state), k));
    if (dk <= detail::moment_floor(k)) return kInfiniteBound;
    return 0.5 * std::numbers::pi * hbar() / dk;
}

/// (pi/2) hbar / <K - E_min> (ground referenced) or (pi/2) hbar / |<K>| (raw);
/// +infinity when the denominator vanishes.
inline double ml_bound(const QuantumState& state, const Observable& k, bool ground_referenced = true) {
    const double mean = k.expectation(to_density(state));
    const double energy = ground_referenced ? mean - k.ground_energy() : std::abs(mean);
    if (energy <= detail::moment_floor(k)) return kInfiniteBound;
    return 0.5 * std::numbers::pi * hbar() / energy;
}

// ---------------------------------------------------------------- scenarios

struct EvolutionScenario {
    QuantumState initial;
    Observable generator;
    std::optional<double> theta_max;  // defaults to 4x the larger finite bound
    std::size_t samples = 2048;

    EvolutionScenario(QuantumState init, Observable k, std::optional<double> tmax = std::nullopt, std::size_t n = 2048)
        : initial(std::move(init)), generator(std::move(k)), theta_max(tmax), samples(n) {
        detail::require_same_dim(state_dim(initial), generator.dim(), "EvolutionScenario");
        if (samples < 2) fail(ErrorKind::InvalidArgument, "EvolutionScenario needs at least two samples");
        if (theta_max && !(*theta_max > 0.0)) fail(ErrorKind::InvalidArgument, "theta_max must be positive");
    }

    /// Explicit theta_max or 4x the larger finite bound; nullopt when the state never moves.
    std::optional<double> resolved_theta_max() const {
        if (theta_max) return theta_max;
        const double mt = mt_bound(initial, generator);
        const double ml = ml_bound(initial, generator, true);
        double largest = 0.0;
        if (std::isfinite(mt)) largest = std::max(largest, mt);
        if (std::isfinite(ml)) largest = std::max(largest, ml);
        if (largest <= 0.0) return std::nullopt;
        return 4.0 * largest;
    }
};

/// Evaluates overlap and distance from the initial state along the orbit.
class Orbit {
public:
    explicit Orbit(const EvolutionScenario& sc) : sc_(sc), rho0_(to_density(sc.initial)) {
        if (const auto* psi = std::get_if<PureState>(&sc.initial)) {
            const auto& sd = sc.generator.spectral();
            weights_ = (sd.eigenvectors.adjoint() * psi->amps()).cwiseAbs2();
        }
    }

    /// sqrt F(state_0, state_theta).
    double root_fidelity(double theta) const {
        if (weights_.size() > 0) {
            const auto& ev = sc_.generator.spectral().eigenvalues;
            cplx amp = 0.0;
            const double scale = theta / hbar();
            for (Eigen::Index i = 0; i < ev.size(); ++i) amp += weights_(i) * std::exp(cplx(0.0, -ev(i) * scale));
            return std::min(std::abs(amp), 1.0);
        }
        return std::sqrt(fidelity(rho0_, evolve(rho0_, sc_.generator, theta)));
    }

    double fidelity_at(double theta) const {
        const double r = root_fidelity(theta);
        return r * r;
    }

    /// Wootters-convention distance from the initial state.
    double angle(double theta) const {
        if (const auto* psi = std::get_if<PureState>(&sc_.initial)) {
            return wootters_distance(*psi, evolve(*psi, sc_.generator, theta));
        }
        return bures_angle(rho0_, evolve(rho0_, sc_.generator, theta));
    }

private:
    const EvolutionScenario& sc_;
    DensityMatrix rho0_;
    RealVector weights_;  // spectral weights of a pure initial state, else empty
};

namespace detail {
/// Golden-section minimisation of f on [a, b] to relative width `rel_tol`.
template <typename F>
double golden_minimize(F&& f, double a, double b, double rel_tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int iter = 0; iter < 400 && (b - a) > rel_tol * std::max(1.0, std::abs(b)); ++iter) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}
}  // namespace detail

/// First theta in (0, theta_max] at which the fidelity with the initial state
/// drops to `eps` or below. The orbit is scanned on `samples` uniform points;
/// each sampled local minimum of sqrt F is refined by golden-section search to
/// relative width 1e-12 and accepted if F <= eps there.
inline std::optional<double> orthogonality_time(const EvolutionScenario& sc, double eps = kOrthogonalityFidelity) {
    if (!(eps > 0.0)) fail(ErrorKind::InvalidArgument, "eps must be positive");
    const auto tmax = sc.resolved_theta_max();
    if (!tmax) return std::nullopt;
    const Orbit orbit(sc);
    const std::size_t n = sc.samples;
    const double dt = *tmax / static_cast<double>(n);
    std::vector<double> g(n + 1);
    g[0] = 1.0;
    for (std::size_t i = 1; i <= n; ++i) g[i] = orbit.root_fidelity(dt * static_cast<double>(i));
    const auto rf = [&](double t) { return orbit.root_fidelity(t); };
    for (std::size_t i = 1; i <= n; ++i) {
        const bool left = g[i - 1] >= g[i];
        const bool right = i == n || g[i + 1] >= g[i];
        if (!(left && right)) continue;
        const double a = dt * static_cast<double>(i - 1);
        const double b = std::min(dt * static_cast<double>(i + 1), *tmax);
        const double t = detail::golden_minimize(rf, a, b, 1e-12);
        const double r = rf(t);
        if (r * r <= eps) return t;
    }
    return std::nullopt;
}

struct BoundReport {
    std::optional<double> orthogonality_theta;
    double mt_bound = kInfiniteBound;
    double ml_bound_ground_referenced = kInfiniteBound;
    double ml_bound_raw = kInfiniteBound;
    double attained_distance = 0.0;  // at theta_perp, else at theta_max
    DistanceConvention convention = DistanceConvention::WoottersAngle;

    /// theta_perp respects both bounds within `tol` (vacuous when absent).
    bool respects_bounds(double tol = 1e-9) const {
        if (!orthogonality_theta) return true;
        return *orthogonality_theta >= mt_bound - tol && *orthogonality_theta >= ml_bound_ground_referenced - tol;
    }
};

inline BoundReport bound_report(const EvolutionScenario& sc, DistanceConvention conv = DistanceConvention::WoottersAngle,
                                double eps = kOrthogonalityFidelity) {
    BoundReport r;
    r.convention = conv;
    r.mt_bound = mt_bound(sc.initial, sc.generator);
    r.ml_bound_ground_referenced = ml_bound(sc.initial, sc.generator, true);
    r.ml_bound_raw = ml_bound(sc.initial, sc.generator, false);
    r.orthogonality_theta = orthogonality_time(sc, eps);
    const Orbit orbit(sc);
    if (r.orthogonality_theta) {
        r.attained_distance = convention_scale(conv) * orbit.angle(*r.orthogonality_theta);
    } else if (const auto tmax = sc.resolved_theta_max()) {
        r.attained_distance = convention_scale(conv) * orbit.angle(*tmax);
    }
    return r;
}

// ---------------------------------------------------------------- rates

struct RateSample {
    double theta;
    double fidelity;
    double angle;  // Wootters convention
    double rate;   // d angle / d theta
};

struct RateReport {
    std::vector<RateSample> samples;
    double mt_rate_limit = 0.0;  // dK / hbar
    double ml_rate_limit = 0.0;  // <K - E_min> / hbar
    double max_rate = 0.0;
    std::size_t mt_violations = 0;
    /// Samples whose rate exceeds the ML limit. The instantaneous ML rate
    /// inequality is not a theorem, so these are recorded rather than raised.
    std::size_t ml_rate_exceedances = 0;
    std::optional<double> worst_ml_theta;
    double worst_ml_excess = 0.0;
};

/// Samples the Wootters-angle rate along the orbit (forward difference at
/// theta = 0, central differences elsewhere) and compares it with dK/hbar and
/// <K - E_min>/hbar. Throws ViolationDetected on the first MT-rate violation.
inline RateReport rate_bound_check(const EvolutionScenario& sc, double tol = kRateTol,
                                   std::optional<std::size_t> sample_count = std::nullopt) {
    RateReport rep;
    const DensityMatrix rho0 = to_density(sc.initial);
    const double hb = hbar();
    rep.mt_rate_limit = std::sqrt(variance(rho0, sc.generator)) / hb;
    rep.ml_rate_limit = (sc.generator.expectation(rho0) - sc.generator.ground_energy()) / hb;
    const auto tmax = sc.resolved_theta_max();
    const std::size_t n = sample_count.value_or(sc.samples);
    const Orbit orbit(sc);
    const double span = tmax.value_or(1.0);
    const double h = (is_pure(sc.initial) ? 1e-5 : 1e-4) * std::max(1.0, 0.1 * span);
    for (std::size_t i = 0; i <= n; ++i) {
        const double theta = span * static_cast<double>(i) / static_cast<double>(n);
        RateSample s{theta, orbit.fidelity_at(theta), orbit.angle(theta), 0.0};
        if (i == 0) {
            s.rate = orbit.angle(h) / h;
        } else {
            s.rate = (orbit.angle(theta + h) - orbit.angle(theta - h)) / (2.0 * h);
        }
        rep.max_rate = std::max(rep.max_rate, s.rate);
        if (s.rate > rep.mt_rate_limit + tol) {
            ++rep.mt_violations;
            fail(ErrorKind::ViolationDetected, "MT rate bound exceeded at theta = " + std::to_string(theta) +
                                                   " (rate " + std::to_string(s.rate) + " > " +
                                                   std::to_string(rep.mt_rate_limit) + ")");
        }
        if (s.rate > rep.ml_rate_limit + tol) {
            ++rep.ml_rate_exceedances;
            const double excess = s.rate - rep.ml_rate_limit;
            if (excess > rep.worst_ml_excess) {
                rep.worst_ml_excess = excess;
                rep.worst_ml_theta = theta;
            }
        }
        rep.samples.push_back(s);
    }
    return rep;
}

// ---------------------------------------------------------------- saturation

/// (|E_min> + e^{i phase} |E_n>) / sqrt 2 for the n-th eigenvector (ascending order).
inline PureState saturating_state(const Observable& k, std::size_t n, double phase) {
    const auto& sd = k.spectral();
    if (n == 0 || n >= k.dim()) fail(ErrorKind::IndexOutOfRange, "eigen index " + std::to_string(n));
    if (sd.eigenvalues(static_cast<Eigen::Index>(n)) - sd.eigenvalues(0) <= detail::moment_floor(k)) {
        fail(ErrorKind::DegenerateWithGround, "eigenvalue " + std::to_string(n) + " is degenerate with the ground energy");
    }
    const Vector v = (sd.eigenvectors.col(0) + std::exp(cplx(0.0, phase)) * sd.eigenvectors.col(static_cast<Eigen::Index>(n))) /
                     std::sqrt(2.0);
    return PureState::normalized(v);
}

}  // namespace qsl

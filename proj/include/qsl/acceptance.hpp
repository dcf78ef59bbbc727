// Built-in acceptance suite. Criteria 1-8 are numeric checks; criterion 9 runs
// them twice with the same seed and compares the serialized reports.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "qsl/counterexample.hpp"
#include "qsl/distances.hpp"
#include "qsl/information.hpp"
#include "qsl/random.hpp"
#include "qsl/report.hpp"
#include "qsl/speedlimit.hpp"
#include "qsl/units.hpp"

namespace qsl::acceptance {

struct Outcome {
    bool passed = false;
    json metrics = json::object();
};

struct Criterion {
    int id;
    std::string title;
    double time_limit_s;  // 0 = none
    std::function<Outcome(std::uint64_t)> run;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;       // numeric verdict
    bool within_time = true;   // wall time under the criterion's limit
    double seconds = 0.0;
    json metrics = json::object();

    bool ok() const { return passed && within_time; }
};

namespace detail {

constexpr double pi = std::numbers::pi;

inline ProbDist interior_dist(Rng& rng, std::size_t n) {
    std::vector<double> p(n);
    double s = 0.0;
    for (auto& x : p) s += (x = rng.uniform(0.05, 1.0));
    for (auto& x : p) x /= s;
    double rest = 0.0;
    for (std::size_t j = 1; j < n; ++j) rest += p[j];
    p[0] = 1.0 - rest;
    return ProbDist(p);
}

// Length of the amplitude great circle from p to q by Simpson's rule over the
// infinitesimal metric.
inline double path_integrated_distance(const ProbDist& p, const ProbDist& q, int intervals) {
    const std::size_t n = p.size();
    std::vector<double> r0(n), r1(n);
    double dot = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        r0[j] = std::sqrt(p[j]);
        r1[j] = std::sqrt(q[j]);
        dot += r0[j] * r1[j];
    }
    const double omega = std::acos(std::min(dot, 1.0));
    const auto speed = [&](double t) {
        std::vector<double> r(n), pt(n), dp(n);
        double norm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            r[j] = (std::sin((1 - t) * omega) * r0[j] + std::sin(t * omega) * r1[j]) / std::sin(omega);
            const double dr = omega * (-std::cos((1 - t) * omega) * r0[j] + std::cos(t * omega) * r1[j]) / std::sin(omega);
            dp[j] = 2.0 * r[j] * dr;
            norm += r[j] * r[j];
        }
        double s = 0.0, sdp = 0.0;
        for (std::size_t j = 1; j < n; ++j) {
            pt[j] = r[j] * r[j] / norm;
            s += pt[j];
            sdp += dp[j];
        }
        pt[0] = 1.0 - s;
        dp[0] = -sdp;
        return std::sqrt(classical_infinitesimal_distance_sq(ProbDist(pt), dp));
    };
    const double h = 1.0 / intervals;
    double sum = speed(0.0) + speed(1.0);
    for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * speed(i * h);
    return sum * h / 3.0;
}

// Binomial weights C(m,k)/2^m on levels offset + k*omega: the overlap is
// ((1 + e^{-i omega theta})/2)^m up to phase, first zero at pi hbar / omega.
inline EvolutionScenario orthogonalizing_scenario(Rng& rng, std::size_t dim) {
    const int m = 1 + static_cast<int>(rng.index(0, std::min<std::size_t>(dim - 1, 3) - 1));
    const double omega = rng.uniform(0.5, 3.0);
    const double offset = rng.uniform(-2.0, 2.0);
    RealVector levels(static_cast<Eigen::Index>(dim));
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        if (static_cast<int>(i) <= m) {
            levels(ii) = offset + omega * static_cast<double>(i);
            const double w = std::tgamma(m + 1.0) / (std::tgamma(i + 1.0) * std::tgamma(m - static_cast<double>(i) + 1.0));
            amps(ii) = std::sqrt(w / std::pow(2.0, m)) * std::exp(cplx(0.0, rng.uniform(0.0, 2 * pi)));
        } else {
            levels(ii) = offset + rng.uniform(0.0, 4.0 * omega);
        }
    }
    const Matrix u = expm_unitary(rng.hermitian(dim), 1.0);
    const Matrix k = hermitian_part(u * levels.cast<cplx>().asDiagonal() * u.adjoint());
    return EvolutionScenario(PureState::normalized(u * amps), Observable(k));
}

}  // namespace detail

// ---------------------------------------------------------------- criteria

inline Outcome saturating_qubit(std::uint64_t) {
    const ScopedHbar units(1.0);
    const double r = 1.0 / std::numbers::sqrt2;
    Vector plus(2);
    plus << r, r;
    const Observable k(Matrix(RealVector::LinSpaced(2, 0.0, 1.0).cast<cplx>().asDiagonal()));
    const auto rep = bound_report(EvolutionScenario(PureState(plus), k));
    Outcome o;
    const double theta = rep.orthogonality_theta.value_or(std::numeric_limits<double>::quiet_NaN());
    const double err = std::max({std::abs(theta - detail::pi), std::abs(rep.mt_bound - detail::pi),
                                 std::abs(rep.ml_bound_ground_referenced - detail::pi)});
    o.passed = rep.orthogonality_theta.has_value() && err <= 1e-9;
    o.metrics = {{"orthogonality_theta", num(rep.orthogonality_theta)},
                 {"mt_bound", num(rep.mt_bound)},
                 {"ml_bound", num(rep.ml_bound_ground_referenced)},
                 {"max_abs_error", num(err)}};
    return o;
}

inline Outcome qfi_variance_bound(std::uint64_t seed) {
    const ScopedHbar units(1.0);
    constexpr std::size_t pairs = 1000;
    double max_excess = -std::numeric_limits<double>::infinity();
    double max_pure_gap = 0.0;
    std::size_t pure = 0;
    for (std::size_t i = 0; i < pairs; ++i) {
        Rng rng(derive_seed(seed, 2000 + i));
        const std::size_t dim = 2 + rng.index(0, 6);
        const bool is_pure = i % 4 == 0;
        const DensityMatrix rho(is_pure ? rng.density(dim, 1) : rng.density(dim, 1 + rng.index(0, dim - 1)));
        const auto gap = qfi_variance_gap(rho, Observable(rng.hermitian(dim)));
        max_excess = std::max(max_excess, gap.qfi - gap.bound);
        if (is_pure) {
            ++pure;
            max_pure_gap = std::max(max_pure_gap, std::abs(gap.gap()));
        }
    }
    Outcome o;
    o.passed = max_excess <= 1e-9 && max_pure_gap <= 1e-9;
    o.metrics = {{"pairs", pairs}, {"pure_pairs", pure}, {"max_qfi_minus_bound", num(max_excess)}, {"max_pure_gap", num(max_pure_gap)}};
    return o;
}

inline Outcome qfi_two_path(std::uint64_t seed) {
    const ScopedHbar units(1.0);
    constexpr std::size_t pairs = 1000;
    double worst = 0.0;
    for (std::size_t i = 0; i < pairs; ++i) {
        Rng rng(derive_seed(seed, 3000 + i));
        const std::size_t dim = 2 + rng.index(0, 6);
        const DensityMatrix rho(rng.density(dim, dim));
        const Observable k(rng.hermitian(dim));
        worst = std::max(worst, std::abs(qfi(rho, k) - qfi_from_metric(rho, k)));
    }
    Outcome o;
    o.passed = worst <= 1e-9;
    o.metrics = {{"pairs", pairs}, {"max_discrepancy", num(worst)}};
    return o;
}

inline Outcome metric_consistency(std::uint64_t seed) {
    double worst_diag = 0.0;
    for (std::size_t i = 0; i < 1000; ++i) {
        Rng rng(derive_seed(seed, 4000 + i));
        const std::size_t n = 2 + rng.index(0, 6);
        const ProbDist p = detail::interior_dist(rng, n);
        std::vector<double> dp(n);
        double s = 0.0;
        for (std::size_t j = 1; j < n; ++j) s += (dp[j] = rng.uniform(-1e-2, 1e-2));
        dp[0] = -s;
        Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        Matrix drho = rho;
        for (std::size_t j = 0; j < n; ++j) {
            rho(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = p[j];
            drho(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = dp[j];
        }
        const double quantum = quantum_infinitesimal_distance_sq(DensityMatrix(rho), drho);
        worst_diag = std::max(worst_diag, std::abs(quantum - classical_infinitesimal_distance_sq(p, dp)));
    }
    double worst_path = 0.0;
    for (std::size_t i = 0; i < 200; ++i) {
        Rng rng(derive_seed(seed, 5000 + i));
        const std::size_t n = 2 + rng.index(0, 6);
        const ProbDist p = detail::interior_dist(rng, n);
        const ProbDist q = detail::interior_dist(rng, n);
        const double direct = classical_geodesic_distance(p, q);
        worst_path = std::max(worst_path, std::abs(direct - detail::path_integrated_distance(p, q, 2000)));
    }
    Outcome o;
    o.passed = worst_diag <= 1e-12 && worst_path <= 1e-6;
    o.metrics = {{"max_diagonal_discrepancy", num(worst_diag)}, {"max_path_discrepancy", num(worst_path)}};
    return o;
}

inline Outcome unitary_speed_limits(std::uint64_t seed) {
    const ScopedHbar units(1.0);
    constexpr std::size_t scenarios = 500;
    std::size_t found = 0, bound_failures = 0, rate_violations = 0, ml_rate_exceedances = 0;
    double min_mt_margin = std::numeric_limits<double>::infinity();
    double min_ml_margin = std::numeric_limits<double>::infinity();
    double max_rate_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < scenarios; ++i) {
        Rng rng(derive_seed(seed, 6000 + i));
        const std::size_t dim = 2 + rng.index(0, 6);
        // Generic random states rarely reach exact orthogonality, so half the
        // scenarios are built to orthogonalize.
        const EvolutionScenario sc = i % 2 == 0 ? detail::orthogonalizing_scenario(rng, dim)
                                                : EvolutionScenario(PureState(rng.unit_vector(dim)), Observable(rng.hermitian(dim)));
        const auto rep = bound_report(sc);
        if (rep.orthogonality_theta) {
            ++found;
            min_mt_margin = std::min(min_mt_margin, *rep.orthogonality_theta - rep.mt_bound);
            min_ml_margin = std::min(min_ml_margin, *rep.orthogonality_theta - rep.ml_bound_ground_referenced);
        }
        if (!rep.respects_bounds(1e-9)) ++bound_failures;
        try {
            const auto rate = rate_bound_check(sc, kRateTol, 256);
            max_rate_excess = std::max(max_rate_excess, rate.max_rate - rate.mt_rate_limit);
            ml_rate_exceedances += rate.ml_rate_exceedances;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ViolationDetected) throw;
            ++rate_violations;
        }
    }
    Outcome o;
    o.passed = bound_failures == 0 && rate_violations == 0 && max_rate_excess <= kRateTol;
    o.metrics = {{"scenarios", scenarios},
                 {"orthogonalizing", found},
                 {"bound_failures", bound_failures},
                 {"min_mt_margin", num(min_mt_margin)},
                 {"min_ml_margin", num(min_ml_margin)},
                 {"rate_violations", rate_violations},
                 {"max_rate_minus_dK", num(max_rate_excess)},
                 {"ml_rate_exceedances_logged", ml_rate_exceedances}};
    return o;
}

inline Outcome counterexample_end_to_end(std::uint64_t) {
    const ScopedHbar units(1.0);
    const CounterexampleParams params{1.0, 3.0, 6.0, 8, detail::pi / 8.0};
    const auto rep = end_to_end_counterexample(params, 0.0);
    double worst_stage = 0.0;
    for (double r : rep.stage_residuals) worst_stage = std::max(worst_stage, r);
    const double tau = rep.stated.timing.tau;
    Outcome o;
    o.passed = rep.statevector.overlap_with_initial <= 1e-9 && rep.statevector.satellite_overlap >= 1.0 - 1e-10 &&
               std::abs(tau - 2.0 * detail::pi / 3.0) <= 1e-12 && tau < rep.stated.unitary_limit &&
               rep.stage_check_performed && worst_stage <= 1e-10 && rep.bounds_violated;
    o.metrics = {{"overlap_with_initial", num(rep.statevector.overlap_with_initial)},
                 {"satellite_overlap", num(rep.statevector.satellite_overlap)},
                 {"tau", num(tau)},
                 {"unitary_limit", num(rep.stated.unitary_limit)},
                 {"max_stage_residual", num(worst_stage)},
                 {"bounds_violated", rep.bounds_violated}};
    return o;
}

inline Outcome regime_boundary(std::uint64_t) {
    const ScopedHbar units(1.0);
    const double e0 = 1.0, eq = 3.0;
    const auto flips = [&](double thr, CzConstant which) {
        const auto below = violation_verdict({e0, eq, 0.9 * thr, 8, detail::pi / 8.0}, 0.0, which);
        const auto above = violation_verdict({e0, eq, 1.1 * thr, 8, detail::pi / 8.0}, 0.0, which);
        return std::pair{below.violated, above.violated};
    };
    const double thr_stated = regime_threshold(e0, eq);
    const double kappa = cz_time(1.0, CzConstant::Measured) / (detail::pi * hbar());
    const double thr_measured = regime_threshold(e0, eq, kappa);
    const auto [s_below, s_above] = flips(thr_stated, CzConstant::Stated);
    const auto [m_below, m_above] = flips(thr_measured, CzConstant::Measured);
    Outcome o;
    o.passed = std::abs(thr_stated - 3.0) <= 1e-12 && !s_below && s_above && !m_below && m_above;
    o.metrics = {{"threshold_stated", num(thr_stated)},
                 {"stated_violated_below", s_below},
                 {"stated_violated_above", s_above},
                 {"measured_cz_ratio", num(kappa)},
                 {"threshold_measured", num(thr_measured)},
                 {"measured_violated_below", m_below},
                 {"measured_violated_above", m_above}};
    return o;
}

inline Outcome periodicity_commutation(std::uint64_t) {
    const ScopedHbar units(1.0);
    const double g = 1.0;
    json periods = json::array();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    double worst_comm = 0.0;
    bool all_found = true;
    for (std::size_t n : {1U, 2U, 4U, 8U}) {
        const auto p = measured_period(n, g);
        periods.push_back(num(p));
        if (!p) {
            all_found = false;
            continue;
        }
        lo = std::min(lo, *p);
        hi = std::max(hi, *p);
        std::vector<double> grid;
        for (int i = 0; i < 256; ++i) grid.push_back(*p * i / 256.0);
        worst_comm = std::max(worst_comm, heisenberg_stabilizer_evolution(n, g, grid).max_commutator);
    }
    Outcome o;
    o.passed = all_found && hi - lo <= 1e-9 && worst_comm <= 1e-10;
    o.metrics = {{"periods", periods}, {"period_spread", num(all_found ? hi - lo : lo)}, {"max_commutator", num(worst_comm)}};
    return o;
}

inline std::vector<Criterion> numeric_criteria() {
    return {
        {1, "saturating qubit reproduction", 1.0, saturating_qubit},
        {2, "qfi bounded by variance", 30.0, qfi_variance_bound},
        {3, "two-path qfi agreement", 10.0, qfi_two_path},
        {4, "classical and quantum metric consistency", 0.0, metric_consistency},
        {5, "unitary speed-limit properties", 0.0, unitary_speed_limits},
        {6, "counterexample end to end", 10.0, counterexample_end_to_end},
        {7, "regime boundary flip", 0.0, regime_boundary},
        {8, "periodicity and commutation", 0.0, periodicity_commutation},
    };
}

inline CriterionResult run_criterion(const Criterion& c, std::uint64_t seed) {
    CriterionResult r;
    r.id = c.id;
    r.title = c.title;
    const auto start = std::chrono::steady_clock::now();
    try {
        const Outcome o = c.run(seed);
        r.passed = o.passed;
        r.metrics = o.metrics;
    } catch (const Error& e) {
        r.passed = false;
        r.metrics = {{"error", to_string(e.kind())}, {"message", e.what()}};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.within_time = c.time_limit_s <= 0.0 || r.seconds <= c.time_limit_s;
    return r;
}

/// Timing-free JSON of a result list; this is what determinism compares.
inline json results_json(const std::vector<CriterionResult>& results, std::uint64_t seed) {
    json crit = json::array();
    bool all = true;
    for (const auto& r : results) {
        crit.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"metrics", r.metrics}});
        all = all && r.passed;
    }
    return {{"tool", "qsl"}, {"version", kToolVersion}, {"seed", seed}, {"criteria", crit}, {"all_passed", all}};
}

using Progress = std::function<void(const CriterionResult&)>;

/// Runs criteria 1-8, then repeats them for criterion 9 and compares bytes.
inline std::vector<CriterionResult> run_suite(std::uint64_t seed, const Progress& progress = {}) {
    std::vector<CriterionResult> first;
    for (const auto& c : numeric_criteria()) {
        first.push_back(run_criterion(c, seed));
        if (progress) progress(first.back());
    }
    CriterionResult det;
    det.id = 9;
    det.title = "deterministic reports";
    const auto start = std::chrono::steady_clock::now();
    std::vector<CriterionResult> second;
    for (const auto& c : numeric_criteria()) second.push_back(run_criterion(c, seed));
    const std::string a = dump_report(results_json(first, seed));
    const std::string b = dump_report(results_json(second, seed));
    det.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    det.passed = a == b;
    det.metrics = {{"runs", 2}, {"identical", a == b}, {"bytes", a.size()}};
    first.push_back(det);
    if (progress) progress(first.back());
    return first;
}

}  // namespace qsl::acceptance

#include <cmath>
#include <numbers>

#include "qsl/random.hpp"
#include "qsl/speedlimit.hpp"
#include "test_helpers.hpp"

using namespace qsl;
using qsl::testing::diag;
using qsl::testing::ket;

namespace {

constexpr double pi = std::numbers::pi;
const double r2 = 1.0 / std::numbers::sqrt2;

PureState plus() { return PureState(ket({r2, r2})); }

double binomial(int m, int k) { return std::tgamma(m + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(m - k + 1.0)); }

struct Constructed {
    PureState state;
    Observable k;
    double expected_theta;
    int order;
};

// Weights C(m,k)/2^m on equally spaced levels k*omega (plus random unused
// levels) give <psi|psi_theta> = e^{i...} ((1 + e^{-i omega theta})/2)^m, which
// vanishes first at theta = pi hbar / omega. The basis is randomly rotated.
Constructed orthogonalizing_scenario(Rng& rng, std::size_t dim) {
    const int m = 1 + static_cast<int>(rng.index(0, std::min<std::size_t>(dim - 1, 3) - 1));
    const double omega = rng.uniform(0.5, 3.0);
    const double offset = rng.uniform(-2.0, 2.0);
    RealVector levels(static_cast<Eigen::Index>(dim));
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        if (static_cast<int>(i) <= m) {
            levels(ii) = offset + omega * static_cast<double>(i);
            amps(ii) = std::sqrt(binomial(m, static_cast<int>(i)) / std::pow(2.0, m)) * std::exp(cplx(0.0, rng.uniform(0.0, 2 * pi)));
        } else {
            levels(ii) = offset + rng.uniform(0.0, 4.0 * omega);
        }
    }
    const Matrix u = expm_unitary(rng.hermitian(dim), 1.0);
    const Matrix k = hermitian_part(u * levels.cast<cplx>().asDiagonal() * u.adjoint());
    return {PureState::normalized(u * amps), Observable(k), pi * hbar() / omega, m};
}

}  // namespace

// ---------------------------------------------------------------- evolve

TEST(Evolve, ZeroAngleIsIdentity) {
    Rng rng(61);
    const Observable k(rng.hermitian(3));
    const PureState psi(rng.unit_vector(3));
    EXPECT_LT((evolve(psi, k, 0.0).amps() - psi.amps()).norm(), 1e-14);
    const DensityMatrix rho(rng.density(3, 2));
    EXPECT_LT((evolve(rho, k, 0.0).mat() - rho.mat()).norm(), 1e-14);
}

TEST(Evolve, ScalarGeneratorOnlyAddsGlobalPhase) {
    Rng rng(62);
    const Observable k(identity(4) * 2.5);
    const PureState psi(rng.unit_vector(4));
    EXPECT_NEAR(wootters_distance(evolve(psi, k, 0.9), psi), 0.0, 1e-15);
    const DensityMatrix rho(rng.density(4, 3));
    EXPECT_LT((evolve(rho, k, 0.9).mat() - rho.mat()).norm(), 1e-14);
}

TEST(Evolve, PlusReachesMinusAtPiHbarOverGap) {
    for (double hb : {1.0, 0.3}) {
        const ScopedHbar units(hb);
        const double e0 = 1.7;
        const PureState out = evolve(plus(), Observable(diag({0.0, e0})), pi * hb / e0);
        EXPECT_NEAR(std::abs(out.amps().dot(ket({r2, -r2}))), 1.0, 1e-14);
    }
}

TEST(Evolve, PreservesNormPuritySpectrum) {
    Rng rng(63);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t dim = 2 + rng.index(0, 6);
        const Observable k(rng.hermitian(dim));
        const double theta = rng.uniform(-5.0, 5.0);
        EXPECT_NEAR(evolve(PureState(rng.unit_vector(dim)), k, theta).amps().norm(), 1.0, 1e-12);
        const DensityMatrix rho(rng.density(dim, 1 + rng.index(0, dim - 1)));
        const DensityMatrix out = evolve(rho, k, theta);
        EXPECT_NEAR(out.purity(), rho.purity(), 1e-10);
        EXPECT_LT((out.spectrum().eigenvalues - rho.spectrum().eigenvalues).norm(), 1e-10);
    }
}

TEST(Evolve, DimMismatch) {
    EXPECT_QSL_ERROR(evolve(plus(), Observable(identity(3)), 1.0), ErrorKind::DimMismatch);
}

// ---------------------------------------------------------------- bounds

TEST(MtBound, Examples) {
    const Observable k(diag({0.0, 1.0}));
    EXPECT_NEAR(mt_bound(plus(), k), pi, 1e-14);
    EXPECT_EQ(mt_bound(PureState(ket({1.0, 0.0})), k), kInfiniteBound);
    EXPECT_NEAR(mt_bound(plus(), Observable(diag({0.0, 2.0}))), pi / 2.0, 1e-14);
}

TEST(MlBound, Examples) {
    const Observable k(diag({0.0, 1.0}));
    EXPECT_NEAR(ml_bound(plus(), k, true), pi, 1e-14);
    EXPECT_NEAR(ml_bound(plus(), k, false), pi, 1e-14);
    EXPECT_EQ(ml_bound(PureState(ket({1.0, 0.0})), k, true), kInfiniteBound);

    const Observable shifted(diag({3.0, 4.0}));
    EXPECT_NEAR(ml_bound(plus(), shifted, true), pi, 1e-14);
    EXPECT_NEAR(ml_bound(plus(), shifted, false), (pi / 2.0) / 3.5, 1e-14);
}

// ---------------------------------------------------------------- orthogonality

TEST(OrthogonalityTime, SaturatingQubit) {
    const EvolutionScenario sc(plus(), Observable(diag({0.0, 1.0})));
    const auto t = orthogonality_time(sc);
    ASSERT_TRUE(t.has_value());
    EXPECT_NEAR(*t, pi, 1e-9);
}

TEST(OrthogonalityTime, ScalesInverselyWithSpectrum) {
    const EvolutionScenario sc(plus(), Observable(diag({0.0, 2.0})));
    const auto t = orthogonality_time(sc);
    ASSERT_TRUE(t.has_value());
    EXPECT_NEAR(*t, pi / 2.0, 1e-9);
}

TEST(OrthogonalityTime, FullRankMixedQubitNeverOrthogonalizes) {
    Rng rng(64);
    for (int trial = 0; trial < 10; ++trial) {
        const DensityMatrix rho(rng.density(2, 2));
        const Observable k(rng.hermitian(2));
        const EvolutionScenario sc(rho, k, 20.0, 4096);
        EXPECT_FALSE(orthogonality_time(sc).has_value());
        // Dense-scan oracle: fidelity stays bounded away from zero.
        const Orbit orbit(sc);
        double min_f = 1.0;
        for (int i = 0; i <= 4000; ++i) min_f = std::min(min_f, orbit.fidelity_at(20.0 * i / 4000.0));
        EXPECT_GT(min_f, 1e-6);
    }
}

TEST(OrthogonalityTime, EigenstateHasNoOrthogonalityTime) {
    const EvolutionScenario ground(PureState(ket({1.0, 0.0})), Observable(diag({0.0, 1.0})));
    EXPECT_FALSE(ground.resolved_theta_max().has_value());
    EXPECT_FALSE(orthogonality_time(ground).has_value());
    // Excited eigenstate: finite ground-referenced ML bound gives a scan window.
    const EvolutionScenario excited(PureState(ket({0.0, 1.0})), Observable(diag({0.0, 1.0})));
    EXPECT_TRUE(excited.resolved_theta_max().has_value());
    EXPECT_FALSE(orthogonality_time(excited).has_value());
}

TEST(OrthogonalityTime, ConstructedScenariosHitAnalyticTime) {
    Rng rng(65);
    for (int trial = 0; trial < 40; ++trial) {
        const auto c = orthogonalizing_scenario(rng, 2 + rng.index(0, 6));
        const EvolutionScenario sc(c.state, c.k);
        const auto t = orthogonality_time(sc);
        ASSERT_TRUE(t.has_value());
        // A zero of order m is only located to about eps^(1/m).
        EXPECT_NEAR(*t, c.expected_theta, c.order == 1 ? 1e-9 : 1e-4) << "order " << c.order;
    }
}

// ---------------------------------------------------------------- saturating states

TEST(SaturatingState, QubitIsPlus) {
    const PureState s = saturating_state(Observable(diag({0.0, 1.0})), 1, 0.0);
    EXPECT_NEAR(std::abs(s.amps().dot(plus().amps())), 1.0, 1e-15);
}

TEST(SaturatingState, AttainsBothBounds) {
    const Observable k(diag({0.0, 1.0}));
    const EvolutionScenario sc(saturating_state(k, 1, 0.4), k);
    const auto rep = bound_report(sc);
    ASSERT_TRUE(rep.orthogonality_theta.has_value());
    EXPECT_NEAR(*rep.orthogonality_theta, pi, 1e-9);
    EXPECT_NEAR(rep.mt_bound, pi, 1e-9);
    EXPECT_NEAR(rep.ml_bound_ground_referenced, pi, 1e-9);
    EXPECT_NEAR(rep.attained_distance, pi / 2.0, 1e-9);
}

TEST(SaturatingState, ThreeLevelGenerator) {
    const Observable k(diag({0.0, 1.0, 3.0}));
    const EvolutionScenario sc(saturating_state(k, 2, 0.0), k);
    const auto rep = bound_report(sc, DistanceConvention::FisherAngle);
    ASSERT_TRUE(rep.orthogonality_theta.has_value());
    EXPECT_NEAR(*rep.orthogonality_theta, pi / 3.0, 1e-9);
    EXPECT_NEAR(rep.mt_bound, pi / 3.0, 1e-12);
    EXPECT_NEAR(rep.ml_bound_ground_referenced, pi / 3.0, 1e-12);
    EXPECT_NEAR(rep.attained_distance, pi, 1e-9);
}

TEST(SaturatingState, RandomTwoLevelSelectionsSaturate) {
    Rng rng(66);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t dim = 2 + rng.index(0, 6);
        const Matrix h = rng.hermitian(dim);
        const Observable k(h - identity(dim) * eigh(h).eigenvalues(0));
        const std::size_t n = 1 + rng.index(0, dim - 2);
        const EvolutionScenario sc(saturating_state(k, n, rng.uniform(0.0, 2 * pi)), k);
        const auto rep = bound_report(sc);
        ASSERT_TRUE(rep.orthogonality_theta.has_value());
        const double expected = pi / k.spectral().eigenvalues(static_cast<Eigen::Index>(n));
        EXPECT_NEAR(*rep.orthogonality_theta, expected, 1e-9);
        EXPECT_NEAR(rep.mt_bound, expected, 1e-9);
        EXPECT_NEAR(rep.ml_bound_ground_referenced, expected, 1e-9);
    }
}

TEST(SaturatingState, Errors) {
    EXPECT_QSL_ERROR(saturating_state(Observable(diag({0.0, 1.0})), 2, 0.0), ErrorKind::IndexOutOfRange);
    EXPECT_QSL_ERROR(saturating_state(Observable(diag({0.0, 1.0})), 0, 0.0), ErrorKind::IndexOutOfRange);
    EXPECT_QSL_ERROR(saturating_state(Observable(diag({0.0, 0.0, 1.0})), 1, 0.0), ErrorKind::DegenerateWithGround);
}

// ---------------------------------------------------------------- rates

TEST(RateBoundCheck, SaturatingRatesCoincideAtZero) {
    const Observable k(diag({0.0, 1.0}));
    const auto rep = rate_bound_check(EvolutionScenario(plus(), k), kRateTol, 200);
    EXPECT_NEAR(rep.samples.front().rate, rep.mt_rate_limit, 1e-6);
    EXPECT_NEAR(rep.samples.front().rate, rep.ml_rate_limit, 1e-6);
    EXPECT_NEAR(rep.mt_rate_limit, 0.5, 1e-15);
    EXPECT_EQ(rep.mt_violations, 0U);
}

TEST(RateBoundCheck, EigenstateDoesNotMove) {
    const auto rep = rate_bound_check(EvolutionScenario(PureState(ket({1.0, 0.0})), Observable(diag({0.0, 1.0}))), kRateTol, 50);
    EXPECT_EQ(rep.max_rate, 0.0);
}

TEST(RateBoundCheck, RandomPureQubitOrbitsNeverViolate) {
    Rng rng(67);
    for (int trial = 0; trial < 20; ++trial) {
        const EvolutionScenario sc(PureState(rng.unit_vector(2)), Observable(rng.hermitian(2)));
        EXPECT_NO_THROW({
            const auto rep = rate_bound_check(sc, kRateTol, 1000);
            EXPECT_LE(rep.max_rate, rep.mt_rate_limit + kRateTol);
        });
    }
}

TEST(RateBoundCheck, MixedStatesRespectMtRate) {
    Rng rng(68);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t dim = 2 + rng.index(0, 3);
        const EvolutionScenario sc(DensityMatrix(rng.density(dim, dim)), Observable(rng.hermitian(dim)), 6.0);
        EXPECT_NO_THROW(rate_bound_check(sc, 1e-5, 100));
    }
}

TEST(RateBoundCheck, InstantaneousMlRateExceedanceIsRecordedNotRaised) {
    // Mostly-ground state: dK = sqrt(0.0099) > <K> = 0.01, so near theta = 0 the
    // rate exceeds <K>/hbar even though the integrated ML bound still holds.
    const PureState psi(ket({std::sqrt(0.99), std::sqrt(0.01)}));
    const EvolutionScenario sc(psi, Observable(diag({0.0, 1.0})));
    const auto rep = rate_bound_check(sc, kRateTol, 400);
    EXPECT_EQ(rep.mt_violations, 0U);
    EXPECT_GT(rep.ml_rate_exceedances, 0U);
    ASSERT_TRUE(rep.worst_ml_theta.has_value());
}

TEST(RateBoundCheck, CsvColumnsAreConsistent) {
    const auto rep = rate_bound_check(EvolutionScenario(plus(), Observable(diag({0.0, 1.0}))), kRateTol, 64);
    ASSERT_EQ(rep.samples.size(), 65U);
    for (const auto& s : rep.samples) {
        EXPECT_NEAR(s.fidelity, std::pow(std::cos(s.angle), 2), 1e-12);
    }
}

// ---------------------------------------------------------------- property sweeps

TEST(SpeedLimitProperties, OrthogonalityTimesRespectBothBounds) {
    Rng rng(69);
    int found = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t dim = 2 + rng.index(0, 6);
        const bool constructed = trial % 2 == 0;
        const auto c = orthogonalizing_scenario(rng, dim);
        const EvolutionScenario sc = constructed ? EvolutionScenario(c.state, c.k)
                                                 : EvolutionScenario(PureState(rng.unit_vector(dim)), Observable(rng.hermitian(dim)));
        const auto rep = bound_report(sc);
        if (rep.orthogonality_theta) ++found;
        EXPECT_TRUE(rep.respects_bounds(1e-9)) << "trial " << trial;
    }
    EXPECT_GE(found, 250);
}

TEST(SpeedLimitProperties, MixedStatesStayStrictlyAboveBounds) {
    // Equal mixture of two saturating states in orthogonal blocks with the same
    // gap: orthogonalizes at pi, while both bounds drop strictly below it.
    Rng rng(70);
    double min_margin = kInfiniteBound;
    for (int trial = 0; trial < 20; ++trial) {
        const double c = rng.uniform(0.2, 3.0);
        const double w = rng.uniform(0.2, 0.8);
        const Matrix u = expm_unitary(rng.hermitian(4), 1.0);
        const Matrix k = u * diag({0.0, 1.0, c, c + 1.0}) * u.adjoint();
        Vector a = Vector::Zero(4), b = Vector::Zero(4);
        a(0) = a(1) = r2;
        b(2) = r2;
        b(3) = r2 * std::exp(cplx(0.0, rng.uniform(0.0, 2 * pi)));
        a = u * a;
        b = u * b;
        const DensityMatrix rho(hermitian_part(w * a * a.adjoint() + (1 - w) * b * b.adjoint()));
        const auto rep = bound_report(EvolutionScenario(rho, Observable(hermitian_part(k))));
        ASSERT_TRUE(rep.orthogonality_theta.has_value());
        EXPECT_NEAR(*rep.orthogonality_theta, pi, 1e-6);
        const double margin = *rep.orthogonality_theta - std::max(rep.mt_bound, rep.ml_bound_ground_referenced);
        EXPECT_GT(margin, 0.0);
        min_margin = std::min(min_margin, margin);
    }
    RecordProperty("min_mixed_margin", std::to_string(min_margin));
}

TEST(SpeedLimitProperties, RateCheckSweepHasNoViolations) {
    Rng rng(71);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t dim = 2 + rng.index(0, 6);
        const EvolutionScenario sc(PureState(rng.unit_vector(dim)), Observable(rng.hermitian(dim)));
        EXPECT_NO_THROW(rate_bound_check(sc, kRateTol, 200));
    }
}

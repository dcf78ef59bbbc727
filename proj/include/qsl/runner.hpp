// Scenario configuration, dispatch and report assembly for the command line.
//
// A configuration is a JSON document:
//
//   {
//     "kind": "bound_check",          // bound_check | saturating_demo | qfi_sweep |
//                                     // distance_table | counterexample
//     "hbar": 1.0,                    // optional, default 1
//     "convention": "wootters",       // optional, "wootters" or "fisher"
//     "seed": 0,                      // optional, default 0
//     "output_path": "report.json",   // optional; --output overrides
//     "curve_path": "curve.csv",      // optional; bound_check / saturating_demo only
//     "parameters": { ... },          // kind-specific, see README
//     "grid": { "g": [3.5, 6, 12] }   // sweep verb only
//   }
//
// Unknown keys are rejected so that typos do not silently fall back to defaults.
#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "qsl/counterexample.hpp"
#include "qsl/distances.hpp"
#include "qsl/information.hpp"
#include "qsl/random.hpp"
#include "qsl/report.hpp"
#include "qsl/speedlimit.hpp"
#include "qsl/units.hpp"

namespace qsl::runner {

enum class ScenarioKind { BoundCheck, SaturatingDemo, QfiSweep, DistanceTable, Counterexample };

constexpr const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::BoundCheck: return "bound_check";
        case ScenarioKind::SaturatingDemo: return "saturating_demo";
        case ScenarioKind::QfiSweep: return "qfi_sweep";
        case ScenarioKind::DistanceTable: return "distance_table";
        case ScenarioKind::Counterexample: return "counterexample";
    }
    return "?";
}

/// Exit status: 0 success, 1 configuration error, 2 numerical failure, 3 invariant violation.
inline int exit_code_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::ParseError:
        case ErrorKind::ValidationError: return 1;
        case ErrorKind::ViolationDetected:
        case ErrorKind::CrossCheckMismatch: return 3;
        default: return 2;
    }
}

inline constexpr const char* kCurveHeader = "theta,fidelity,bures_angle_wootters,rate";

// ---------------------------------------------------------------- typed parameters

struct OrbitOptions {
    std::optional<double> theta_max;
    std::size_t samples = 2048;
    double eps = kOrthogonalityFidelity;
    std::size_t rate_samples = 512;
    double rate_tol = kRateTol;
};

struct BoundCheckParams {
    QuantumState state;
    Observable generator;
    OrbitOptions orbit;
};

struct SaturatingDemoParams {
    Observable generator;
    std::size_t level;
    double phase;
    OrbitOptions orbit;
};

struct QfiSweepParams {
    std::size_t count = 1000;
    std::size_t dim_min = 2;
    std::size_t dim_max = 8;
    double pure_fraction = 0.25;
    double generator_scale = 1.0;
    double tol = 1e-9;
};

struct DistanceTableParams {
    std::vector<DensityMatrix> states;  // explicit states
    std::size_t random_count = 0;       // or this many random states
    std::size_t dim = 2;
    std::size_t rank = 0;  // 0 = full rank
};

struct CounterexampleRunParams {
    CounterexampleParams params;
    double t_phi = 0.0;
};

using ScenarioParams =
    std::variant<BoundCheckParams, SaturatingDemoParams, QfiSweepParams, DistanceTableParams, CounterexampleRunParams>;

struct GridPoint {
    json overrides;  // key -> value applied on top of "parameters"
    ScenarioParams params;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::BoundCheck;
    double hbar = 1.0;
    DistanceConvention convention = DistanceConvention::WoottersAngle;
    std::uint64_t seed = 0;
    std::optional<std::string> output_path;
    std::optional<std::string> curve_path;
    json raw_parameters = json::object();
    std::optional<ScenarioParams> params;  // absent for sweeps
    json grid;                             // null unless a sweep
    std::vector<GridPoint> points;
};

// ---------------------------------------------------------------- validation helpers

namespace detail {

[[noreturn]] inline void invalid(const std::string& path, const std::string& what) {
    fail(ErrorKind::ValidationError, "'" + path + "': " + what);
}

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

/// Reads keys from one JSON object and rejects the ones never read.
class Fields {
public:
    Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) invalid(path_.empty() ? "<root>" : path_, "expected an object");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }
    std::string path(const std::string& key) const { return join(path_, key); }

    const json& get(const std::string& key) {
        seen_.insert(key);
        if (!obj_.contains(key)) fail(ErrorKind::ValidationError, "missing required key '" + path(key) + "'");
        return obj_.at(key);
    }

    double real(const std::string& key, std::optional<double> def = std::nullopt) {
        if (!has(key) && def) {
            seen_.insert(key);
            return *def;
        }
        const json& v = get(key);
        if (!v.is_number()) invalid(path(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) invalid(path(key), "must be finite");
        return x;
    }

    double positive(const std::string& key, std::optional<double> def = std::nullopt) {
        const double x = real(key, def);
        if (!(x > 0.0)) invalid(path(key), "must be > 0, got " + std::to_string(x));
        return x;
    }

    double in_range(const std::string& key, double lo, double hi, std::optional<double> def = std::nullopt) {
        const double x = real(key, def);
        if (x < lo || x > hi) invalid(path(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return x;
    }

    std::uint64_t integer(const std::string& key, std::uint64_t lo, std::uint64_t hi, std::optional<std::uint64_t> def = std::nullopt) {
        if (!has(key) && def) {
            seen_.insert(key);
            return *def;
        }
        const json& v = get(key);
        std::uint64_t x = 0;
        if (v.is_number_unsigned()) {
            x = v.get<std::uint64_t>();
        } else if (v.is_number_float() && v.get<double>() >= 0.0 && v.get<double>() == std::floor(v.get<double>()) &&
                   v.get<double>() < 1.8e19) {
            x = static_cast<std::uint64_t>(v.get<double>());
        } else {
            invalid(path(key), "expected a non-negative integer");
        }
        if (x < lo || x > hi) invalid(path(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return x;
    }

    std::string string(const std::string& key, std::optional<std::string> def = std::nullopt) {
        if (!has(key) && def) {
            seen_.insert(key);
            return *def;
        }
        const json& v = get(key);
        if (!v.is_string()) invalid(path(key), "expected a string");
        return v.get<std::string>();
    }

    void finish() const {
        for (const auto& [k, v] : obj_.items()) {
            if (!seen_.contains(k)) fail(ErrorKind::ValidationError, "unknown key '" + path(k) + "'");
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

inline cplx parse_entry(const json& v, const std::string& path) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) return {v[0].get<double>(), v[1].get<double>()};
    invalid(path, "expected a number or a [re, im] pair");
}

inline Vector parse_vector(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) invalid(path, "expected a non-empty array");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = parse_entry(v[i], path + "[" + std::to_string(i) + "]");
    return out;
}

inline Matrix parse_matrix(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) invalid(path, "expected a non-empty array of rows");
    const std::size_t n = v.size();
    Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const std::string row = path + "[" + std::to_string(i) + "]";
        if (!v[i].is_array() || v[i].size() != n) invalid(row, "expected a row of length " + std::to_string(n));
        for (std::size_t j = 0; j < n; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_entry(v[i][j], row + "[" + std::to_string(j) + "]");
    }
    return out;
}

/// Runs a constructor and turns its domain errors into validation errors at `path`.
template <typename F>
auto validated(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ValidationError) throw;
        invalid(path, std::string(to_string(e.kind())) + ": " + e.what());
    }
}

/// {"diag": [...]} or {"matrix": [[...], ...]}.
inline Observable parse_generator(const json& v, const std::string& path) {
    Fields f(v, path);
    std::optional<Matrix> m;
    if (f.has("diag")) m = Matrix(parse_vector(f.get("diag"), f.path("diag")).asDiagonal());
    if (f.has("matrix")) {
        if (m) invalid(path, "give exactly one of 'diag' or 'matrix'");
        m = parse_matrix(f.get("matrix"), f.path("matrix"));
    }
    if (!m) invalid(path, "give exactly one of 'diag' or 'matrix'");
    f.finish();
    return validated(path, [&] { return Observable(*m); });
}

/// {"amplitudes": [...]} (normalized on load) or {"density": [[...], ...]}.
inline QuantumState parse_state(const json& v, const std::string& path) {
    Fields f(v, path);
    std::optional<QuantumState> s;
    if (f.has("amplitudes")) {
        const Vector a = parse_vector(f.get("amplitudes"), f.path("amplitudes"));
        s = validated(path, [&] { return QuantumState(PureState::normalized(a)); });
    }
    if (f.has("density")) {
        if (s) invalid(path, "give exactly one of 'amplitudes' or 'density'");
        const Matrix m = parse_matrix(f.get("density"), f.path("density"));
        s = validated(path, [&] { return QuantumState(DensityMatrix(m)); });
    }
    if (!s) invalid(path, "give exactly one of 'amplitudes' or 'density'");
    f.finish();
    return *s;
}

inline OrbitOptions parse_orbit_options(Fields& f) {
    OrbitOptions o;
    if (f.has("theta_max")) o.theta_max = f.positive("theta_max");
    o.samples = f.integer("samples", 16, 1000000, 2048);
    o.eps = f.in_range("eps", 1e-15, 0.5, kOrthogonalityFidelity);
    o.rate_samples = f.integer("rate_samples", 8, 1000000, 512);
    o.rate_tol = f.positive("rate_tol", kRateTol);
    return o;
}

inline ScenarioParams parse_params(ScenarioKind kind, const json& obj, const std::string& path) {
    Fields f(obj, path);
    switch (kind) {
        case ScenarioKind::BoundCheck: {
            auto state = parse_state(f.get("state"), f.path("state"));
            auto gen = parse_generator(f.get("generator"), f.path("generator"));
            if (state_dim(state) != gen.dim()) invalid(f.path("state"), "dimension differs from the generator");
            auto orbit = parse_orbit_options(f);
            f.finish();
            return BoundCheckParams{std::move(state), std::move(gen), orbit};
        }
        case ScenarioKind::SaturatingDemo: {
            auto gen = parse_generator(f.get("generator"), f.path("generator"));
            const auto level = static_cast<std::size_t>(f.integer("level", 1, gen.dim() - 1));
            const double phase = f.real("phase", 0.0);
            auto orbit = parse_orbit_options(f);
            f.finish();
            validated(f.path("level"), [&] { return saturating_state(gen, level, phase); });
            return SaturatingDemoParams{std::move(gen), level, phase, orbit};
        }
        case ScenarioKind::QfiSweep: {
            QfiSweepParams p;
            p.count = f.integer("count", 1, 10000000);
            p.dim_min = f.integer("dim_min", 2, 64, 2);
            p.dim_max = f.integer("dim_max", 2, 64, 8);
            if (p.dim_max < p.dim_min) invalid(f.path("dim_max"), "must be >= dim_min");
            p.pure_fraction = f.in_range("pure_fraction", 0.0, 1.0, 0.25);
            p.generator_scale = f.positive("generator_scale", 1.0);
            p.tol = f.positive("tol", 1e-9);
            f.finish();
            return p;
        }
        case ScenarioKind::DistanceTable: {
            DistanceTableParams p;
            if (f.has("states") == f.has("random_states")) invalid(path, "give exactly one of 'states' or 'random_states'");
            if (f.has("states")) {
                const json& list = f.get("states");
                if (!list.is_array() || list.size() < 2) invalid(f.path("states"), "expected at least two states");
                for (std::size_t i = 0; i < list.size(); ++i) {
                    const std::string sp = f.path("states") + "[" + std::to_string(i) + "]";
                    p.states.push_back(to_density(parse_state(list[i], sp)));
                    if (p.states.back().dim() != p.states.front().dim()) invalid(sp, "dimension differs from states[0]");
                }
            } else {
                p.random_count = f.integer("random_states", 2, 1000);
                p.dim = f.integer("dim", 2, 64);
                p.rank = f.integer("rank", 1, p.dim, p.dim);
            }
            f.finish();
            return p;
        }
        case ScenarioKind::Counterexample: {
            CounterexampleRunParams r;
            r.params.e0 = f.positive("e0");
            r.params.eq = f.positive("eq");
            r.params.g = f.positive("g");
            r.params.n = f.integer("n", 1, kMaxCounterexampleSatellites);
            r.params.phi = f.real("phi", std::numbers::pi / static_cast<double>(r.params.n));
            r.t_phi = f.real("t_phi", 0.0);
            if (r.t_phi < 0.0) invalid(f.path("t_phi"), "must be >= 0");
            f.finish();
            return r;
        }
    }
    fail(ErrorKind::ValidationError, "unhandled kind");
}

inline std::string line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

// ---------------------------------------------------------------- parsing

inline ScenarioKind parse_kind(const std::string& s) {
    for (auto k : {ScenarioKind::BoundCheck, ScenarioKind::SaturatingDemo, ScenarioKind::QfiSweep, ScenarioKind::DistanceTable,
                   ScenarioKind::Counterexample}) {
        if (s == to_string(k)) return k;
    }
    detail::invalid("kind", "unknown kind \"" + s + "\"");
}

/// Parses and fully validates a configuration document. Syntax errors report
/// line and column; validation errors name the offending key path.
inline ScenarioConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        fail(ErrorKind::ParseError, "config syntax error at " + detail::line_col(text, e.byte) + ": " + e.what());
    }
    detail::Fields f(doc, "");
    ScenarioConfig c;
    c.kind = parse_kind(f.string("kind"));
    c.hbar = f.positive("hbar", 1.0);
    const std::string conv = f.string("convention", "wootters");
    if (conv == "wootters") c.convention = DistanceConvention::WoottersAngle;
    else if (conv == "fisher") c.convention = DistanceConvention::FisherAngle;
    else detail::invalid("convention", "expected \"wootters\" or \"fisher\"");
    c.seed = f.integer("seed", 0, std::numeric_limits<std::uint64_t>::max(), 0);
    if (f.has("output_path")) c.output_path = f.string("output_path");
    if (f.has("curve_path")) {
        c.curve_path = f.string("curve_path");
        if (c.kind != ScenarioKind::BoundCheck && c.kind != ScenarioKind::SaturatingDemo)
            detail::invalid("curve_path", "curves exist only for bound_check and saturating_demo");
    }
    c.raw_parameters = f.get("parameters");

    if (f.has("grid")) {
        c.grid = f.get("grid");
        if (c.curve_path) detail::invalid("curve_path", "not supported for sweeps");
        if (!c.grid.is_object() || c.grid.empty()) detail::invalid("grid", "expected a non-empty object of value lists");
        if (!c.raw_parameters.is_object()) detail::invalid("parameters", "expected an object");
        std::vector<std::pair<std::string, std::vector<json>>> axes;
        for (const auto& [key, values] : c.grid.items()) {
            if (!values.is_array() || values.empty()) detail::invalid("grid." + key, "expected a non-empty array");
            for (const auto& v : values)
                if (!v.is_number()) detail::invalid("grid." + key, "grid values must be numbers");
            axes.emplace_back(key, std::vector<json>(values.begin(), values.end()));
        }
        std::size_t total = 1;
        for (const auto& ax : axes) total *= ax.second.size();
        if (total > 100000) detail::invalid("grid", "more than 100000 grid points");
        // Mixed-radix enumeration, last axis fastest.
        for (std::size_t point = 0; point < total; ++point) {
            json overrides = json::object();
            json merged = c.raw_parameters;
            std::size_t rest = point;
            std::vector<std::size_t> idx(axes.size());
            for (std::size_t a = axes.size(); a-- > 0;) {
                idx[a] = rest % axes[a].second.size();
                rest /= axes[a].second.size();
            }
            for (std::size_t a = 0; a < axes.size(); ++a) {
                overrides[axes[a].first] = axes[a].second[idx[a]];
                merged[axes[a].first] = axes[a].second[idx[a]];
            }
            try {
                c.points.push_back({overrides, detail::parse_params(c.kind, merged, "parameters")});
            } catch (const Error& e) {
                fail(e.kind(), std::string(e.what()) + " (grid point " + overrides.dump() + ")");
            }
        }
    } else {
        c.params = detail::parse_params(c.kind, c.raw_parameters, "parameters");
    }
    f.finish();
    return c;
}

// ---------------------------------------------------------------- execution

struct RunOptions {
    bool include_timing = false;  // wall time breaks byte-identical reports, so it is opt-in
    std::optional<std::uint64_t> seed_override;
};

struct ScenarioResult {
    json result;
    bool violation = false;
    std::optional<std::string> curve_csv;
};

namespace detail {

inline std::string curve_csv(const RateReport& rep) {
    std::string out = std::string(kCurveHeader) + "\n";
    char buf[160];
    for (const auto& s : rep.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.theta, s.fidelity, s.angle, s.rate);
        out += buf;
    }
    return out;
}

inline json rate_json(const RateReport& r) {
    return {{"samples", r.samples.size()},
            {"mt_rate_limit", num(r.mt_rate_limit)},
            {"ml_rate_limit", num(r.ml_rate_limit)},
            {"max_rate", num(r.max_rate)},
            {"mt_violations", r.mt_violations},
            {"ml_rate_exceedances", r.ml_rate_exceedances},
            {"worst_ml_theta", num(r.worst_ml_theta)},
            {"worst_ml_excess", num(r.worst_ml_excess)}};
}

inline ScenarioResult orbit_result(const EvolutionScenario& sc, const OrbitOptions& o, DistanceConvention conv, bool want_curve) {
    const auto br = bound_report(sc, conv, o.eps);
    const auto rr = rate_bound_check(sc, o.rate_tol, o.rate_samples);
    ScenarioResult r;
    r.result = {{"dim", state_dim(sc.initial)},
                {"pure", is_pure(sc.initial)},
                {"orthogonality_theta", num(br.orthogonality_theta)},
                {"mt_bound", num(br.mt_bound)},
                {"ml_bound_ground_referenced", num(br.ml_bound_ground_referenced)},
                {"ml_bound_raw", num(br.ml_bound_raw)},
                {"attained_distance", num(br.attained_distance)},
                {"convention", to_string(br.convention)},
                {"respects_bounds", br.respects_bounds(1e-9)},
                {"rate_check", rate_json(rr)}};
    r.violation = !br.respects_bounds(1e-9);
    if (want_curve) r.curve_csv = curve_csv(rr);
    return r;
}

inline ScenarioResult run_qfi_sweep(const QfiSweepParams& p, std::uint64_t seed) {
    struct Trial {
        bool pure, full_rank;
        double excess, pure_gap, two_path;
    };
    std::vector<Trial> trials(p.count);
    const auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            Rng rng(derive_seed(seed, i));
            const std::size_t dim = p.dim_min + rng.index(0, p.dim_max - p.dim_min);
            const bool pure = rng.uniform() < p.pure_fraction;
            const std::size_t rank = pure ? 1 : 1 + rng.index(0, dim - 1);
            const DensityMatrix rho(rng.density(dim, rank));
            const Observable k(rng.hermitian(dim, p.generator_scale));
            const auto gap = qfi_variance_gap(rho, k);
            const bool full = rank == dim;
            trials[i] = {pure, full, gap.qfi - gap.bound, std::abs(gap.gap()),
                         full ? std::abs(gap.qfi - qfi_from_metric(rho, k)) : 0.0};
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
    const std::size_t chunk = (p.count + workers - 1) / workers;
    std::vector<std::future<void>> jobs;
    for (std::size_t lo = 0; lo < p.count; lo += chunk) jobs.push_back(std::async(std::launch::async, work, lo, std::min(p.count, lo + chunk)));
    for (auto& j : jobs) j.get();

    std::size_t pure = 0, full = 0, violations = 0;
    double max_excess = -std::numeric_limits<double>::infinity(), max_pure_gap = 0.0, max_two_path = 0.0;
    for (const auto& t : trials) {
        max_excess = std::max(max_excess, t.excess);
        if (t.excess > p.tol) ++violations;
        if (t.pure) {
            ++pure;
            max_pure_gap = std::max(max_pure_gap, t.pure_gap);
        }
        if (t.full_rank) {
            ++full;
            max_two_path = std::max(max_two_path, t.two_path);
        }
    }
    ScenarioResult r;
    r.result = {{"trials", p.count},
                {"pure_trials", pure},
                {"full_rank_trials", full},
                {"violations", violations},
                {"max_qfi_minus_bound", num(max_excess)},
                {"max_pure_gap", num(max_pure_gap)},
                {"max_two_path_discrepancy", num(max_two_path)}};
    r.violation = violations > 0 || max_pure_gap > p.tol || max_two_path > p.tol;
    return r;
}

inline ScenarioResult run_distance_table(const DistanceTableParams& p, DistanceConvention conv, std::uint64_t seed) {
    std::vector<DensityMatrix> states = p.states;
    if (states.empty()) {
        Rng rng(seed);
        for (std::size_t i = 0; i < p.random_count; ++i) states.emplace_back(rng.density(p.dim, p.rank));
    }
    json fid = json::array(), ang = json::array();
    for (const auto& a : states) {
        json frow = json::array(), arow = json::array();
        for (const auto& b : states) {
            frow.push_back(num(fidelity(a, b)));
            arow.push_back(num(bures_angle(a, b, conv)));
        }
        fid.push_back(frow);
        ang.push_back(arow);
    }
    ScenarioResult r;
    r.result = {{"count", states.size()}, {"dim", states.front().dim()}, {"convention", to_string(conv)}, {"fidelity", fid}, {"bures_angle", ang}};
    return r;
}

inline json verdict_json(const ViolationVerdict& v) {
    return {{"cz_constant", to_string(v.cz)},
            {"t_cz", num(v.timing.t_cz)},
            {"t_h", num(v.timing.t_h)},
            {"t_phi", num(v.timing.t_phi)},
            {"tau", num(v.timing.tau)},
            {"unitary_limit", num(v.unitary_limit)},
            {"violated", v.violated},
            {"regime_ok", v.regime_ok},
            {"g_threshold", num(v.g_threshold)}};
}

inline ScenarioResult run_counterexample(const CounterexampleRunParams& p) {
    const auto rep = end_to_end_counterexample(p.params, p.t_phi);
    double stage_res = 0.0, stage_comm = 0.0;
    for (double x : rep.stage_residuals) stage_res = std::max(stage_res, x);
    for (double x : rep.stage_commutators) stage_comm = std::max(stage_comm, x);
    json central = json::array();
    for (Eigen::Index i = 0; i < 2; ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < 2; ++j) row.push_back({num(rep.statevector.final_central.mat()(i, j).real()),
                                                            num(rep.statevector.final_central.mat()(i, j).imag())});
        central.push_back(row);
    }
    ScenarioResult r;
    r.result = {{"n", p.params.n},
                {"phi", num(p.params.phi)},
                {"orthogonalizing_phase", p.params.orthogonalizing()},
                {"orthogonal", rep.orthogonal},
                {"overlap_with_initial", num(rep.statevector.overlap_with_initial)},
                {"satellite_overlap", num(rep.statevector.satellite_overlap)},
                {"satellites_restored", rep.satellites_restored},
                {"final_central", central},
                {"stage_check_performed", rep.stage_check_performed},
                {"max_stage_residual", num(stage_res)},
                {"max_stage_commutator", num(stage_comm)},
                {"stated", verdict_json(rep.stated)},
                {"measured", verdict_json(rep.measured)},
                {"tau_small_tphi", num(rep.tau_small_tphi)},
                {"t_cz_stated", num(rep.t_cz_stated)},
                {"t_cz_measured", num(rep.t_cz_measured)},
                {"period_measured", num(rep.period_measured)},
                {"bounds_violated", rep.bounds_violated}};
    return r;
}

inline ScenarioResult run_params(const ScenarioParams& params, DistanceConvention conv, std::uint64_t seed, bool want_curve) {
    return std::visit(
        [&](const auto& p) -> ScenarioResult {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, BoundCheckParams>) {
                return orbit_result(EvolutionScenario(p.state, p.generator, p.orbit.theta_max, p.orbit.samples), p.orbit, conv, want_curve);
            } else if constexpr (std::is_same_v<T, SaturatingDemoParams>) {
                const PureState s = saturating_state(p.generator, p.level, p.phase);
                return orbit_result(EvolutionScenario(s, p.generator, p.orbit.theta_max, p.orbit.samples), p.orbit, conv, want_curve);
            } else if constexpr (std::is_same_v<T, QfiSweepParams>) {
                return run_qfi_sweep(p, seed);
            } else if constexpr (std::is_same_v<T, DistanceTableParams>) {
                return run_distance_table(p, conv, seed);
            } else {
                return run_counterexample(p);
            }
        },
        params);
}

}  // namespace detail

struct RunOutcome {
    json report;
    std::optional<std::string> curve_csv;
    bool violation = false;

    int exit_code() const { return violation ? 3 : 0; }
};

inline json config_echo(const ScenarioConfig& c, std::uint64_t seed) {
    json e = {{"kind", to_string(c.kind)}, {"hbar", num(c.hbar)}, {"convention", to_string(c.convention)}, {"seed", seed}};
    e["parameters"] = c.raw_parameters;
    if (!c.grid.is_null()) e["grid"] = c.grid;
    return e;
}

/// Executes a single (non-grid) scenario. Module errors propagate with the kind prefixed.
inline RunOutcome run(const ScenarioConfig& c, const RunOptions& opt = {}) {
    if (!c.params) fail(ErrorKind::ValidationError, "'grid': grids run with the sweep verb");
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed = opt.seed_override.value_or(c.seed);
    const ScopedHbar units(c.hbar);
    ScenarioResult r;
    try {
        r = detail::run_params(*c.params, c.convention, seed, c.curve_path.has_value());
    } catch (const Error& e) {
        fail(e.kind(), std::string(to_string(c.kind)) + " scenario: " + e.what());
    }
    RunOutcome out;
    out.report = {{"tool", "qsl"}, {"version", kToolVersion}, {"config", config_echo(c, seed)}, {"result", r.result}};
    out.report["status"] = r.violation ? "violation" : "ok";
    if (opt.include_timing)
        out.report["elapsed_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.curve_csv = r.curve_csv;
    out.violation = r.violation;
    return out;
}

/// Executes every grid point concurrently; results are assembled in grid order.
inline RunOutcome sweep(const ScenarioConfig& c, const RunOptions& opt = {}) {
    if (c.grid.is_null()) fail(ErrorKind::ValidationError, "missing required key 'grid'");
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed = opt.seed_override.value_or(c.seed);
    const ScopedHbar units(c.hbar);
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
    std::vector<ScenarioResult> results(c.points.size());
    for (std::size_t lo = 0; lo < c.points.size(); lo += workers) {
        const std::size_t hi = std::min(c.points.size(), lo + workers);
        std::vector<std::future<ScenarioResult>> jobs;
        for (std::size_t i = lo; i < hi; ++i) {
            jobs.push_back(std::async(std::launch::async, [&c, i, seed] {
                return detail::run_params(c.points[i].params, c.convention, seed, false);
            }));
        }
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                results[i] = jobs[i - lo].get();
            } catch (const Error& e) {
                for (std::size_t k = i + 1; k < hi; ++k) jobs[k - lo].wait();
                fail(e.kind(), std::string(to_string(c.kind)) + " sweep point " + c.points[i].overrides.dump() + ": " + e.what());
            }
        }
    }
    json points = json::array();
    bool violation = false;
    for (std::size_t i = 0; i < results.size(); ++i) {
        violation = violation || results[i].violation;
        points.push_back({{"overrides", c.points[i].overrides}, {"result", results[i].result}});
    }
    RunOutcome out;
    out.report = {{"tool", "qsl"}, {"version", kToolVersion}, {"config", config_echo(c, seed)}, {"points", points}};
    out.report["status"] = violation ? "violation" : "ok";
    if (opt.include_timing)
        out.report["elapsed_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.violation = violation;
    return out;
}

}  // namespace qsl::runner

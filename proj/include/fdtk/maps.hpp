#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "fdtk/geometry.hpp"
#include "fdtk/radial.hpp"

namespace fdtk {

// Divergence of int_0 dt / (t q^{1/(n-1)}(t)) for the power-log family,
// decided in closed form. After u = log(1/t) the integrand is
// ~ c^{-1/(n-1)} e^{-gamma u/(n-1)} u^{-s/(n-1)}: a p-series with log at
// gamma = 0.
inline bool power_log_criterion_diverges(const PowerLogParams& q, int n) {
    if (q.gamma != 0.0) return q.gamma < 0.0;
    return q.s <= Real(n - 1);
}

// ---------------------------------------------------------------------------
// Radial profiles rho(r), r in (0, 1)
// ---------------------------------------------------------------------------

// rho(r) = 1 + r^alpha, alpha in (0, 1)
struct PowerShiftProfile {
    Real alpha;

    explicit PowerShiftProfile(Real a) : alpha(a) {
        if (a <= 0)
            throw std::invalid_argument("PowerShiftProfile: alpha must be positive");
    }
    Real value(Real r) const { return 1.0 + std::pow(r, alpha); }
    Real derivative(Real r) const { return alpha * std::pow(r, alpha - 1.0); }
};

// rho(r) = exp(-int_r^1 dt / (t q^{1/(n-1)}(t)))
struct ExpIntegralProfile {
    RadialFn q;
    int n;
    std::optional<PowerLogParams> symbolic;  // set when q is a power-log field

    ExpIntegralProfile(RadialFn q_, int n_,
                       std::optional<PowerLogParams> sym = std::nullopt)
        : q(std::move(q_)), n(n_), symbolic(sym) {
        check_dimension(n_);
    }
    explicit ExpIntegralProfile(const PowerLogParams& p, int n_)
        : q(p), n(n_), symbolic(p) {
        check_dimension(n_);
    }

    // int_r^1 dt/(t q^{1/(n-1)}(t)) under u = log(1/t); the 1/t singularity
    // is absorbed by the substitution.
    Real tail_integral(Real r) const {
        const Real e = 1.0 / Real(n - 1);
        auto g = [&](Real u) { return std::pow(q(std::exp(-u)), -e); };
        return integrate(g, 0.0, std::log(1.0 / r));
    }

    Real value(Real r) const { return std::exp(-tail_integral(r)); }
    Real derivative(Real r) const {
        return value(r) / (r * std::pow(q(r), 1.0 / Real(n - 1)));
    }
};

struct TabulatedProfile {
    MonotoneCubic curve;

    TabulatedProfile(std::vector<Real> radii, std::vector<Real> values)
        : curve(std::move(radii), std::move(values)) {
        const auto& v = curve.values();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] <= 0)
                throw std::invalid_argument("TabulatedProfile: values must be positive");
            if (i > 0 && v[i] <= v[i - 1])
                throw std::invalid_argument("TabulatedProfile: values must increase");
        }
    }
    Real value(Real r) const { return curve(r); }
    Real derivative(Real r) const { return curve.derivative(r); }
};

using Profile = std::variant<PowerShiftProfile, ExpIntegralProfile, TabulatedProfile>;

inline Real profile_value(const Profile& p, Real r) {
    return std::visit([&](const auto& v) { return v.value(r); }, p);
}

inline Real profile_derivative(const Profile& p, Real r) {
    return std::visit([&](const auto& v) { return v.derivative(r); }, p);
}

struct LimitEstimate {
    Real value;
    Real error;  // stabilization error estimate; 0 when the value is exact
};

// lim_{r -> 0+} rho(r). Dyadic evaluation with Aitken extrapolation; for
// power-log ExpIntegral profiles the convergence dichotomy is decided in
// closed form and the limit is coupled to it.
inline LimitEstimate profile_limit_at_zero(const Profile& p) {
    if (const auto* e = std::get_if<ExpIntegralProfile>(&p)) {
        if (e->symbolic) {
            if (power_log_criterion_diverges(*e->symbolic, e->n)) return {0.0, 0.0};
            const Real ex = 1.0 / Real(e->n - 1);
            auto g = [&](Real u) { return std::pow(e->q(std::exp(-u)), -ex); };
            Real total = integrate(g, 0.0, std::numeric_limits<Real>::infinity());
            Real v = std::exp(-total);
            return {v, 1e-10 * v};
        }
    }
    if (const auto* t = std::get_if<TabulatedProfile>(&p)) {
        if (t->curve.x_min() > 1e-3)
            throw std::domain_error(
                "profile_limit_at_zero: tabulated data has no knots below 1e-3");
        Real v = t->curve.values().front();
        return {v, std::abs(t->curve.values()[1] - v)};
    }
    // Dyadic grid r_k = 2^{-k} with Aitken delta-squared stabilization.
    std::vector<Real> vals;
    Real r = 0.25;
    int tiny_streak = 0;
    for (int k = 0; k < 48; ++k, r *= 0.5) {
        Real v = profile_value(p, r);
        vals.push_back(v);
        tiny_streak = (v < 1e-9) ? tiny_streak + 1 : 0;
        if (tiny_streak >= 3) return {0.0, 1e-9};
        if (vals.size() >= 3) {
            std::size_t m = vals.size();
            Real d1 = vals[m - 2] - vals[m - 3];
            Real d2 = vals[m - 1] - vals[m - 2];
            if (std::abs(d2) < 1e-14 * std::max(std::abs(vals[m - 1]), 1.0))
                return {vals[m - 1], std::abs(d2)};
            Real ratio = d2 / d1;
            if (std::abs(ratio) < 0.999) {
                Real lim = vals[m - 1] + d2 * ratio / (1.0 - ratio);
                if (std::abs(d2 * ratio / (1.0 - ratio)) <
                    1e-10 * std::max(std::abs(lim), 1.0))
                    return {lim, std::abs(d2 * ratio / (1.0 - ratio))};
            }
        }
    }
    std::size_t m = vals.size();
    Real d = vals[m - 1] - vals[m - 2];
    Real ratio = d / (vals[m - 2] - vals[m - 3]);
    Real lim = std::abs(ratio) < 0.999 ? vals[m - 1] + d * ratio / (1.0 - ratio)
                                       : vals[m - 1];
    return {lim, std::abs(lim - vals[m - 1]) + std::abs(d)};
}

// ---------------------------------------------------------------------------
// Mapping families of the punctured unit ball
// ---------------------------------------------------------------------------

// f(x) = (x/|x|) rho(|x|)
struct RadialMap {
    Profile profile;
    int n;

    RadialMap(Profile p, int n_) : profile(std::move(p)), n(n_) { check_dimension(n_); }
};

// cylindrical twist: (r cos m phi, r sin m phi, x_3, ..., x_n)
struct TwistMap {
    int m;
    int n;

    TwistMap(int m_, int n_) : m(m_), n(n_) {
        if (m_ < 1) throw std::invalid_argument("TwistMap: m must be a positive integer");
        if (n_ < 3) throw std::invalid_argument("TwistMap: requires n >= 3");
    }
};

// f(z) = z^k on the punctured disk
struct PlanarPowerMap {
    int k;

    explicit PlanarPowerMap(int k_) : k(k_) {
        if (k_ < 1) throw std::invalid_argument("PlanarPowerMap: k must be positive");
    }
};

// f(z) = z + kappa * conj(z), kappa in [0, 1); test fixture
struct PlanarShearMap {
    Real kappa;

    explicit PlanarShearMap(Real k) : kappa(k) {
        if (k < 0 || k >= 1)
            throw std::invalid_argument("PlanarShearMap: kappa must lie in [0,1)");
    }
};

using MapSpec = std::variant<RadialMap, TwistMap, PlanarPowerMap, PlanarShearMap>;

inline int map_dimension(const MapSpec& spec) {
    return std::visit(
        [](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, RadialMap> || std::is_same_v<T, TwistMap>)
                return m.n;
            else
                return 2;
        },
        spec);
}

struct MapMetadata {
    bool bounded;
    bool open_discrete_closed;
    int multiplicity;  // N(f, D), declared per variant
};

inline MapMetadata map_metadata(const MapSpec& spec) {
    return std::visit(
        [](const auto& m) -> MapMetadata {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, RadialMap>)
                return {true, true, 1};
            else if constexpr (std::is_same_v<T, TwistMap>)
                return {true, true, m.m};
            else if constexpr (std::is_same_v<T, PlanarPowerMap>)
                return {true, true, m.k};
            else
                return {true, true, 1};
        },
        spec);
}

inline void check_in_punctured_ball(const Point& x) {
    Real r = norm(x);
    if (r == 0.0) throw std::domain_error("eval_map: x = 0 is outside the domain");
    if (r >= 1.0) throw std::domain_error("eval_map: |x| >= 1 is outside the domain");
}

inline Point eval_map(const MapSpec& spec, const Point& x) {
    check_in_punctured_ball(x);
    if ((int)x.size() != map_dimension(spec))
        throw std::invalid_argument("eval_map: point dimension mismatch");
    return std::visit(
        [&](const auto& m) -> Point {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, RadialMap>) {
                Real r = norm(x);
                Real rho = profile_value(m.profile, r);
                Point y(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] / r * rho;
                return y;
            } else if constexpr (std::is_same_v<T, TwistMap>) {
                Real r = std::hypot(x[0], x[1]);
                Real phi = std::atan2(x[1], x[0]);
                Point y = x;
                y[0] = r * std::cos(m.m * phi);
                y[1] = r * std::sin(m.m * phi);
                return y;
            } else if constexpr (std::is_same_v<T, PlanarPowerMap>) {
                std::complex<Real> z(x[0], x[1]);
                auto w = std::pow(z, m.k);
                return {w.real(), w.imag()};
            } else {
                return {x[0] + m.kappa * x[0], x[1] - m.kappa * x[1]};
            }
        },
        spec);
}

// ---------------------------------------------------------------------------
// Limit sets at the puncture
// ---------------------------------------------------------------------------

struct SinglePointLimit {
    Point point;
};

struct SphereSetLimit {
    Point center;
    Real radius;
};

using LimitSetDescription = std::variant<SinglePointLimit, SphereSetLimit>;

inline LimitSetDescription limit_set_at_zero(const MapSpec& spec) {
    const auto* radial = std::get_if<RadialMap>(&spec);
    if (!radial)
        throw std::invalid_argument("limit_set_at_zero: only radial maps are supported");
    LimitEstimate lim = profile_limit_at_zero(radial->profile);
    if (lim.value <= 0.0)
        return SinglePointLimit{Point(radial->n, 0.0)};
    return SphereSetLimit{Point(radial->n, 0.0), lim.value};
}

// True iff f extends continuously to 0 (the limit set is a single point).
inline bool extendable_ground_truth(const MapSpec& spec) {
    return std::holds_alternative<SinglePointLimit>(limit_set_at_zero(spec));
}

}  // namespace fdtk

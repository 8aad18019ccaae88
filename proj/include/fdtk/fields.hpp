#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "fdtk/differential.hpp"
#include "fdtk/geometry.hpp"
#include "fdtk/maps.hpp"
#include "fdtk/radial.hpp"

namespace fdtk {

// ---------------------------------------------------------------------------
// Majorant fields Q(x)
// ---------------------------------------------------------------------------

struct PowerLogField {
    PowerLogParams params;
    int n;

    PowerLogField(PowerLogParams p, int n_) : params(p), n(n_) { check_dimension(n_); }
};

// Q(x) = N * K_I(x, f)^exponent
struct FromMapField {
    MapSpec spec;
    Real exponent;      // 1 or 1/(n-1)
    int multiplicity;   // N

    FromMapField(MapSpec s, Real e, int mult = 1)
        : spec(std::move(s)), exponent(e), multiplicity(mult) {
        if (mult < 1) throw std::invalid_argument("FromMapField: multiplicity >= 1");
    }
};

struct TabulatedRadialField {
    MonotoneCubic curve;
    int n;

    TabulatedRadialField(std::vector<Real> radii, std::vector<Real> values, int n_)
        : curve(std::move(radii), std::move(values)), n(n_) {
        check_dimension(n_);
    }
};

// Radial field given by an arbitrary function of r, optionally with a known
// power-log form for symbolic classification.
struct GenericRadialField {
    RadialFn fn;
    int n;
    std::optional<PowerLogParams> symbolic;
};

// Non-radial test fixture, e.g. x_1^2/|x|^2.
struct AnisotropicField {
    std::function<Real(const Point&)> fn;
    int n;
};

using QField = std::variant<PowerLogField, FromMapField, TabulatedRadialField,
                            GenericRadialField, AnisotropicField>;

inline int field_dimension(const QField& q) {
    return std::visit(
        [](const auto& f) -> int {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, FromMapField>)
                return map_dimension(f.spec);
            else
                return f.n;
        },
        q);
}

inline bool field_is_radial(const QField& q) {
    return std::visit(
        [](const auto& f) -> bool {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, FromMapField>)
                return std::holds_alternative<RadialMap>(f.spec);
            else
                return !std::is_same_v<T, AnisotropicField>;
        },
        q);
}

inline Real eval_field(const QField& q, const Point& x);

// Radial value q(r) for radial fields (centered at 0).
inline Real radial_value(const QField& q, Real r) {
    return std::visit(
        [&](const auto& f) -> Real {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, PowerLogField>)
                return f.params(r);
            else if constexpr (std::is_same_v<T, TabulatedRadialField>)
                return f.curve(r);
            else if constexpr (std::is_same_v<T, GenericRadialField>)
                return f.fn(r);
            else if constexpr (std::is_same_v<T, FromMapField>) {
                if (!std::holds_alternative<RadialMap>(f.spec))
                    throw std::invalid_argument("radial_value: field is not radial");
                Point x(map_dimension(f.spec), 0.0);
                x[0] = r;
                return eval_field(f, x);
            } else {
                throw std::invalid_argument("radial_value: field is not radial");
            }
        },
        q);
}

inline Real eval_field(const QField& q, const Point& x) {
    return std::visit(
        [&](const auto& f) -> Real {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, FromMapField>) {
                Real ki = dilatation_sample(f.spec, x).K_I;
                return f.multiplicity * std::pow(ki, f.exponent);
            } else if constexpr (std::is_same_v<T, AnisotropicField>) {
                return f.fn(x);
            } else {
                return radial_value(QField(f), norm(x));
            }
        },
        q);
}

// Power-log form of the field (possibly as an envelope with the exact leading
// exponent), used for symbolic integrability classification.
inline std::optional<PowerLogParams> field_symbolic(const QField& q) {
    return std::visit(
        [](const auto& f) -> std::optional<PowerLogParams> {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, PowerLogField>)
                return f.params;
            else if constexpr (std::is_same_v<T, GenericRadialField>)
                return f.symbolic;
            else if constexpr (std::is_same_v<T, FromMapField>) {
                const auto* radial = std::get_if<RadialMap>(&f.spec);
                if (!radial) return std::nullopt;
                const int n = radial->n;
                if (const auto* ps = std::get_if<PowerShiftProfile>(&radial->profile)) {
                    // K_I = ((1 + r^a)/(a r^a))^{n-1} ~ a^{1-n} r^{-a(n-1)}
                    Real e = f.exponent;
                    return PowerLogParams{
                        Real(f.multiplicity) * std::pow(1.0 / ps->alpha, e * (n - 1)),
                        e * ps->alpha * (n - 1), 0.0};
                }
                if (const auto* ei = std::get_if<ExpIntegralProfile>(&radial->profile)) {
                    if (!ei->symbolic) return std::nullopt;
                    // K_I = q0(r): power-log with scaled exponents
                    const auto& p = *ei->symbolic;
                    Real e = f.exponent;
                    return PowerLogParams{Real(f.multiplicity) * std::pow(p.c, e),
                                          e * p.gamma, e * p.s};
                }
                return std::nullopt;
            } else {
                return std::nullopt;
            }
        },
        q);
}

// ---------------------------------------------------------------------------
// Spherical means and norms
// ---------------------------------------------------------------------------

struct FieldQuadratureOptions {
    int order = 16;
    int panels = 32;
    int radial_order = 8;
    bool radial_shortcut = true;  // radial fields about 0 reduce to 1-D
};

// q_{x0}(r) = (1/(omega_{n-1} r^{n-1})) int_{S(x0,r)} Q dH^{n-1}
inline Real spherical_mean(const QField& q, const Point& x0, Real r,
                           const FieldQuadratureOptions& opts = {}) {
    if (r <= 0) throw std::invalid_argument("spherical_mean: r must be positive");
    const int n = field_dimension(q);
    if (opts.radial_shortcut && field_is_radial(q) && norm(x0) == 0.0)
        return radial_value(q, r);
    SphereRule rule = sphere_rule(x0, r, n, opts.order);
    Real integral = rule.integrate([&](const Point& x) { return eval_field(q, x); });
    return integral / (unit_sphere_area(n) * std::pow(r, n - 1));
}

// ||Q||_k(r) = (int_{S(x0,r)} Q^k dH^{n-1})^{1/k}; k defaults to n-1.
inline Real sphere_Lnorm(const QField& q, const Point& x0, Real r, int k = 0,
                         const FieldQuadratureOptions& opts = {}) {
    if (r <= 0) throw std::invalid_argument("sphere_Lnorm: r must be positive");
    const int n = field_dimension(q);
    if (k <= 0) k = n - 1;
    if (opts.radial_shortcut && field_is_radial(q) && norm(x0) == 0.0)
        return radial_value(q, r) *
               std::pow(unit_sphere_area(n) * std::pow(r, n - 1), 1.0 / k);
    SphereRule rule = sphere_rule(x0, r, n, opts.order);
    Real integral =
        rule.integrate([&](const Point& x) { return std::pow(eval_field(q, x), k); });
    return std::pow(integral, 1.0 / k);
}

struct SphericalMeanTable {
    std::vector<Real> radii;  // decreasing
    std::vector<Real> means;
    int quadrature_order;
};

inline SphericalMeanTable spherical_mean_table(const QField& q, const Point& x0,
                                               const std::vector<Real>& radii,
                                               const FieldQuadratureOptions& opts = {}) {
    SphericalMeanTable t;
    t.radii = radii;
    t.quadrature_order = opts.order;
    for (Real r : radii) t.means.push_back(spherical_mean(q, x0, r, opts));
    return t;
}

// ---------------------------------------------------------------------------
// Ball L^p norms with symbolic divergence classification
// ---------------------------------------------------------------------------

struct LpResult {
    bool finite;
    Real value;  // meaningful when finite
    enum Method { Symbolic, Quadrature } method;
};

// int_0^R r^{n-1-p*gamma} log^{p*s} diverges iff p*gamma > n, or p*gamma = n
// with p*s >= -1 (p-series with log correction).
inline bool power_log_Lp_diverges(const PowerLogParams& q, Real p, int n) {
    Real pg = p * q.gamma;
    if (pg > Real(n)) return true;
    if (pg == Real(n)) return p * q.s >= -1.0;
    return false;
}

namespace detail {

// Deep in the u-substituted tail the field value can overflow while the r^n
// factor underflows; the true product is negligible there.
inline Real finite_or_zero(Real t) { return std::isfinite(t) ? t : 0.0; }

}  // namespace detail

inline Real ball_Lp_value_radial(const QField& q, Real p, Real radius, int n) {
    // omega int_0^R Q^p r^{n-1} dr under u = log(1/r)
    auto g = [&](Real u) {
        Real r = std::exp(-u);
        if (r < 1e-150) return 0.0;
        return detail::finite_or_zero(std::pow(radial_value(q, r), p) *
                                      std::pow(r, n));
    };
    return unit_sphere_area(n) *
           integrate(g, std::log(1.0 / radius), std::numeric_limits<Real>::infinity());
}

inline LpResult ball_Lp_norm(const QField& q, Real p, Real radius,
                             const FieldQuadratureOptions& opts = {}) {
    if (p < 1) throw std::invalid_argument("ball_Lp_norm: requires p >= 1");
    const int n = field_dimension(q);
    if (auto sym = field_symbolic(q)) {
        if (power_log_Lp_diverges(*sym, p, n))
            return {false, std::numeric_limits<Real>::infinity(), LpResult::Symbolic};
    }
    if (field_is_radial(q))
        return {true, ball_Lp_value_radial(q, p, radius, n), LpResult::Quadrature};
    BallRule rule = ball_rule(Point(n, 0.0), radius, n, opts.order, opts.panels,
                              opts.radial_order);
    Real v = rule.integrate(
        [&](const Point& x) { return std::pow(eval_field(q, x), p); });
    return {true, v, LpResult::Quadrature};
}

// Truncated integral over B(0,R) \ B(0,delta); always finite.
inline Real ball_Lp_norm_truncated(const QField& q, Real p, Real delta, Real radius) {
    const int n = field_dimension(q);
    if (!field_is_radial(q))
        throw std::invalid_argument("ball_Lp_norm_truncated: radial fields only");
    auto g = [&](Real u) {
        Real r = std::exp(-u);
        if (r < 1e-150) return 0.0;
        return detail::finite_or_zero(std::pow(radial_value(q, r), p) *
                                      std::pow(r, n));
    };
    return unit_sphere_area(n) *
           integrate(g, std::log(1.0 / radius), std::log(1.0 / delta));
}

// ---------------------------------------------------------------------------
// FMO estimator
// ---------------------------------------------------------------------------

// Mean over B(x0, eps) of |Q - mean(Q)|.
inline Real fmo_oscillation(const QField& q, const Point& x0, Real eps,
                            const FieldQuadratureOptions& opts = {}) {
    if (eps < 1e-8)
        throw std::domain_error("fmo_oscillation: eps below quadrature resolution");
    const int n = field_dimension(q);
    if (opts.radial_shortcut && field_is_radial(q) && norm(x0) == 0.0) {
        const Real vol_factor = Real(n) / std::pow(eps, n);
        auto moment = [&](const std::function<Real(Real)>& h) {
            auto g = [&](Real u) {
                Real r = std::exp(-u);
                if (r < 1e-150) return 0.0;
                return detail::finite_or_zero(h(r) * std::pow(r, n));
            };
            return vol_factor * integrate(g, std::log(1.0 / eps),
                                          std::numeric_limits<Real>::infinity(), 1e-9);
        };
        Real mean = moment([&](Real r) { return radial_value(q, r); });
        return moment([&](Real r) { return std::abs(radial_value(q, r) - mean); });
    }
    BallRule rule = ball_rule(x0, eps, n, opts.order, opts.panels, opts.radial_order);
    Real vol = unit_ball_volume(n) * std::pow(eps, n);
    Real mean = rule.integrate([&](const Point& x) { return eval_field(q, x); }) / vol;
    return rule.integrate(
               [&](const Point& x) { return std::abs(eval_field(q, x) - mean); }) /
           vol;
}

enum class FmoVerdict { FMO, NotFMO, Inconclusive };

struct FmoTrace {
    std::vector<Real> epsilons;
    std::vector<Real> oscillations;
    FmoVerdict verdict;
};

// Classifies over eps_k = eps0 * 2^{-k}, k = 0..K. FMO when the last K/2
// oscillations stay within 2x their median; NotFMO when they grow by >= 1.5x
// per step over the last 4 steps.
inline FmoTrace fmo_classify(const QField& q, const Point& x0, Real eps0 = 0.125,
                             int K = 12, const FieldQuadratureOptions& opts = {}) {
    FmoTrace t;
    Real eps = eps0;
    for (int k = 0; k <= K; ++k, eps *= 0.5) {
        t.epsilons.push_back(eps);
        t.oscillations.push_back(fmo_oscillation(q, x0, eps, opts));
    }
    const int half = (K + 1) / 2;
    std::vector<Real> tail(t.oscillations.end() - half, t.oscillations.end());
    std::vector<Real> sorted = tail;
    std::sort(sorted.begin(), sorted.end());
    Real median = sorted[sorted.size() / 2];

    bool growing = t.oscillations.back() > 1e-10;
    const std::size_t m = t.oscillations.size();
    for (std::size_t i = m - 4; i < m; ++i)
        if (!(t.oscillations[i] >= 1.5 * t.oscillations[i - 1])) growing = false;
    if (growing) {
        t.verdict = FmoVerdict::NotFMO;
        return t;
    }
    bool bounded = true;
    for (Real o : tail)
        if (o > 2.0 * median + 1e-12) bounded = false;
    t.verdict = bounded ? FmoVerdict::FMO : FmoVerdict::Inconclusive;
    return t;
}

}  // namespace fdtk

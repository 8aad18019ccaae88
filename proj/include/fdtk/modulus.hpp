#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fdtk/criterion.hpp"
#include "fdtk/fields.hpp"
#include "fdtk/maps.hpp"

namespace fdtk {

// ---------------------------------------------------------------------------
// Closed forms on the ring A(r1, r2)
// ---------------------------------------------------------------------------

// Modulus of the curve family joining the boundary spheres of the ring.
inline Real ring_curve_modulus(Real r1, Real r2, int n) {
    check_dimension(n);
    if (r1 <= 0) throw std::invalid_argument("ring_curve_modulus: requires r1 > 0");
    if (r1 >= r2) throw std::domain_error("ring_curve_modulus: degenerate ring (infinite modulus)");
    return unit_sphere_area(n) * std::pow(std::log(r2 / r1), 1 - n);
}

// Modulus of the family of concentric spheres S(0,t), t in (a,b), under
// (n-1)-surface admissibility.
inline Real sphere_family_modulus(Real a, Real b, int n) {
    check_dimension(n);
    if (a <= 0) throw std::invalid_argument("sphere_family_modulus: requires a > 0");
    if (a == b) return 0.0;
    if (a > b) throw std::invalid_argument("sphere_family_modulus: requires a <= b");
    return std::pow(unit_sphere_area(n), -1.0 / Real(n - 1)) * std::log(b / a);
}

inline Real ring_capacity(Real r1, Real r2, int n) {
    return ring_curve_modulus(r1, r2, n);
}

struct RingQuantities {
    Real r1, r2;
    int n;
    Real curve_modulus;
    Real capacity;
    Real surface_modulus;
};

struct DualityReport {
    RingQuantities ring;
    Real cap_vs_curve_gap;      // capacity - curve modulus (identically 0)
    Real ziemer_gap;            // surface modulus - capacity^{-1/(n-1)}
    bool ok;
};

inline RingQuantities ring_quantities(Real r1, Real r2, int n) {
    RingQuantities q;
    q.r1 = r1;
    q.r2 = r2;
    q.n = n;
    q.curve_modulus = ring_curve_modulus(r1, r2, n);
    q.capacity = ring_capacity(r1, r2, n);
    q.surface_modulus = sphere_family_modulus(r1, r2, n);
    return q;
}

inline DualityReport duality_report(Real r1, Real r2, int n, Real tol = 1e-12) {
    DualityReport rep;
    rep.ring = ring_quantities(r1, r2, n);
    rep.cap_vs_curve_gap = rep.ring.capacity - rep.ring.curve_modulus;
    rep.ziemer_gap = rep.ring.surface_modulus -
                     std::pow(rep.ring.capacity, -1.0 / Real(n - 1));
    rep.ok = rep.cap_vs_curve_gap == 0.0 &&
             std::abs(rep.ziemer_gap) <= tol * rep.ring.surface_modulus;
    return rep;
}

// ---------------------------------------------------------------------------
// Image sphere families of radial maps and the lower-Q inequality
// ---------------------------------------------------------------------------

// For a radial map, f(S(0,r)) = S(0, rho(r)); the image sphere-family modulus
// is the concentric one between rho(eps) and rho(r0).
inline Real image_sphere_family_modulus(const MapSpec& map, Real eps, Real r0, int n) {
    const auto* radial = std::get_if<RadialMap>(&map);
    if (!radial)
        throw std::invalid_argument("image_sphere_family_modulus: radial maps only");
    if (!(eps > 0 && eps < r0 && r0 <= 1.0))
        throw std::invalid_argument("image_sphere_family_modulus: requires 0 < eps < r0 <= 1");
    Real a = profile_value(radial->profile, eps);
    Real b = profile_value(radial->profile, r0);
    return sphere_family_modulus(a, b, n);
}

struct LowerQCheck {
    Real eps, r0;
    Real lhs;  // M(f(Sigma_eps))
    Real rhs;  // int_eps^{r0} dr / ||Q||_{n-1}(r)
    Real gap;  // lhs - rhs
    bool holds;
};

// Lemma-type lower bound for radial maps with a radial majorant:
// rhs reduces to omega^{-1/(n-1)} int dr/(r Q(r)).
inline LowerQCheck lower_Q_check_radial(const MapSpec& map, const QField& q, Real eps,
                                        Real r0, int n, Real tol = 1e-8) {
    if (!std::holds_alternative<RadialMap>(map))
        throw std::invalid_argument("lower_Q_check_radial: radial map required");
    if (!field_is_radial(q))
        throw std::invalid_argument("lower_Q_check_radial: radial field required");
    LowerQCheck c;
    c.eps = eps;
    c.r0 = r0;
    c.lhs = image_sphere_family_modulus(map, eps, r0, n);
    auto g = [&](Real u) {
        Real r = std::exp(-u);
        return 1.0 / radial_value(q, r);
    };
    c.rhs = std::pow(unit_sphere_area(n), -1.0 / Real(n - 1)) *
            integrate(g, std::log(1.0 / r0), std::log(1.0 / eps), 1e-10);
    c.gap = c.lhs - c.rhs;
    c.holds = c.gap >= -tol;
    return c;
}

// ---------------------------------------------------------------------------
// Variational oracle for the ring curve modulus
// ---------------------------------------------------------------------------

// Minimizes the discretized energy omega int rho(r)^n r^{n-1} dr over radially
// symmetric metrics subject to int_{r1}^{r2} rho dr >= 1 (midpoint grid).
// Stationarity gives rho_i = (lambda / (n omega r_i^{n-1}))^{1/(n-1)}; lambda
// is fixed by the active constraint.
inline Real variational_radial_modulus_oracle(Real r1, Real r2, int n, int grid_size) {
    check_dimension(n);
    if (grid_size < 64)
        throw std::invalid_argument("variational_radial_modulus_oracle: grid too small");
    if (!(0 < r1 && r1 < r2))
        throw std::invalid_argument("variational_radial_modulus_oracle: bad ring");
    const Real omega = unit_sphere_area(n);
    const Real h = (r2 - r1) / grid_size;
    std::vector<Real> shape(grid_size);  // rho up to the lambda scale factor
    for (int i = 0; i < grid_size; ++i) {
        Real r = r1 + (i + 0.5) * h;
        shape[i] = std::pow(std::pow(r, n - 1), -1.0 / Real(n - 1));
    }
    Real mass = 0.0;
    for (Real s : shape) mass += h * s;
    Real scale = 1.0 / mass;  // enforce the unit-admissibility constraint
    std::vector<Real> terms(grid_size);
    for (int i = 0; i < grid_size; ++i) {
        Real r = r1 + (i + 0.5) * h;
        terms[i] = omega * h * std::pow(scale * shape[i], n) * std::pow(r, n - 1);
    }
    return pairwise_sum(terms);
}

// Joint minimization over a union of disjoint rings (one admissibility
// constraint per ring; the energy is separable, so the optimum splits).
inline Real variational_union_modulus_oracle(const std::vector<std::pair<Real, Real>>& rings,
                                             int n, int grid_size) {
    Real total = 0.0;
    for (auto [a, b] : rings) total += variational_radial_modulus_oracle(a, b, n, grid_size);
    return total;
}

// Qualitative capacity growth with the diameter of the inner continuum:
// concentric closed balls B(0, d/2) inside the unit ball.
inline Real ball_continuum_capacity(Real diameter, int n) {
    if (!(diameter > 0 && diameter < 2.0))
        throw std::invalid_argument("ball_continuum_capacity: diameter in (0, 2)");
    return ring_capacity(diameter / 2.0, 1.0, n);
}

}  // namespace fdtk

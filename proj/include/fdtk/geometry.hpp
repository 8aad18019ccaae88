#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fdtk/numerics.hpp"

namespace fdtk {

using Point = std::vector<Real>;

inline void check_dimension(int n) {
    if (n < 2) throw std::invalid_argument("dimension must be >= 2");
}

// omega_{n-1}: (n-1)-area of the unit sphere in R^n.
inline Real unit_sphere_area(int n) {
    check_dimension(n);
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

// Omega_n: volume of the unit ball in R^n.
inline Real unit_ball_volume(int n) {
    return unit_sphere_area(n) / n;
}

inline Real norm(const Point& x) {
    Real s = 0.0;
    for (Real c : x) s += c * c;
    return std::sqrt(s);
}

inline Point sub(const Point& a, const Point& b) {
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

struct AnnulusSpec {
    Point center;
    Real r1, r2;

    AnnulusSpec(Point c, Real r1_, Real r2_) : center(std::move(c)), r1(r1_), r2(r2_) {
        if (r1 <= 0) throw std::invalid_argument("annulus: r1 must be positive");
        if (r1 >= r2) throw std::invalid_argument("annulus: requires r1 < r2");
    }
};

// Quadrature rule on a sphere S(center, radius). Weights carry (n-1)-area units.
struct SphereRule {
    Point center;
    Real radius;
    int n;
    std::vector<Point> nodes;
    std::vector<Real> weights;

    template <class F>
    Real integrate(F&& f) const {
        std::vector<Real> terms(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i)
            terms[i] = weights[i] * f(nodes[i]);
        return pairwise_sum(terms);
    }
};

// Quadrature rule on a ball or spherical annulus; weights carry volume units.
struct BallRule {
    Point center;
    Real r_inner;  // 0 for a full ball
    Real r_outer;
    int n;
    std::vector<Point> nodes;
    std::vector<Real> weights;

    template <class F>
    Real integrate(F&& f) const {
        std::vector<Real> terms(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i)
            terms[i] = weights[i] * f(nodes[i]);
        return pairwise_sum(terms);
    }
};

namespace detail {

// Unit-sphere nodes and weights (weights sum to omega_{n-1}).
// n = 2: uniform trapezoid in angle. n >= 3: product rule in hyperspherical
// coordinates, Gauss-Legendre in each polar angle, uniform in azimuth.
inline void unit_sphere_nodes(int n, int order, std::vector<Point>& nodes,
                              std::vector<Real>& weights) {
    nodes.clear();
    weights.clear();
    const int n_azimuth = 2 * order;
    if (n == 2) {
        for (int j = 0; j < n_azimuth; ++j) {
            Real phi = 2.0 * M_PI * j / n_azimuth;
            nodes.push_back({std::cos(phi), std::sin(phi)});
            weights.push_back(2.0 * M_PI / n_azimuth);
        }
        return;
    }
    Quadrature1D gl = gauss_legendre(order);
    // polar angles theta_1..theta_{n-2} in (0, pi), azimuth phi in [0, 2pi)
    const int n_polar = n - 2;
    std::vector<int> idx(n_polar, 0);
    for (;;) {
        Real w_polar = 1.0;
        std::vector<Real> theta(n_polar);
        for (int k = 0; k < n_polar; ++k) {
            Real t = 0.5 * M_PI * (gl.nodes[idx[k]] + 1.0);
            theta[k] = t;
            // surface measure carries sin^{n-2-k}(theta_k)
            w_polar *= 0.5 * M_PI * gl.weights[idx[k]] *
                       std::pow(std::sin(t), n - 2 - k);
        }
        for (int j = 0; j < n_azimuth; ++j) {
            Real phi = 2.0 * M_PI * j / n_azimuth;
            Point x(n);
            Real s = 1.0;
            for (int k = 0; k < n_polar; ++k) {
                x[k] = s * std::cos(theta[k]);
                s *= std::sin(theta[k]);
            }
            x[n - 2] = s * std::cos(phi);
            x[n - 1] = s * std::sin(phi);
            nodes.push_back(std::move(x));
            weights.push_back(w_polar * 2.0 * M_PI / n_azimuth);
        }
        int k = n_polar - 1;
        while (k >= 0 && ++idx[k] == order) idx[k--] = 0;
        if (k < 0) break;
    }
    // normalize so the weight sum matches omega_{n-1} exactly
    Real total = pairwise_sum(weights);
    Real scale = unit_sphere_area(n) / total;
    for (Real& w : weights) w *= scale;
}

}  // namespace detail

inline SphereRule sphere_rule(Point center, Real radius, int n, int order = 16) {
    check_dimension(n);
    if (radius <= 0) throw std::invalid_argument("sphere_rule: radius must be positive");
    if (order < 2) throw std::invalid_argument("sphere_rule: order must be >= 2");
    SphereRule rule;
    rule.center = center;
    rule.radius = radius;
    rule.n = n;
    detail::unit_sphere_nodes(n, order, rule.nodes, rule.weights);
    const Real scale = std::pow(radius, n - 1);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        for (int k = 0; k < n; ++k)
            rule.nodes[i][k] = center[k] + radius * rule.nodes[i][k];
        rule.weights[i] *= scale;
    }
    return rule;
}

namespace detail {

// Radial panels for [r_inner, r_outer]. For r_inner == 0 the mesh is graded
// dyadically toward 0 so that center-singular integrands resolve.
inline std::vector<std::pair<Real, Real>> radial_panels(Real r_inner, Real r_outer,
                                                        int panels) {
    std::vector<std::pair<Real, Real>> out;
    if (r_inner > 0) {
        Real h = (r_outer - r_inner) / panels;
        for (int k = 0; k < panels; ++k)
            out.emplace_back(r_inner + k * h, r_inner + (k + 1) * h);
        return out;
    }
    Real hi = r_outer;
    for (int k = 0; k < panels - 1; ++k) {
        Real lo = hi * 0.5;
        out.emplace_back(lo, hi);
        hi = lo;
    }
    out.emplace_back(0.0, hi);
    return out;
}

}  // namespace detail

// Ball (r_inner = 0) or annulus rule: radial Gauss-Legendre on graded panels
// tensored with the sphere rule.
inline BallRule annulus_rule(Point center, Real r_inner, Real r_outer, int n,
                             int order = 16, int panels = 32, int radial_order = 8) {
    check_dimension(n);
    if (r_outer <= 0 || r_inner < 0 || r_inner >= r_outer)
        throw std::invalid_argument("annulus_rule: requires 0 <= r_inner < r_outer");
    std::vector<Point> sph_nodes;
    std::vector<Real> sph_weights;
    detail::unit_sphere_nodes(n, order, sph_nodes, sph_weights);
    Quadrature1D gl = gauss_legendre(radial_order);

    BallRule rule;
    rule.center = center;
    rule.r_inner = r_inner;
    rule.r_outer = r_outer;
    rule.n = n;
    for (auto [lo, hi] : detail::radial_panels(r_inner, r_outer, panels)) {
        Real mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int i = 0; i < radial_order; ++i) {
            Real r = mid + half * gl.nodes[i];
            Real wr = half * gl.weights[i] * std::pow(r, n - 1);
            for (std::size_t j = 0; j < sph_nodes.size(); ++j) {
                Point x(n);
                for (int k = 0; k < n; ++k) x[k] = center[k] + r * sph_nodes[j][k];
                rule.nodes.push_back(std::move(x));
                rule.weights.push_back(wr * sph_weights[j]);
            }
        }
    }
    return rule;
}

inline BallRule ball_rule(Point center, Real radius, int n, int order = 16,
                          int panels = 32, int radial_order = 8) {
    return annulus_rule(std::move(center), 0.0, radius, n, order, panels, radial_order);
}

}  // namespace fdtk

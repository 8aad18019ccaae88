#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fdtk {

using Real = double;
using RadialFn = std::function<Real(Real)>;

// Deterministic pairwise (tree) reduction. Result does not depend on how the
// caller chunks the input, only on its order.
inline Real pairwise_sum(std::span<const Real> v) {
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        Real s = 0.0;
        for (Real x : v) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

inline Real pairwise_sum(const std::vector<Real>& v) {
    return pairwise_sum(std::span<const Real>(v.data(), v.size()));
}

struct Quadrature1D {
    std::vector<Real> nodes;    // on [-1, 1]
    std::vector<Real> weights;  // sum to 2
};

// Gauss-Legendre nodes/weights by Newton iteration on P_m. m <= a few hundred
// in practice; converges in 3-4 iterations from the Chebyshev initial guess.
inline Quadrature1D gauss_legendre(int m) {
    if (m < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    Quadrature1D q;
    q.nodes.resize(m);
    q.weights.resize(m);
    for (int i = 0; i < m; ++i) {
        Real x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        Real dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Recurrence for P_m(x) and P'_m(x)
            Real p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            Real dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        q.nodes[i] = x;
        q.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return q;
}

// Adaptive 1-D quadrature on a finite or semi-infinite interval.
inline Real integrate(const std::function<Real(Real)>& f, Real a, Real b,
                      Real rel_tol = 1e-11) {
    return boost::math::quadrature::gauss_kronrod<Real, 15>::integrate(
        f, a, b, 15, rel_tol);
}

// Root of a continuous function by bisection; f(a) and f(b) must differ in sign.
inline Real bisect(const std::function<Real(Real)>& f, Real a, Real b,
                   Real tol = 1e-14) {
    Real fa = f(a);
    for (int it = 0; it < 200 && (b - a) > tol * std::max(std::abs(a), 1.0); ++it) {
        Real m = 0.5 * (a + b);
        Real fm = f(m);
        if ((fa <= 0) == (fm <= 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace fdtk

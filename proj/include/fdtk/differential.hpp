#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fdtk/maps.hpp"

namespace fdtk {

// Small dense n x n matrix, n <= 8.
struct Mat {
    int n = 0;
    std::array<Real, 64> a{};

    Mat() = default;
    explicit Mat(int n_) : n(n_) {
        if (n_ < 1 || n_ > 8) throw std::invalid_argument("Mat: n must lie in [1,8]");
    }
    Real& operator()(int i, int j) { return a[i * n + j]; }
    Real operator()(int i, int j) const { return a[i * n + j]; }

    static Mat identity(int n) {
        Mat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    Real frobenius_norm() const {
        Real s = 0.0;
        for (int i = 0; i < n * n; ++i) s += a[i] * a[i];
        return std::sqrt(s);
    }

    bool is_zero(Real tol = 0.0) const {
        for (int i = 0; i < n * n; ++i)
            if (std::abs(a[i]) > tol) return false;
        return true;
    }
};

// Singular values by one-sided Jacobi: orthogonalize the columns by plane
// rotations until all pairs are orthogonal to 1e-12 relative.
inline std::vector<Real> singular_values(const Mat& m) {
    const int n = m.n;
    Mat u = m;
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool converged = true;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                Real app = 0, aqq = 0, apq = 0;
                for (int i = 0; i < n; ++i) {
                    app += u(i, p) * u(i, p);
                    aqq += u(i, q) * u(i, q);
                    apq += u(i, p) * u(i, q);
                }
                if (std::abs(apq) <= 1e-12 * std::sqrt(app * aqq) ||
                    std::abs(apq) < 1e-300)
                    continue;
                converged = false;
                Real tau = (aqq - app) / (2.0 * apq);
                Real t = (tau >= 0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                Real c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
                for (int i = 0; i < n; ++i) {
                    Real up = u(i, p), uq = u(i, q);
                    u(i, p) = c * up - s * uq;
                    u(i, q) = s * up + c * uq;
                }
            }
        }
        if (converged) break;
    }
    std::vector<Real> sv(n);
    for (int j = 0; j < n; ++j) {
        Real s = 0;
        for (int i = 0; i < n; ++i) s += u(i, j) * u(i, j);
        sv[j] = std::sqrt(s);
    }
    std::sort(sv.begin(), sv.end());
    return sv;
}

inline Real det(const Mat& m) {
    Mat lu = m;
    const int n = m.n;
    Real d = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(lu.a[k * n + j], lu.a[piv * n + j]);
            d = -d;
        }
        if (lu(k, k) == 0.0) return 0.0;
        d *= lu(k, k);
        for (int i = k + 1; i < n; ++i) {
            Real f = lu(i, k) / lu(k, k);
            for (int j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
        }
    }
    return d;
}

// Inner dilatation of a matrix: (prod lambda_i)/lambda_1^n when det != 0,
// 1 for the zero matrix, +inf for rank-deficient nonzero matrices.
inline Real inner_dilatation(const Mat& m, Real zero_tol = 0.0) {
    if (m.is_zero(zero_tol)) return 1.0;
    auto sv = singular_values(m);
    if (sv.front() <= 1e-300 * std::max(sv.back(), 1.0))
        return std::numeric_limits<Real>::infinity();
    Real k = 1.0;
    for (Real l : sv) k *= l / sv.front();
    return k;
}

struct JacobianMethod {
    enum Kind { Analytic, FiniteDifference } kind = Analytic;
    Real h = 0.0;  // 0: eps^{1/3}-scaled default step

    static JacobianMethod analytic() { return {Analytic, 0.0}; }
    static JacobianMethod finite_difference(Real step = 0.0) {
        if (step < 0) throw std::invalid_argument("finite_difference: h must be > 0");
        return {FiniteDifference, step};
    }
};

namespace detail {

inline Mat radial_jacobian(const RadialMap& m, const Point& x) {
    const int n = m.n;
    Real r = norm(x);
    Real rho = profile_value(m.profile, r);
    Real drho = profile_derivative(m.profile, r);
    // J = rho'(r) u u^T + (rho(r)/r) (I - u u^T), u = x/r
    Mat j(n);
    for (int i = 0; i < n; ++i) {
        Real ui = x[i] / r;
        for (int k = 0; k < n; ++k) {
            Real uk = x[k] / r;
            j(i, k) = drho * ui * uk + rho / r * ((i == k ? 1.0 : 0.0) - ui * uk);
        }
    }
    return j;
}

inline Mat twist_jacobian(const TwistMap& m, const Point& x) {
    const int n = m.n;
    Real phi = std::atan2(x[1], x[0]);
    Real c = std::cos(m.m * phi), s = std::sin(m.m * phi);
    Real cp = std::cos(phi), sp = std::sin(phi);
    Mat j = Mat::identity(n);
    j(0, 0) = c * cp + m.m * s * sp;
    j(0, 1) = c * sp - m.m * s * cp;
    j(1, 0) = s * cp - m.m * c * sp;
    j(1, 1) = s * sp + m.m * c * cp;
    return j;
}

// 2x2 Jacobian from the Wirtinger derivatives f_z, f_zbar.
inline Mat planar_jacobian(std::complex<Real> fz, std::complex<Real> fzb) {
    auto fx = fz + fzb;             // u_x + i v_x
    auto fy = std::complex<Real>(0, 1) * (fz - fzb);  // u_y + i v_y
    Mat j(2);
    j(0, 0) = fx.real();
    j(0, 1) = fy.real();
    j(1, 0) = fx.imag();
    j(1, 1) = fy.imag();
    return j;
}

}  // namespace detail

inline Mat jacobian(const MapSpec& spec, const Point& x,
                    JacobianMethod method = JacobianMethod::analytic()) {
    if (norm(x) == 0.0)
        throw std::domain_error("jacobian: x = 0 is outside the domain");
    const int n = map_dimension(spec);
    if (method.kind == JacobianMethod::FiniteDifference) {
        check_in_punctured_ball(x);
        Real h = method.h > 0
                     ? method.h
                     : std::cbrt(std::numeric_limits<Real>::epsilon()) *
                           std::max(1.0, norm(x));
        Mat j(n);
        for (int k = 0; k < n; ++k) {
            Point xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            Point fp = eval_map(spec, xp), fm = eval_map(spec, xm);
            for (int i = 0; i < n; ++i) j(i, k) = (fp[i] - fm[i]) / (2.0 * h);
        }
        return j;
    }
    return std::visit(
        [&](const auto& m) -> Mat {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, RadialMap>)
                return detail::radial_jacobian(m, x);
            else if constexpr (std::is_same_v<T, TwistMap>)
                return detail::twist_jacobian(m, x);
            else if constexpr (std::is_same_v<T, PlanarPowerMap>) {
                std::complex<Real> z(x[0], x[1]);
                return detail::planar_jacobian(Real(m.k) * std::pow(z, m.k - 1), 0.0);
            } else
                return detail::planar_jacobian(1.0, m.kappa);
        },
        spec);
}

// Pointwise differential data at one point.
struct DilatationSample {
    Point point;
    Mat jac;
    std::vector<Real> sv;  // ascending
    Real jac_det_abs;
    Real operator_norm;  // lambda_n
    Real min_stretch;    // lambda_1
    Real K_I;
};

inline DilatationSample dilatation_sample(const MapSpec& spec, const Point& x,
                                          JacobianMethod method = JacobianMethod::analytic()) {
    DilatationSample s;
    s.point = x;
    s.jac = jacobian(spec, x, method);
    s.sv = singular_values(s.jac);
    s.jac_det_abs = std::abs(det(s.jac));
    s.min_stretch = s.sv.front();
    s.operator_norm = s.sv.back();
    s.K_I = inner_dilatation(s.jac,
                             method.kind == JacobianMethod::FiniteDifference ? 1e-13 : 0.0);
    return s;
}

// ---------------------------------------------------------------------------
// Planar complex dilatation
// ---------------------------------------------------------------------------

struct PlanarDilatation {
    std::complex<Real> mu;
    Real K_mu;
};

// mu = f_zbar / f_z from the Jacobian; mu := 0 when f_z = 0. The maximal
// dilatation is K_mu = (1 + |mu|) / (1 - |mu|).
inline PlanarDilatation complex_dilatation(const MapSpec& spec, const Point& z,
                                           JacobianMethod method = JacobianMethod::analytic()) {
    if (map_dimension(spec) != 2)
        throw std::invalid_argument("complex_dilatation: requires a planar map");
    Mat j = jacobian(spec, z, method);
    std::complex<Real> fz(0.5 * (j(0, 0) + j(1, 1)), 0.5 * (j(1, 0) - j(0, 1)));
    std::complex<Real> fzb(0.5 * (j(0, 0) - j(1, 1)), 0.5 * (j(1, 0) + j(0, 1)));
    PlanarDilatation d;
    d.mu = (std::abs(fz) == 0.0) ? std::complex<Real>(0.0) : fzb / fz;
    Real am = std::abs(d.mu);
    d.K_mu = (1.0 + am) / (1.0 - am);
    return d;
}

// ---------------------------------------------------------------------------
// Orlicz energy over an annulus
// ---------------------------------------------------------------------------

// int_A phi(|grad f|) dm with |grad f| the Frobenius norm of the Jacobian.
template <class Phi>
inline Real orlicz_energy(const MapSpec& spec, const AnnulusSpec& region, Phi&& phi,
                          int order = 16, int panels = 16, int radial_order = 8) {
    if (region.r2 >= 1.0)
        throw std::domain_error("orlicz_energy: region must stay inside the unit ball");
    BallRule rule = annulus_rule(region.center, region.r1, region.r2,
                                 map_dimension(spec), order, panels, radial_order);
    return rule.integrate([&](const Point& x) {
        return phi(jacobian(spec, x).frobenius_norm());
    });
}

}  // namespace fdtk

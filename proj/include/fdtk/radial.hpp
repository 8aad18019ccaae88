#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fdtk/numerics.hpp"

namespace fdtk {

// Power-log radial family: Q(r) = c * r^{-gamma} * log(e + 1/r)^s.
// The log(e + 1/r) form stays positive up to r = 1; near 0 it behaves as
// log(1/r), so divergence classification is unaffected.
struct PowerLogParams {
    Real c = 1.0;
    Real gamma = 0.0;
    Real s = 0.0;

    Real operator()(Real r) const {
        return c * std::pow(r, -gamma) * std::pow(std::log(M_E + 1.0 / r), s);
    }
};

// Monotone piecewise-cubic interpolation (Fritsch-Carlson slopes). Used for
// tabulated radial data; preserves monotonicity of the input values.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<Real> x, std::vector<Real> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("MonotoneCubic: need >= 2 matching knots");
        for (std::size_t i = 1; i < n; ++i)
            if (x_[i] <= x_[i - 1])
                throw std::invalid_argument("MonotoneCubic: knots must increase");
        std::vector<Real> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        m_.resize(n);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i)
            m_[i] = (d[i - 1] * d[i] <= 0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) {
                m_[i] = m_[i + 1] = 0.0;
                continue;
            }
            Real a = m_[i] / d[i], b = m_[i + 1] / d[i];
            Real h = std::hypot(a, b);
            if (h > 3.0) {
                m_[i] = 3.0 * a / h * d[i];
                m_[i + 1] = 3.0 * b / h * d[i];
            }
        }
    }

    Real operator()(Real x) const {
        const auto [i, t, h] = locate(x);
        Real t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * m_[i] +
               (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * m_[i + 1];
    }

    Real derivative(Real x) const {
        const auto [i, t, h] = locate(x);
        Real t2 = t * t;
        return ((6 * t2 - 6 * t) * y_[i] + (3 * t2 - 4 * t + 1) * h * m_[i] +
                (-6 * t2 + 6 * t) * y_[i + 1] + (3 * t2 - 2 * t) * h * m_[i + 1]) / h;
    }

    Real x_min() const { return x_.front(); }
    Real x_max() const { return x_.back(); }
    const std::vector<Real>& knots() const { return x_; }
    const std::vector<Real>& values() const { return y_; }

private:
    struct Segment { std::size_t i; Real t; Real h; };

    Segment locate(Real x) const {
        std::size_t i = 0;
        while (i + 2 < x_.size() && x >= x_[i + 1]) ++i;
        Real h = x_[i + 1] - x_[i];
        return {i, (x - x_[i]) / h, h};
    }

    std::vector<Real> x_, y_, m_;
};

}  // namespace fdtk

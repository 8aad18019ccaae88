#include <doctest.h>

#include <random>

#include "fdtk/maps.hpp"

using namespace fdtk;

namespace {

// random rotation about 0 by Gram-Schmidt on a Gaussian matrix
std::vector<std::vector<Real>> random_rotation(int n, std::mt19937_64& rng) {
    std::normal_distribution<Real> gauss;
    std::vector<std::vector<Real>> q(n, std::vector<Real>(n));
    for (auto& row : q)
        for (auto& v : row) v = gauss(rng);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            Real d = 0;
            for (int k = 0; k < n; ++k) d += q[i][k] * q[j][k];
            for (int k = 0; k < n; ++k) q[i][k] -= d * q[j][k];
        }
        Real s = 0;
        for (int k = 0; k < n; ++k) s += q[i][k] * q[i][k];
        for (int k = 0; k < n; ++k) q[i][k] /= std::sqrt(s);
    }
    return q;
}

Point rotate_pt(const std::vector<std::vector<Real>>& m, const Point& x) {
    Point y(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t k = 0; k < x.size(); ++k) y[i] += m[i][k] * x[k];
    return y;
}

}  // namespace

TEST_CASE("eval_map closed forms") {
    SUBCASE("radial power-shift") {
        MapSpec g = RadialMap(PowerShiftProfile(0.5), 3);
        Point y = eval_map(g, {0.25, 0, 0});
        CHECK(y[0] == doctest::Approx(1.5).epsilon(1e-15));
        CHECK(y[1] == 0.0);
        CHECK(y[2] == 0.0);
    }
    SUBCASE("twist fixes the phi = 0 ray") {
        MapSpec f = TwistMap(2, 3);
        Point y = eval_map(f, {0.3, 0.0, 0.4});
        CHECK(y[0] == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(y[1] == doctest::Approx(0.0));
        CHECK(y[2] == 0.4);
    }
    SUBCASE("planar power at i") {
        MapSpec f = PlanarPowerMap(2);
        Point y = eval_map(f, {0.0, 0.5});
        // (i/2)^2 = -1/4
        CHECK(y[0] == doctest::Approx(-0.25).epsilon(1e-14));
        CHECK(y[1] == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("domain errors") {
        MapSpec g = RadialMap(PowerShiftProfile(0.5), 3);
        CHECK_THROWS_AS(eval_map(g, {0, 0, 0}), std::domain_error);
        CHECK_THROWS_AS(eval_map(g, {1.0, 0, 0}), std::domain_error);
    }
}

TEST_CASE("profile validation") {
    CHECK_THROWS(PowerShiftProfile(0.0));
    CHECK_THROWS(PowerShiftProfile(-0.5));
    CHECK_THROWS(TabulatedProfile({0.1, 0.5, 1.0}, {0.5, 0.3, 0.9}));  // not monotone
    CHECK_THROWS(TabulatedProfile({0.1, 0.5, 1.0}, {-0.5, 0.3, 0.9}));
}

TEST_CASE("profile_limit_at_zero") {
    SUBCASE("power shift -> 1") {
        auto lim = profile_limit_at_zero(PowerShiftProfile(0.5));
        CHECK(lim.value == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("exp-integral with q = 1 gives rho(r) = r -> 0") {
        auto lim = profile_limit_at_zero(
            ExpIntegralProfile(PowerLogParams{1.0, 0.0, 0.0}, 3));
        CHECK(lim.value == 0.0);
    }
    SUBCASE("exp-integral with q = log^{n-1}(e/r): rho(r) ~ 1/log -> 0") {
        // closed form: int_r^1 dt/(t log(e/t)) = log log(e/r) - log log e
        // so rho(r) = 1/log(e/r); diverges, limit 0
        auto q = [](Real r) { return std::pow(std::log(M_E / r), 2.0); };
        // the limit dichotomy is decided by the symbolic power-log tag
        ExpIntegralProfile p(q, 3, PowerLogParams{1.0, 0.0, 2.0});
        CHECK(p.value(0.1) ==
              doctest::Approx(1.0 / std::log(M_E / 0.1)).epsilon(1e-9));
        auto lim = profile_limit_at_zero(Profile(p));
        CHECK(lim.value == doctest::Approx(0.0).epsilon(1e-8));
    }
    SUBCASE("exp-integral with convergent integral has positive limit") {
        // q(r) = r^{-2}, n = 3: int_0^1 dt/(t q^{1/2}) = int_0^1 dt = 1
        auto lim = profile_limit_at_zero(
            ExpIntegralProfile(PowerLogParams{1.0, 2.0, 0.0}, 3));
        CHECK(lim.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
    }
    SUBCASE("tabulated profile needs data near zero") {
        CHECK_THROWS_AS(
            profile_limit_at_zero(TabulatedProfile({0.5, 0.7, 1.0}, {0.4, 0.6, 0.9})),
            std::domain_error);
    }
}

TEST_CASE("limit set and ground-truth extendability") {
    SUBCASE("power shift: sphere of radius 1, not extendable") {
        MapSpec g = RadialMap(PowerShiftProfile(0.5), 3);
        auto ls = limit_set_at_zero(g);
        auto* sphere = std::get_if<SphereSetLimit>(&ls);
        REQUIRE(sphere != nullptr);
        CHECK(sphere->radius == doctest::Approx(1.0).epsilon(1e-8));
        CHECK_FALSE(extendable_ground_truth(g));
    }
    SUBCASE("q = 1 exp-integral: single point, extendable") {
        MapSpec f = RadialMap(ExpIntegralProfile(PowerLogParams{1.0, 0.0, 0.0}, 3), 3);
        CHECK(std::holds_alternative<SinglePointLimit>(limit_set_at_zero(f)));
        CHECK(extendable_ground_truth(f));
    }
    SUBCASE("tabulated values tending to 0.5") {
        MapSpec f = RadialMap(
            TabulatedProfile({1e-4, 1e-3, 0.01, 0.1, 1.0}, {0.5, 0.50001, 0.501, 0.55, 0.9}),
            3);
        auto ls = limit_set_at_zero(f);
        auto* sphere = std::get_if<SphereSetLimit>(&ls);
        REQUIRE(sphere != nullptr);
        CHECK(sphere->radius == doctest::Approx(0.5).epsilon(1e-4));
    }
    SUBCASE("non-radial maps are rejected") {
        CHECK_THROWS(limit_set_at_zero(MapSpec(TwistMap(2, 3))));
    }
}

TEST_CASE("radial equivariance under random rotations") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<Real> ur(0.05, 0.95);
    std::normal_distribution<Real> gauss;
    for (int n : {2, 3, 5}) {
        MapSpec g = RadialMap(PowerShiftProfile(0.7), n);
        for (int trial = 0; trial < 20; ++trial) {
            auto rot = random_rotation(n, rng);
            Point x(n);
            Real s = 0;
            for (auto& c : x) {
                c = gauss(rng);
                s += c * c;
            }
            Real r = ur(rng);
            for (auto& c : x) c *= r / std::sqrt(s);
            Point lhs = eval_map(g, rotate_pt(rot, x));
            Point rhs = rotate_pt(rot, eval_map(g, x));
            for (int i = 0; i < n; ++i)
                CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("radial maps satisfy |f(x)| = rho(|x|); power shift lands in the ring") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<Real> ur(0.01, 0.99);
    std::normal_distribution<Real> gauss;
    MapSpec g = RadialMap(PowerShiftProfile(0.4), 3);
    for (int trial = 0; trial < 100; ++trial) {
        Point x(3);
        Real s = 0;
        for (auto& c : x) {
            c = gauss(rng);
            s += c * c;
        }
        Real r = ur(rng);
        for (auto& c : x) c *= r / std::sqrt(s);
        Point y = eval_map(g, x);
        Real ry = norm(y);
        CHECK(ry == doctest::Approx(1.0 + std::pow(r, 0.4)).epsilon(1e-12));
        CHECK(ry > 1.0);
        CHECK(ry < 2.0);
    }
}

TEST_CASE("twist preserves cylinder radius and the tail coordinates") {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<Real> u(-0.4, 0.4);
    MapSpec f = TwistMap(3, 4);
    for (int trial = 0; trial < 50; ++trial) {
        Point x{u(rng), u(rng), u(rng), u(rng)};
        if (std::hypot(x[0], x[1]) < 1e-6) continue;
        Point y = eval_map(f, x);
        CHECK(std::hypot(y[0], y[1]) ==
              doctest::Approx(std::hypot(x[0], x[1])).epsilon(1e-14));
        CHECK(y[2] == x[2]);
        CHECK(y[3] == x[3]);
    }
}

TEST_CASE("declared metadata") {
    CHECK(map_metadata(MapSpec(RadialMap(PowerShiftProfile(0.5), 3))).multiplicity == 1);
    CHECK(map_metadata(MapSpec(TwistMap(4, 3))).multiplicity == 4);
    CHECK(map_metadata(MapSpec(PlanarPowerMap(5))).multiplicity == 5);
    CHECK_THROWS(TwistMap(2, 2));  // twist needs n >= 3
    CHECK_THROWS(TwistMap(0, 3));
}

TEST_CASE("monotone cubic interpolation stays monotone") {
    MonotoneCubic c({0.0, 0.2, 0.5, 1.0}, {0.1, 0.15, 0.6, 0.95});
    Real prev = c(0.0);
    for (int i = 1; i <= 200; ++i) {
        Real v = c(i / 200.0);
        CHECK(v >= prev - 1e-14);
        prev = v;
    }
    CHECK(c(0.2) == doctest::Approx(0.15));
    CHECK(c(1.0) == doctest::Approx(0.95));
}

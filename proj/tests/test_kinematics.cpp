#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "colav/kinematics.hpp"
#include "colav/oracle.hpp"
#include "colav/rng.hpp"

#include <cmath>
#include <limits>

using namespace colav;

namespace {

RelativeMotion make_rm(Vec2 p0, Vec2 dv, Vec2 da = Vec2::Zero()) {
    RelativeMotion rm;
    rm.p0 = p0;
    rm.dv = dv;
    rm.da = da;
    return rm;
}

} // namespace

TEST_CASE("extrapolate advances position and velocity under constant acceleration") {
    KinematicState s;
    s.position = Vec2(0.0, 0.0);
    s.velocity = Vec2(10.0, 0.0);
    s.acceleration = Vec2(1.0, 0.0);
    s.timestamp = 0.0;

    const KinematicState at2 = extrapolate(s, 2.0);
    CHECK(at2.position.x() == doctest::Approx(22.0));
    CHECK(at2.position.y() == doctest::Approx(0.0));
    CHECK(at2.velocity.x() == doctest::Approx(12.0));
    CHECK(at2.timestamp == doctest::Approx(2.0));

    // Backwards projection inverts it.
    const KinematicState back = extrapolate(at2, 0.0);
    CHECK(back.position.x() == doctest::Approx(0.0));
    CHECK(back.velocity.x() == doctest::Approx(10.0));
}

TEST_CASE("relative_motion projects both parties to the common time") {
    KinematicState a;
    a.position = Vec2(0.0, 0.0);
    a.velocity = Vec2(1.0, 0.0);
    a.timestamp = 0.0;
    KinematicState b;
    b.position = Vec2(10.0, 0.0);
    b.velocity = Vec2(0.0, 0.0);
    b.timestamp = 1.0;

    const RelativeMotion rm = relative_motion(a, b); // common time 1.0
    CHECK(rm.p0.x() == doctest::Approx(9.0));
    CHECK(rm.dv.x() == doctest::Approx(-1.0));
}

TEST_CASE("relative_motion rejects non-finite input") {
    KinematicState a, b;
    b.position = Vec2(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS(relative_motion(a, b, 0.0), std::invalid_argument);
    b.position = Vec2(std::numeric_limits<double>::infinity(), 0.0);
    CHECK_THROWS_AS(relative_motion(a, b, 0.0), std::invalid_argument);
}

TEST_CASE("linear closest approach: worked example") {
    const auto cpa = closest_approach_linear(make_rm(Vec2(-50.0, 40.0), Vec2(10.0, -10.0)));
    CHECK(cpa.t_star == doctest::Approx(4.5).epsilon(1e-12));
    CHECK(cpa.d_star == doctest::Approx(std::sqrt(50.0)).epsilon(1e-12));
}

TEST_CASE("linear closest approach: receding pair reports negative t_star and current distance") {
    const auto cpa = closest_approach_linear(make_rm(Vec2(10.0, 0.0), Vec2(5.0, 0.0)));
    CHECK(cpa.t_star == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(cpa.d_star == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("linear closest approach: relatively stationary pair") {
    const auto cpa = closest_approach_linear(make_rm(Vec2(3.0, 4.0), Vec2(0.0, 0.0)));
    CHECK(cpa.t_star == 0.0);
    CHECK(cpa.d_star == doctest::Approx(5.0));
}

TEST_CASE("linear closest approach: speed floor selects the stationary branch") {
    // |dv|^2 = 1e-10 <= 1e-9: stationary.
    auto slow = closest_approach_linear(make_rm(Vec2(-10.0, 0.0), Vec2(1e-5, 0.0)));
    CHECK(slow.t_star == 0.0);
    CHECK(slow.d_star == doctest::Approx(10.0));

    // |dv|^2 = 1e-8 > 1e-9: genuine linear solution with a huge t_star.
    auto fast = closest_approach_linear(make_rm(Vec2(-10.0, 0.0), Vec2(1e-4, 0.0)));
    CHECK(fast.t_star == doctest::Approx(1e5).epsilon(1e-9));
    CHECK(fast.d_star == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("quadratic closest approach: one-dimensional decelerating example") {
    const auto cpa = closest_approach_quadratic(
        make_rm(Vec2(12.0, 0.0), Vec2(-4.0, 0.0), Vec2(2.0, 0.0)));
    CHECK(cpa.t_star == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(cpa.d_star == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("quadratic closest approach: candidate t=0 wins when motion only recedes") {
    // Separating with aligned acceleration: distance strictly grows.
    const auto cpa = closest_approach_quadratic(
        make_rm(Vec2(5.0, 0.0), Vec2(3.0, 0.0), Vec2(1.0, 0.0)));
    CHECK(cpa.t_star == 0.0);
    CHECK(cpa.d_star == doctest::Approx(5.0));
}

TEST_CASE("cubic solver: three distinct roots") {
    const auto roots = solve_cubic_real(1.0, -6.0, 11.0, -6.0);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(roots[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(roots[2] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("cubic solver: quadratic degradation") {
    const auto roots = solve_cubic_real(0.0, 1.0, -3.0, 2.0);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(roots[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("cubic solver: linear degradation") {
    const auto roots = solve_cubic_real(0.0, 0.0, 2.0, -7.0);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0] == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("cubic solver: single real root") {
    const auto roots = solve_cubic_real(1.0, 0.0, 0.0, -8.0);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("cubic solver: repeated root is reported once") {
    // (t-1)^2 (t-3) = t^3 - 5 t^2 + 7 t - 3
    const auto roots = solve_cubic_real(1.0, -5.0, 7.0, -3.0);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(roots[1] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("cubic solver: nonzero constant has no roots, all-zero polynomial throws") {
    CHECK(solve_cubic_real(0.0, 0.0, 0.0, 5.0).empty());
    CHECK_THROWS_AS(solve_cubic_real(0.0, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("cubic solver: residuals stay tiny relative to term scale") {
    Rng rng(7);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const double c3 = rng.uniform(-10.0, 10.0);
        const double c2 = rng.uniform(-10.0, 10.0);
        const double c1 = rng.uniform(-10.0, 10.0);
        const double c0 = rng.uniform(-10.0, 10.0);
        if (c3 == 0.0 && c2 == 0.0 && c1 == 0.0 && c0 == 0.0) continue;
        for (double r : solve_cubic_real(c3, c2, c1, c0)) {
            worst = std::max(worst, cubic_residual(c3, c2, c1, c0, r) /
                                        cubic_scale(c3, c2, c1, c0, r));
        }
    }
    CHECK(worst <= 1e-7);
}

TEST_CASE("dispatch selects quadratic at and above the acceleration switch") {
    // |da| = 0.1 exactly: quadratic path applies.
    const RelativeMotion rm = make_rm(Vec2(12.0, 0.0), Vec2(-4.0, 0.0), Vec2(0.1, 0.0));
    const auto dispatched = closest_approach(rm, 0.1);
    const auto quad = closest_approach_quadratic(rm);
    CHECK(dispatched.t_star == doctest::Approx(quad.t_star));
    CHECK(dispatched.d_star == doctest::Approx(quad.d_star));

    // Just below the switch: linear path.
    const RelativeMotion rm2 = make_rm(Vec2(12.0, 0.0), Vec2(-4.0, 0.0), Vec2(0.0999, 0.0));
    const auto dispatched2 = closest_approach(rm2, 0.1);
    const auto lin = closest_approach_linear(rm2);
    CHECK(dispatched2.t_star == doctest::Approx(lin.t_star));
    CHECK(dispatched2.d_star == doctest::Approx(lin.d_star));
}

TEST_CASE("quadratic path with zero acceleration reduces to the linear answer") {
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        const RelativeMotion rm = make_rm(
            Vec2(rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0)),
            Vec2(rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0)));
        const auto lin = closest_approach_linear(rm);
        const auto quad = closest_approach_quadratic(rm);
        CHECK(std::abs(lin.d_star - quad.d_star) <= 1e-9 * std::max(1.0, lin.d_star));
        if (lin.t_star >= 0.0)
            CHECK(std::abs(lin.t_star - quad.t_star) <= 1e-9 * std::max(1.0, lin.t_star));
        else
            CHECK(quad.t_star == 0.0); // receding: clamped candidate
    }
}

TEST_CASE("closest approach is symmetric in the pair") {
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        KinematicState a, b;
        a.position = Vec2(rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0));
        a.velocity = Vec2(rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0));
        a.acceleration = Vec2(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
        b.position = Vec2(rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0));
        b.velocity = Vec2(rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0));
        b.acceleration = Vec2(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
        const auto ab = closest_approach(relative_motion(a, b, 0.0), 0.1);
        const auto ba = closest_approach(relative_motion(b, a, 0.0), 0.1);
        CHECK(ab.t_star == doctest::Approx(ba.t_star).epsilon(1e-12));
        CHECK(ab.d_star == doctest::Approx(ba.d_star).epsilon(1e-12));
    }
}

TEST_CASE("closest approach is invariant under rigid transforms of the scene") {
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        KinematicState a, b;
        a.position = Vec2(rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0));
        a.velocity = Vec2(rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0));
        a.acceleration = Vec2(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
        b.position = Vec2(rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0));
        b.velocity = Vec2(rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0));
        b.acceleration = Vec2(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));

        const double ang = rng.uniform(0.0, 2.0 * M_PI);
        Eigen::Matrix2d rot;
        rot << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
        const Vec2 shift(rng.uniform(-500.0, 500.0), rng.uniform(-500.0, 500.0));

        auto moved = [&](const KinematicState& s) {
            KinematicState m = s;
            m.position = rot * s.position + shift;
            m.velocity = rot * s.velocity;
            m.acceleration = rot * s.acceleration;
            return m;
        };

        const auto base = closest_approach(relative_motion(a, b, 0.0), 0.1);
        const auto xfrm = closest_approach(relative_motion(moved(a), moved(b), 0.0), 0.1);
        CHECK(xfrm.t_star == doctest::Approx(base.t_star).epsilon(1e-9));
        CHECK(xfrm.d_star == doctest::Approx(base.d_star).epsilon(1e-9));
    }
}

TEST_CASE("closed form matches the independent grid search on random cases") {
    const OracleSummary sum = run_kinematics_oracle(2000, 42);
    CHECK(sum.cases == 2000);
    CHECK(sum.failures == 0);
    CHECK(sum.max_rel_residual <= 1e-7);
}

TEST_CASE("grid oracle standalone sanity") {
    const RelativeMotion rm = make_rm(Vec2(-50.0, 40.0), Vec2(10.0, -10.0));
    const auto grid = grid_closest_approach(rm, 20.0);
    CHECK(grid.t_star == doctest::Approx(4.5).epsilon(1e-6));
    CHECK(grid.d_star == doctest::Approx(std::sqrt(50.0)).epsilon(1e-9));
}

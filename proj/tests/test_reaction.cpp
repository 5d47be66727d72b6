#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <colav/reaction.hpp>
#include <colav/rng.hpp>

#include <stdexcept>

using namespace colav;

TEST_CASE("vehicle brake start stacks processing and human reaction") {
    const ReactionProfile prof;
    const auto s = on_alert(EntityKind::Vehicle, 13.89, 20.0, prof);
    CHECK(s.brake_start == doctest::Approx(21.4));
    CHECK(s.initial_speed == doctest::Approx(13.89));
    CHECK(s.decel == doctest::Approx(4.5));
    CHECK(s.stop_time == doctest::Approx(21.4 + 13.89 / 4.5));
}

TEST_CASE("autonomous vehicle skips the human reaction term") {
    ReactionProfile prof;
    prof.human_reaction_s = 0.0;
    const auto s = on_alert(EntityKind::Vehicle, 13.89, 20.0, prof);
    CHECK(s.brake_start == doctest::Approx(20.4));
}

TEST_CASE("pedestrian reaction has no processing delay term") {
    const ReactionProfile prof;
    const auto s = on_alert(EntityKind::Pedestrian, 2.0, 20.0, prof);
    CHECK(s.brake_start == doctest::Approx(21.0));
    CHECK(s.decel == doctest::Approx(2.0));
    CHECK(s.stop_time == doctest::Approx(22.0));
}

TEST_CASE("stopping distance worked values") {
    CHECK(stopping_distance(13.89, 4.5) == doctest::Approx(21.4367).epsilon(1e-4));
    CHECK(stopping_distance(2.0, 2.0) == doctest::Approx(1.0));
    CHECK(stopping_distance(0.0, 4.5) == doctest::Approx(0.0));
    CHECK_THROWS_AS(stopping_distance(10.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(stopping_distance(10.0, -1.0), std::invalid_argument);
}

TEST_CASE("braking speed profile is piecewise linear and clamped at zero") {
    const ReactionProfile prof;
    const auto s = on_alert(EntityKind::Vehicle, 10.0, 0.0, prof);
    CHECK(braking_speed(s, 0.0) == doctest::Approx(10.0));
    CHECK(braking_speed(s, 1.4) == doctest::Approx(10.0));
    CHECK(braking_speed(s, 2.4) == doctest::Approx(5.5));
    CHECK(braking_speed(s, s.stop_time) == doctest::Approx(0.0));
    CHECK(braking_speed(s, s.stop_time + 5.0) == doctest::Approx(0.0));
    for (double t = 0.0; t < s.stop_time + 1.0; t += 0.05) {
        CHECK(braking_speed(s, t + 0.05) <= braking_speed(s, t) + 1e-12);
    }
}

TEST_CASE("braking travel matches the closed form stopping distance") {
    const ReactionProfile prof;
    const auto s = on_alert(EntityKind::Vehicle, 13.89, 5.0, prof);
    CHECK(braking_travel(s, s.brake_start) == doctest::Approx(0.0));
    CHECK(braking_travel(s, s.stop_time) == doctest::Approx(stopping_distance(13.89, 4.5)));
    CHECK(braking_travel(s, s.stop_time + 10.0) ==
          doctest::Approx(stopping_distance(13.89, 4.5)));
}

TEST_CASE("total distance from alert to standstill matches the analytic form") {
    // Distance = v * (processing + reaction) + v^2 / (2a), checked by
    // integrating the speed profile.
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        ReactionProfile prof;
        prof.processing_delay_s = rng.uniform(0.0, 1.0);
        prof.human_reaction_s = rng.uniform(0.0, 2.0);
        prof.vehicle_decel_mps2 = rng.uniform(1.0, 9.0);
        const double v = rng.uniform(0.5, 35.0);
        const double arrival = rng.uniform(0.0, 100.0);
        const auto s = on_alert(EntityKind::Vehicle, v, arrival, prof);

        const double dt = 1e-4;
        double dist = 0.0;
        for (double t = arrival; t < s.stop_time; t += dt) {
            dist += braking_speed(s, t + dt / 2) * dt;
        }
        const double expected = v * (prof.processing_delay_s + prof.human_reaction_s) +
                                stopping_distance(v, prof.vehicle_decel_mps2);
        CHECK(dist == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("removing human reaction strictly shortens the stop") {
    ReactionProfile human;
    ReactionProfile autonomous;
    autonomous.human_reaction_s = 0.0;
    const double v = 13.89;
    const auto sh = on_alert(EntityKind::Vehicle, v, 0.0, human);
    const auto sa = on_alert(EntityKind::Vehicle, v, 0.0, autonomous);
    const double dh = v * sh.brake_start + braking_travel(sh, sh.stop_time);
    const double da = v * sa.brake_start + braking_travel(sa, sa.stop_time);
    CHECK(da < dh);
    CHECK(dh - da == doctest::Approx(v * 1.0));
}

TEST_CASE("zero speed alert stops immediately at brake start") {
    const ReactionProfile prof;
    const auto s = on_alert(EntityKind::Pedestrian, 0.0, 3.0, prof);
    CHECK(s.stop_time == doctest::Approx(s.brake_start));
    CHECK(braking_travel(s, 100.0) == doctest::Approx(0.0));
}

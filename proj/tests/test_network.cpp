#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <colav/network.hpp>

#include <cmath>
#include <stdexcept>

using namespace colav;

TEST_CASE("line of sight with no buildings is clear") {
    CHECK(line_of_sight(Vec2(0, 0), Vec2(1000, 1000), {}));
}

TEST_CASE("segment crossing a building is blocked") {
    const Rect r{10, 10, 20, 20};
    CHECK(segment_intersects_rect(Vec2(0, 15), Vec2(30, 15), r));
    CHECK_FALSE(line_of_sight(Vec2(0, 15), Vec2(30, 15), {r}));
}

TEST_CASE("segment passing beside a building stays clear") {
    const Rect r{10, 10, 20, 20};
    CHECK_FALSE(segment_intersects_rect(Vec2(0, 25), Vec2(30, 25), r));
    CHECK(line_of_sight(Vec2(0, 25), Vec2(30, 25), {r}));
}

TEST_CASE("boundary grazing counts as blocked") {
    const Rect r{10, 10, 20, 20};
    CHECK(segment_intersects_rect(Vec2(0, 20), Vec2(30, 20), r));   // along top edge
    CHECK(segment_intersects_rect(Vec2(20, 0), Vec2(20, 30), r));   // along right edge
    CHECK(segment_intersects_rect(Vec2(0, 30), Vec2(30, 0), r));    // diagonal through (15,15)
    CHECK(segment_intersects_rect(Vec2(0, 40), Vec2(40, 0), r));    // touches corner (20,20)
    CHECK(segment_intersects_rect(Vec2(10, 10), Vec2(10, 10), r));  // degenerate point on corner
    CHECK_FALSE(segment_intersects_rect(Vec2(0, 0), Vec2(5, 5), r));
    CHECK(segment_intersects_rect(Vec2(5, 5), Vec2(15, 15), r));    // endpoint inside
}

TEST_CASE("segment fully inside a rectangle is blocked") {
    const Rect r{0, 0, 100, 100};
    CHECK(segment_intersects_rect(Vec2(10, 10), Vec2(20, 20), r));
}

TEST_CASE("mean received power follows the log-distance law") {
    const LinkModel link;
    CHECK(mean_received_power_dbm(link, 10.0, true) == doctest::Approx(20 - 47 - 27.5));
    CHECK(mean_received_power_dbm(link, 10.0, false) == doctest::Approx(20 - 47 - 27.5 - 15));
    CHECK(mean_received_power_dbm(link, 100.0, true) == doctest::Approx(20 - 47 - 55.0));
    // Sub-meter distances clamp to the 1 m reference.
    CHECK(mean_received_power_dbm(link, 0.0, true) == doctest::Approx(-27.0));
    CHECK(mean_received_power_dbm(link, 0.5, true) == doctest::Approx(-27.0));
}

TEST_CASE("fading gains have unit mean") {
    Rng rng(5);
    for (double m : {0.5, 1.5, 3.0}) {
        double sum = 0.0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) sum += fading_gain(rng, m);
        CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));
    }
}

TEST_CASE("close LOS delivery is near certain") {
    const LinkModel link;
    Rng rng(11);
    CHECK(v2v_delivery_probability(link, 10.0, true, rng, 100000) > 0.99);
}

TEST_CASE("point blank delivery is guaranteed") {
    const LinkModel link;
    Rng rng(12);
    CHECK(v2v_delivery_probability(link, 0.0, true, rng, 10000) == doctest::Approx(1.0));
    CHECK(v2v_delivery_probability(link, 0.0, false, rng, 10000) == doctest::Approx(1.0));
}

TEST_CASE("twenty extra NLOS decibels kill delivery at the LOS half-power range") {
    LinkModel link;
    Rng rng(13);
    // LOS 50% point: the distance where the mean budget meets the threshold
    // (the unit-mean fade splits outcomes about evenly there).
    const double d50 =
        std::pow(10.0, (link.tx_power_dbm - link.ref_loss_db - link.rx_threshold_dbm) /
                           (10.0 * link.pathloss_exponent));
    const double p_los = v2v_delivery_probability(link, d50, true, rng, 20000);
    CHECK(p_los > 0.3);
    CHECK(p_los < 0.7);
    link.nlos_extra_loss_db = 20.0;
    CHECK(v2v_delivery_probability(link, d50, false, rng, 20000) < 0.05);
}

TEST_CASE("delivery probability does not increase with distance") {
    const LinkModel link;
    Rng rng(14);
    double prev = 1.1;
    for (double d : {1.0, 5.0, 25.0, 50.0, 100.0, 150.0, 200.0, 250.0, 300.0, 400.0}) {
        const double p = v2v_delivery_probability(link, d, true, rng, 10000);
        CHECK(p <= prev + 0.02);  // small slack for Monte-Carlo noise
        prev = p;
    }
}

TEST_CASE("config validation rejects nonsense") {
    NetworkConfig cfg;
    cfg.validate();
    cfg.penetration = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.penetration = 0.5;
    cfg.uplink_latency_s = -0.001;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.uplink_latency_s = 0.005;
    cfg.link.nakagami_m_los = 0.2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.link.nakagami_m_los = 3.0;
    cfg.buildings.push_back(Rect{10, 10, 10, 20});
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("buildings file parses rectangles and rejects bad rows") {
    const auto rects = parse_buildings("# two blocks\n10, 10, 20, 20\n30,10,46,47\n");
    REQUIRE(rects.size() == 2);
    CHECK(rects[1].x_max == doctest::Approx(46));
    CHECK_THROWS_WITH(parse_buildings("10,10,20\n", "b"), doctest::Contains("expected"));
    CHECK_THROWS_WITH(parse_buildings("20,10,10,20\n", "b"), doctest::Contains("positive area"));
    CHECK_THROWS_WITH(load_buildings("/nonexistent/b.txt"),
                      doctest::Contains("cannot open buildings file"));
}

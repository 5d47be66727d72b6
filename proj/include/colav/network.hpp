#pragma once

#include <colav/rng.hpp>
#include <colav/types.hpp>

#include <string>
#include <vector>

namespace colav {

// Radio parameters for the direct vehicle-to-vehicle path. Received power:
//   rx = tx_power - ref_loss - 10*exponent*log10(d) - nlos_extra (if NLOS)
//        + 10*log10(G)
// with G a unit-mean Nakagami-m power gain (Gamma(m, 1/m)). Distances under
// one meter use the 1 m reference loss, which makes point-blank delivery a
// practical certainty.
struct LinkModel {
    double tx_power_dbm = 20.0;
    double ref_loss_db = 47.0;  // at 1 m
    double pathloss_exponent = 2.75;
    double nlos_extra_loss_db = 15.0;
    double nakagami_m_los = 3.0;
    double nakagami_m_nlos = 1.5;
    double rx_threshold_dbm = -92.0;

    void validate() const;  // throws std::invalid_argument
};

enum class NetworkMode : std::uint8_t { Centralized, Distributed };

// Axis-aligned building footprint used for line-of-sight tests.
struct Rect {
    double x_min = 0.0, y_min = 0.0, x_max = 0.0, y_max = 0.0;
};

struct NetworkConfig {
    NetworkMode mode = NetworkMode::Centralized;
    double uplink_latency_s = 0.005;
    double downlink_latency_s = 0.005;
    double penetration = 1.0;             // vehicles
    double pedestrian_penetration = 1.0;  // pedestrian-carried devices
    LinkModel link;
    std::vector<Rect> buildings;

    void validate() const;
};

// True if the segment a-b touches or crosses the rectangle (touching the
// boundary counts as blocked).
bool segment_intersects_rect(const Vec2& a, const Vec2& b, const Rect& r);

// True iff no building obstructs the straight path between a and b.
bool line_of_sight(const Vec2& a, const Vec2& b, const std::vector<Rect>& buildings);

// Deterministic part of the link budget, before fading.
double mean_received_power_dbm(const LinkModel& link, double distance, bool los);

// One unit-mean Nakagami-m power gain draw.
double fading_gain(Rng& rng, double m);

// Full stochastic delivery decision for one transmission over distance d.
bool deliver_v2v(const LinkModel& link, double distance, bool los, Rng& rng);

// Monte-Carlo delivery probability estimate at fixed distance/visibility.
double v2v_delivery_probability(const LinkModel& link, double distance, bool los, Rng& rng,
                                int trials);

// Buildings file: one `x_min,y_min,x_max,y_max` rectangle per line;
// '#' comments and blank lines are skipped.
std::vector<Rect> parse_buildings(const std::string& text, const std::string& name = "<buildings>");
std::vector<Rect> load_buildings(const std::string& path);

}  // namespace colav

#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace colav {

using Vec2 = Eigen::Vector2d;
using EntityId = std::uint32_t;

// Comparison slack for simulation clocks. Event times are decimal
// seconds stored as doubles; differences of decimal-equal times carry
// ~1e-15 noise, so age/interval checks treat anything closer than this
// as equal. Far below every simulated timescale (ticks are 0.1 s).
inline constexpr double kTimeEps = 1e-9;

inline constexpr double kPi = 3.14159265358979323846;

enum class EntityKind : std::uint8_t { Vehicle, Pedestrian };

inline const char* to_string(EntityKind k) {
    return k == EntityKind::Vehicle ? "vehicle" : "pedestrian";
}

// Footprint of an entity; the contact model reduces it to a disc of
// radius max(length, width) / 2.
struct Dimensions {
    double length = 0.0;
    double width = 0.0;
};

inline double disc_radius(const Dimensions& d) {
    return (d.length > d.width ? d.length : d.width) / 2.0;
}

} // namespace colav

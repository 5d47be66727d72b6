#include <colav/reaction.hpp>

#include <algorithm>
#include <stdexcept>

namespace colav {

BrakingSchedule on_alert(EntityKind kind, double current_speed, double alert_arrival,
                         const ReactionProfile& profile) {
    BrakingSchedule s;
    if (kind == EntityKind::Vehicle) {
        s.brake_start = alert_arrival + profile.processing_delay_s + profile.human_reaction_s;
        s.decel = profile.vehicle_decel_mps2;
    } else {
        s.brake_start = alert_arrival + profile.pedestrian_reaction_s;
        s.decel = profile.pedestrian_decel_mps2;
    }
    if (!(s.decel > 0.0)) throw std::invalid_argument("deceleration must be positive");
    s.initial_speed = std::max(0.0, current_speed);
    s.stop_time = s.brake_start + s.initial_speed / s.decel;
    return s;
}

double stopping_distance(double speed, double decel) {
    if (!(decel > 0.0)) throw std::invalid_argument("deceleration must be positive");
    return speed * speed / (2.0 * decel);
}

double braking_speed(const BrakingSchedule& s, double t) {
    if (t <= s.brake_start) return s.initial_speed;
    return std::max(0.0, s.initial_speed - s.decel * (t - s.brake_start));
}

double braking_travel(const BrakingSchedule& s, double t) {
    if (t <= s.brake_start) return 0.0;
    const double dt = std::min(t, s.stop_time) - s.brake_start;
    return s.initial_speed * dt - 0.5 * s.decel * dt * dt;
}

}  // namespace colav

#pragma once

#include <colav/types.hpp>

namespace colav {

// How an entity responds to a collision alert.  Vehicles spend
// processing_delay_s in the onboard stack plus human_reaction_s before the
// brakes engage (an autonomous vehicle sets human_reaction_s to zero);
// pedestrians only need pedestrian_reaction_s to stop walking.
struct ReactionProfile {
    double processing_delay_s = 0.4;
    double human_reaction_s = 1.0;
    double vehicle_decel_mps2 = 4.5;
    double pedestrian_reaction_s = 1.0;
    double pedestrian_decel_mps2 = 2.0;
};

// Deterministic braking trajectory attached to an entity after an alert:
// constant speed until brake_start, then uniform deceleration to rest.
struct BrakingSchedule {
    double brake_start = 0.0;
    double initial_speed = 0.0;
    double decel = 0.0;
    double stop_time = 0.0;
};

// Build the braking schedule for an alert that arrives at alert_arrival
// while the entity moves at current_speed.  Subsequent alerts to an already
// braking entity are ignored by the caller; this function is pure.
BrakingSchedule on_alert(EntityKind kind, double current_speed, double alert_arrival,
                         const ReactionProfile& profile);

// Distance covered from brake engagement to standstill: v^2 / (2a).
// Throws std::invalid_argument if decel is not positive.
double stopping_distance(double speed, double decel);

// Speed at absolute time t under the schedule (constant before brake_start,
// linearly decreasing to zero at stop_time).
double braking_speed(const BrakingSchedule& s, double t);

// Distance traveled between brake_start and absolute time t (0 for earlier t,
// capped at the full stopping distance once stopped).
double braking_travel(const BrakingSchedule& s, double t);

}  // namespace colav

#pragma once

#include <colav/types.hpp>

namespace colav {

enum class BeaconMode : std::uint8_t { Dynamic, Fixed };

// Controls when an entity transmits its next state message.  Dynamic mode
// emits when the state has drifted from the last transmitted state by more
// than any of the delta thresholds, clamped to [min_interval, max_interval].
// Fixed mode emits at a constant rate.
struct BeaconPolicy {
    BeaconMode mode = BeaconMode::Dynamic;
    double fixed_rate_hz = 10.0;  // used only in Fixed mode
    double min_interval_s = 0.1;
    double max_interval_s = 1.0;
    double pos_delta_m = 4.0;
    double speed_delta_mps = 0.5;
    double heading_delta_rad = 4.0 * kPi / 180.0;

    static BeaconPolicy dynamic_default() { return BeaconPolicy{}; }
    static BeaconPolicy fixed(double rate_hz);
};

// Pedestrians carry low-power devices and beacon at a fixed 1 Hz.
BeaconPolicy pedestrian_policy();

// The state snapshot a beacon decision compares: where the entity is, how
// fast it moves, and which way it points.
struct BeaconSnapshot {
    Vec2 position = Vec2::Zero();
    double speed = 0.0;
    double heading = 0.0;  // radians in [0, 2*pi)
};

// Smallest absolute angular difference between two headings (wraps at 2*pi).
double heading_distance(double a, double b);

// Decide whether to transmit now given the current state, the last
// transmitted state, and the time elapsed since that transmission.
bool should_emit(const BeaconPolicy& policy, const BeaconSnapshot& current,
                 const BeaconSnapshot& last_sent, double elapsed_s);

}  // namespace colav

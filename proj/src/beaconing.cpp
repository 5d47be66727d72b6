#include <colav/beaconing.hpp>

#include <cmath>
#include <stdexcept>

namespace colav {

BeaconPolicy BeaconPolicy::fixed(double rate_hz) {
    if (!(rate_hz > 0.0)) throw std::invalid_argument("fixed beacon rate must be positive");
    BeaconPolicy p;
    p.mode = BeaconMode::Fixed;
    p.fixed_rate_hz = rate_hz;
    return p;
}

BeaconPolicy pedestrian_policy() { return BeaconPolicy::fixed(1.0); }

double heading_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), 2.0 * kPi);
    return d > kPi ? 2.0 * kPi - d : d;
}

bool should_emit(const BeaconPolicy& policy, const BeaconSnapshot& current,
                 const BeaconSnapshot& last_sent, double elapsed_s) {
    if (policy.mode == BeaconMode::Fixed) {
        return elapsed_s + kTimeEps >= 1.0 / policy.fixed_rate_hz;
    }
    if (elapsed_s + kTimeEps < policy.min_interval_s) return false;
    if (elapsed_s + kTimeEps >= policy.max_interval_s) return true;
    if ((current.position - last_sent.position).norm() >= policy.pos_delta_m) return true;
    if (std::abs(current.speed - last_sent.speed) >= policy.speed_delta_mps) return true;
    return heading_distance(current.heading, last_sent.heading) >= policy.heading_delta_rad;
}

}  // namespace colav

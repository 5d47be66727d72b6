#include "colav/detector.hpp"

#include <algorithm>

namespace colav {

AlertSet CollisionDetector::process_bsm(const Bsm& bsm, double now) {
    AlertSet alerts;
    if (!valid(bsm)) return alerts;
    if (now - bsm.generated_at > cfg_.max_bsm_age + kTimeEps) return alerts;

    table_.prune(now, cfg_.max_bsm_age);

    std::vector<Bsm> cands =
        cfg_.prefilter_enabled
            ? table_.candidates(bsm, cfg_.horizon(), cfg_.prefilter_max_speed_sum,
                                cfg_.guard())
            : table_.all_except(bsm.sender_id);

    if (restrict_to_ && bsm.sender_id != *restrict_to_) {
        std::erase_if(cands, [&](const Bsm& b) { return b.sender_id != *restrict_to_; });
    }

    const KinematicState tagged_now = extrapolate(state_of(bsm), now);
    const bool tagged_low_accel =
        bsm.acceleration.norm() < cfg_.accel_switch_threshold;

    for (const Bsm& other : cands) {
        RelativeMotion rm;
        {
            const KinematicState other_now = extrapolate(state_of(other), now);
            rm.p0 = other_now.position - tagged_now.position;
            rm.dv = other_now.velocity - tagged_now.velocity;
            rm.da = other_now.acceleration - tagged_now.acceleration;
        }
        const bool linear =
            tagged_low_accel && other.acceleration.norm() < cfg_.accel_switch_threshold;
        const ClosestApproach cpa =
            linear ? closest_approach_linear(rm) : closest_approach_quadratic(rm);

        const bool vru = bsm.kind == EntityKind::Pedestrian ||
                         other.kind == EntityKind::Pedestrian;
        const double t2c = vru ? cfg_.t2c_pedestrian : cfg_.t2c_vehicle;
        const double s2c = vru ? cfg_.s2c_pedestrian : cfg_.s2c_vehicle;

        if (cpa.t_star < 0.0 || cpa.t_star > t2c) continue;
        if (cpa.d_star > s2c) continue;

        const auto key = std::minmax(bsm.sender_id, other.sender_id);
        const auto seen = last_alert_.find(key);
        if (seen != last_alert_.end() && now - seen->second < cfg_.alert_cooldown - kTimeEps)
            continue;
        last_alert_[key] = now;

        alerts.push_back({bsm.sender_id, other.sender_id, cpa.t_star, cpa.d_star, now});
        alerts.push_back({other.sender_id, bsm.sender_id, cpa.t_star, cpa.d_star, now});
    }

    table_.upsert(bsm, now);
    return alerts;
}

} // namespace colav

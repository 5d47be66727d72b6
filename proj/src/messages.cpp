#include "colav/messages.hpp"

#include <cmath>

namespace colav {

bool valid(const Bsm& bsm) {
    if (!std::isfinite(bsm.position.x()) || !std::isfinite(bsm.position.y())) return false;
    if (!std::isfinite(bsm.acceleration.x()) || !std::isfinite(bsm.acceleration.y()))
        return false;
    if (!std::isfinite(bsm.speed) || bsm.speed < 0.0) return false;
    if (!std::isfinite(bsm.heading) || bsm.heading < 0.0 || bsm.heading >= 2.0 * M_PI)
        return false;
    if (!std::isfinite(bsm.length) || bsm.length <= 0.0) return false;
    if (!std::isfinite(bsm.width) || bsm.width <= 0.0) return false;
    if (!std::isfinite(bsm.generated_at)) return false;
    return true;
}

Vec2 velocity_of(const Bsm& bsm) {
    return Vec2(bsm.speed * std::cos(bsm.heading), bsm.speed * std::sin(bsm.heading));
}

KinematicState state_of(const Bsm& bsm) {
    KinematicState s;
    s.position = bsm.position;
    s.velocity = velocity_of(bsm);
    s.acceleration = bsm.acceleration;
    s.timestamp = bsm.generated_at;
    return s;
}

bool NeighborTable::upsert(const Bsm& bsm, double received_at) {
    auto it = records_.find(bsm.sender_id);
    if (it == records_.end()) {
        records_.emplace(bsm.sender_id, Record{bsm, received_at});
        return true;
    }
    if (bsm.generated_at <= it->second.bsm.generated_at) return false;
    it->second = Record{bsm, received_at};
    return true;
}

void NeighborTable::prune(double now, double max_age) {
    for (auto it = records_.begin(); it != records_.end();) {
        if (now - it->second.bsm.generated_at > max_age + kTimeEps)
            it = records_.erase(it);
        else
            ++it;
    }
}

std::vector<Bsm> NeighborTable::candidates(const Bsm& tagged, double horizon,
                                           double max_speed_sum, double guard) const {
    std::vector<Bsm> out;
    const double reach = max_speed_sum * horizon + guard;
    const Vec2 tagged_vel = velocity_of(tagged);
    for (const auto& [id, rec] : records_) {
        if (id == tagged.sender_id) continue;
        const Vec2 dp = rec.bsm.position - tagged.position;
        const double dist = dp.norm();
        if (dist > reach) continue;
        const Vec2 dv = velocity_of(rec.bsm) - tagged_vel;
        if (dp.dot(dv) >= 0.0 && dist > guard) continue;
        out.push_back(rec.bsm);
    }
    return out;
}

std::vector<Bsm> NeighborTable::all_except(EntityId tagged_id) const {
    std::vector<Bsm> out;
    for (const auto& [id, rec] : records_) {
        if (id != tagged_id) out.push_back(rec.bsm);
    }
    return out;
}

} // namespace colav

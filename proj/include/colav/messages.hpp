#pragma once

#include "colav/kinematics.hpp"
#include "colav/types.hpp"

#include <map>
#include <vector>

namespace colav {

// Cooperative-awareness message. Velocity travels as speed + heading;
// acceleration as a planar vector.
struct Bsm {
    EntityId sender_id = 0;
    EntityKind kind = EntityKind::Vehicle;
    Vec2 position = Vec2::Zero();
    double speed = 0.0;            // m/s, >= 0
    double heading = 0.0;          // radians, [0, 2*pi)
    Vec2 acceleration = Vec2::Zero();
    double length = 0.0;           // m, > 0
    double width = 0.0;            // m, > 0
    double generated_at = 0.0;     // s
};

// Field-level sanity: finite values, speed >= 0, positive dimensions,
// heading within [0, 2*pi).
bool valid(const Bsm& bsm);

Vec2 velocity_of(const Bsm& bsm);
KinematicState state_of(const Bsm& bsm);

// Collision warning addressed to one recipient about one other party.
// A detection of pair (tagged, b) yields two alerts, one per recipient,
// sharing t_star / d_star / issued_at.
struct Alert {
    EntityId tagged_id = 0; // recipient
    EntityId other_id = 0;  // the party it may collide with
    double t_star = 0.0;    // predicted time to closest approach, s
    double d_star = 0.0;    // predicted separation at closest approach, m
    double issued_at = 0.0; // s
};

using AlertSet = std::vector<Alert>;

// Latest-state table keyed by sender. Newer generation time replaces
// older; out-of-order older messages are ignored.
class NeighborTable {
public:
    struct Record {
        Bsm bsm;
        double received_at = 0.0;
    };

    // Returns true if the table changed (insert or newer replace).
    bool upsert(const Bsm& bsm, double received_at);

    // Removes every record with now - generated_at > max_age. The
    // boundary is inclusive: a record aged exactly max_age stays.
    void prune(double now, double max_age);

    // Candidate prefilter. Excludes (a) the tagged sender itself,
    // (b) records with |dp| > max_speed_sum * horizon + guard (not
    // reachable within the horizon), (c) records with dp.dv >= 0 and
    // |dp| > guard (strictly receding and already separated). Raw
    // message states are compared; guard doubles as the reachability
    // allowance and the receding-rule distance floor.
    std::vector<Bsm> candidates(const Bsm& tagged, double horizon, double max_speed_sum,
                                double guard) const;

    // Everything except the tagged sender itself (prefilter bypass).
    std::vector<Bsm> all_except(EntityId tagged_id) const;

    std::size_t size() const { return records_.size(); }
    const std::map<EntityId, Record>& records() const { return records_; }

private:
    std::map<EntityId, Record> records_;
};

} // namespace colav

#pragma once

#include <colav/messages.hpp>
#include <colav/reaction.hpp>
#include <colav/rng.hpp>
#include <colav/types.hpp>

#include <optional>
#include <string>
#include <vector>

namespace colav {

// Directed lane segment. Entities travel from start to end and never turn.
struct Lane {
    int id = 0;
    EntityKind kind = EntityKind::Vehicle;
    Vec2 start = Vec2::Zero();
    Vec2 end = Vec2::Zero();

    double length() const { return (end - start).norm(); }
    Vec2 direction() const { return (end - start).normalized(); }
    double heading() const;                 // radians in [0, 2*pi)
    Vec2 point_at(double offset) const { return start + direction() * offset; }
};

// Labeled spawn point: entities enter at the lane start at a Poisson rate.
struct Ingress {
    std::string label;
    int lane_id = 0;
    double rate_hz = 0.0;
};

struct Topology {
    std::vector<Lane> lanes;
    std::vector<Ingress> ingresses;
    std::vector<Vec2> crossings;  // marked conflict points (informational)

    const Lane* lane(int id) const;
    const Lane& lane_or_throw(int id) const;
    void validate() const;  // throws std::runtime_error on bad references

    // Parse the structured text format: one record per line,
    //   lane,<id>,<vehicle|pedestrian>,<x1>,<y1>,<x2>,<y2>
    //   ingress,<label>,<lane_id>,<rate>
    //   crossing,<x>,<y>
    // '#' starts a comment; blank lines are skipped.
    static Topology parse(const std::string& text, const std::string& name = "<topology>");
    static Topology load(const std::string& path);
};

// Built-in scenario: one horizontal two-way road (600 m), two vertical
// two-way roads at x=200 and x=400, a parallel sidewalk, and three
// pedestrian crossings at x=100, 300, 500.
Topology default_topology();

// Default footprints used when a scenario does not override them.
Dimensions default_dims(EntityKind kind);

// Seconds a stopped (fully braked) entity remains in the world before it is
// removed; keeps stopped entities out of the scene once resolved.
inline constexpr double kPostStopHoldS = 2.0;

// Minimum spawn headway on one lane; closer arrivals are delayed to the mark.
inline constexpr double kMinHeadwayS = 2.0;

// One simulated traffic participant. Motion is closed-form: constant cruise
// speed from spawn, optionally overridden by a braking schedule.
struct Entity {
    EntityId id = 0;
    EntityKind kind = EntityKind::Vehicle;
    int lane_id = 0;
    double spawn_time = 0.0;
    double spawn_offset = 0.0;
    double cruise_speed = 0.0;  // also the max speed; spawns go at max
    Dimensions dims;
    bool equipped = true;
    std::optional<BrakingSchedule> braking;
};

// Longitudinal offset, speed, and position at absolute time t (clamped to
// the spawn state for earlier t).
double offset_at(const Entity& e, double t);
double speed_at(const Entity& e, double t);
Vec2 position_at(const Lane& lane, const Entity& e, double t);

// Time the entity leaves the world: lane exit, or stop time plus the
// post-stop hold if it brakes to rest before the lane end.
double despawn_time(const Lane& lane, const Entity& e);
bool alive_at(const Lane& lane, const Entity& e, double t);

// Full kinematic state (with the braking deceleration vector when active)
// and the state message an entity would transmit at time t.
KinematicState state_at(const Lane& lane, const Entity& e, double t);
Bsm bsm_of(const Lane& lane, const Entity& e, double t);

// Delay an arrival so same-lane spawns keep the minimum headway.
double clamp_headway(double arrival, std::optional<double> last_spawn);

// Poisson arrival stream for one ingress: raw exponential inter-arrival
// times, reproducible from the seed. rate 0 never fires.
class SpawnStream {
   public:
    SpawnStream(double rate_hz, std::uint64_t seed);
    double next();

   private:
    Rng rng_;
    double rate_hz_;
    double t_ = 0.0;
};

// Scenario world: topology plus every entity ever spawned. step advances
// the clock; entities past their lane end (or done braking) drop out of the
// alive set. The full entity list is kept for post-hoc analysis.
class World {
   public:
    explicit World(Topology topo);

    const Topology& topology() const { return topo_; }
    double clock() const { return clock_; }

    Entity& add(const Entity& e);
    Entity* find(EntityId id);
    const std::vector<Entity>& entities() const { return entities_; }
    std::vector<Entity>& entities() { return entities_; }
    const Lane& lane_of(const Entity& e) const { return topo_.lane_or_throw(e.lane_id); }

    void step(double dt);  // pre: dt > 0
    std::vector<const Entity*> alive() const;

   private:
    Topology topo_;
    std::vector<Entity> entities_;
    double clock_ = 0.0;
};

// Ground-truth contact: two discs touched at `time`.
struct ContactEvent {
    EntityId a = 0;  // a < b
    EntityId b = 0;
    double time = 0.0;
    Vec2 position = Vec2::Zero();
};

// Sweep [t_begin, t_end] in ticks and record the first time each pair's
// center distance crosses r_a + r_b. Within a tick the trajectories are
// treated as linear and the crossing is solved analytically, so the
// reported time error stays well under a millisecond. Each pair appears
// at most once, ordered by time then ids.
std::vector<ContactEvent> scan_contacts(const Topology& topo, const std::vector<Entity>& entities,
                                        double t_begin, double t_end, double tick = 0.1);

// Copies of the entities with braking removed: the trajectories the world
// would have followed with no intervention. Scanning these yields the
// ground-truth (counterfactual) contact set.
std::vector<Entity> strip_braking(const std::vector<Entity>& entities);

}  // namespace colav

#include <colav/mobility.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace colav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void parse_fail(const std::string& name, int line, const std::string& what) {
    std::ostringstream os;
    os << name << ":" << line << ": " << what;
    throw std::runtime_error(os.str());
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) {
        const auto b = field.find_first_not_of(" \t");
        if (b == std::string::npos) {
            out.emplace_back();
        } else {
            const auto e = field.find_last_not_of(" \t");
            out.push_back(field.substr(b, e - b + 1));
        }
    }
    return out;
}

double parse_num(const std::string& name, int line, const std::string& tok) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        parse_fail(name, line, "not a number: '" + tok + "'");
    }
}

}  // namespace

double Lane::heading() const {
    const Vec2 d = direction();
    double h = std::atan2(d.y(), d.x());
    if (h < 0) h += 2.0 * kPi;
    return h;
}

const Lane* Topology::lane(int id) const {
    for (const auto& l : lanes)
        if (l.id == id) return &l;
    return nullptr;
}

const Lane& Topology::lane_or_throw(int id) const {
    const Lane* l = lane(id);
    if (!l) throw std::runtime_error("unknown lane id " + std::to_string(id));
    return *l;
}

void Topology::validate() const {
    std::set<int> ids;
    for (const auto& l : lanes) {
        if (!ids.insert(l.id).second)
            throw std::runtime_error("duplicate lane id " + std::to_string(l.id));
        if (!(l.length() > 0.0))
            throw std::runtime_error("lane " + std::to_string(l.id) + " has zero length");
    }
    for (const auto& g : ingresses) {
        if (!ids.count(g.lane_id))
            throw std::runtime_error("ingress '" + g.label + "' references unknown lane " +
                                     std::to_string(g.lane_id));
        if (!(g.rate_hz >= 0.0) || !std::isfinite(g.rate_hz))
            throw std::runtime_error("ingress '" + g.label + "' has invalid rate");
    }
}

Topology Topology::parse(const std::string& text, const std::string& name) {
    Topology topo;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto f = split_csv(line);
        if (f[0] == "lane") {
            if (f.size() != 7) parse_fail(name, lineno, "lane needs id,kind,x1,y1,x2,y2");
            Lane l;
            l.id = static_cast<int>(parse_num(name, lineno, f[1]));
            if (f[2] == "vehicle") {
                l.kind = EntityKind::Vehicle;
            } else if (f[2] == "pedestrian") {
                l.kind = EntityKind::Pedestrian;
            } else {
                parse_fail(name, lineno, "unknown lane kind '" + f[2] + "'");
            }
            l.start = Vec2(parse_num(name, lineno, f[3]), parse_num(name, lineno, f[4]));
            l.end = Vec2(parse_num(name, lineno, f[5]), parse_num(name, lineno, f[6]));
            topo.lanes.push_back(l);
        } else if (f[0] == "ingress") {
            if (f.size() != 4) parse_fail(name, lineno, "ingress needs label,lane_id,rate");
            Ingress g;
            g.label = f[1];
            g.lane_id = static_cast<int>(parse_num(name, lineno, f[2]));
            g.rate_hz = parse_num(name, lineno, f[3]);
            topo.ingresses.push_back(g);
        } else if (f[0] == "crossing") {
            if (f.size() != 3) parse_fail(name, lineno, "crossing needs x,y");
            topo.crossings.emplace_back(parse_num(name, lineno, f[1]),
                                        parse_num(name, lineno, f[2]));
        } else {
            parse_fail(name, lineno, "unknown record '" + f[0] + "'");
        }
    }
    topo.validate();
    return topo;
}

Topology Topology::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open topology file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse(os.str(), path);
}

Topology default_topology() {
    Topology t;
    auto lane = [&](int id, EntityKind k, double x1, double y1, double x2, double y2) {
        t.lanes.push_back(Lane{id, k, Vec2(x1, y1), Vec2(x2, y2)});
    };
    const auto V = EntityKind::Vehicle;
    const auto P = EntityKind::Pedestrian;
    lane(1, V, 0, -3, 600, -3);     // eastbound
    lane(2, V, 600, 3, 0, 3);       // westbound
    lane(3, V, 197, 50, 197, -50);  // southbound at x=200
    lane(4, V, 203, -50, 203, 50);  // northbound at x=200
    lane(5, V, 397, 50, 397, -50);  // southbound at x=400
    lane(6, V, 403, -50, 403, 50);  // northbound at x=400
    lane(7, P, 0, 8, 600, 8);       // sidewalk parallel to the road
    lane(8, P, 100, -8, 100, 8);    // crossing at x=100
    lane(9, P, 300, -8, 300, 8);    // crossing at x=300
    lane(10, P, 500, 8, 500, -8);   // crossing at x=500
    t.ingresses = {
        {"v1", 1, 0.7}, {"v2", 2, 0.7}, {"v3", 3, 0.7}, {"v4", 4, 0.7},
        {"v5", 5, 0.7}, {"v6", 6, 0.7}, {"p1", 8, 0.3}, {"p2", 10, 0.3},
    };
    t.crossings = {Vec2(100, 0), Vec2(300, 0), Vec2(500, 0)};
    t.validate();
    return t;
}

Dimensions default_dims(EntityKind kind) {
    return kind == EntityKind::Vehicle ? Dimensions{4.0, 1.8} : Dimensions{0.5, 0.5};
}

double offset_at(const Entity& e, double t) {
    if (t <= e.spawn_time) return e.spawn_offset;
    double off = e.spawn_offset;
    if (e.braking) {
        const double cruise_end = std::max(e.spawn_time, e.braking->brake_start);
        off += e.cruise_speed * (std::min(t, cruise_end) - e.spawn_time);
        off += braking_travel(*e.braking, t);
    } else {
        off += e.cruise_speed * (t - e.spawn_time);
    }
    return off;
}

double speed_at(const Entity& e, double t) {
    if (t < e.spawn_time) return 0.0;
    if (e.braking) return braking_speed(*e.braking, t);
    return e.cruise_speed;
}

Vec2 position_at(const Lane& lane, const Entity& e, double t) {
    return lane.point_at(offset_at(e, t));
}

double despawn_time(const Lane& lane, const Entity& e) {
    const double remain = lane.length() - e.spawn_offset;
    if (remain <= 0.0) return e.spawn_time;
    if (!e.braking) {
        if (e.cruise_speed <= 0.0) return kInf;
        return e.spawn_time + remain / e.cruise_speed;
    }
    const BrakingSchedule& b = *e.braking;
    const double cruise_end = std::max(e.spawn_time, b.brake_start);
    const double cruised = e.cruise_speed * (cruise_end - e.spawn_time);
    if (cruised >= remain)  // lane end reached before the brakes engage
        return e.spawn_time + remain / e.cruise_speed;
    const double need = remain - cruised;
    const double v = b.initial_speed;
    const double full = stopping_distance(v, b.decel);
    if (need > full) return b.stop_time + kPostStopHoldS;  // stops inside the lane
    // Exits while decelerating: v*dt - decel*dt^2/2 = need, earliest root.
    const double disc = std::max(0.0, v * v - 2.0 * b.decel * need);
    const double dt = (v - std::sqrt(disc)) / b.decel;
    return b.brake_start + dt;
}

bool alive_at(const Lane& lane, const Entity& e, double t) {
    return t >= e.spawn_time && t < despawn_time(lane, e);
}

KinematicState state_at(const Lane& lane, const Entity& e, double t) {
    KinematicState s;
    s.position = position_at(lane, e, t);
    s.velocity = lane.direction() * speed_at(e, t);
    s.acceleration = Vec2::Zero();
    if (e.braking && t >= e.braking->brake_start && t < e.braking->stop_time)
        s.acceleration = -lane.direction() * e.braking->decel;
    s.timestamp = t;
    return s;
}

Bsm bsm_of(const Lane& lane, const Entity& e, double t) {
    const KinematicState s = state_at(lane, e, t);
    Bsm m;
    m.sender_id = e.id;
    m.kind = e.kind;
    m.position = s.position;
    m.speed = speed_at(e, t);
    m.heading = lane.heading();
    m.acceleration = s.acceleration;
    m.length = e.dims.length;
    m.width = e.dims.width;
    m.generated_at = t;
    return m;
}

double clamp_headway(double arrival, std::optional<double> last_spawn) {
    if (!last_spawn) return arrival;
    return std::max(arrival, *last_spawn + kMinHeadwayS);
}

SpawnStream::SpawnStream(double rate_hz, std::uint64_t seed) : rng_(seed), rate_hz_(rate_hz) {
    if (rate_hz < 0.0) throw std::invalid_argument("spawn rate must be non-negative");
}

double SpawnStream::next() {
    if (rate_hz_ <= 0.0) return kInf;
    t_ += rng_.exponential(rate_hz_);
    return t_;
}

World::World(Topology topo) : topo_(std::move(topo)) { topo_.validate(); }

Entity& World::add(const Entity& e) {
    topo_.lane_or_throw(e.lane_id);  // reject dangling lane references early
    entities_.push_back(e);
    return entities_.back();
}

Entity* World::find(EntityId id) {
    for (auto& e : entities_)
        if (e.id == id) return &e;
    return nullptr;
}

void World::step(double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step requires dt > 0");
    clock_ += dt;
}

std::vector<const Entity*> World::alive() const {
    std::vector<const Entity*> out;
    for (const auto& e : entities_)
        if (alive_at(topo_.lane_or_throw(e.lane_id), e, clock_)) out.push_back(&e);
    return out;
}

std::vector<ContactEvent> scan_contacts(const Topology& topo, const std::vector<Entity>& entities,
                                        double t_begin, double t_end, double tick) {
    struct Body {
        const Entity* e;
        const Lane* lane;
        double spawn, despawn, radius;
    };
    std::vector<Body> bodies;
    bodies.reserve(entities.size());
    for (const auto& e : entities) {
        const Lane& lane = topo.lane_or_throw(e.lane_id);
        bodies.push_back({&e, &lane, e.spawn_time, despawn_time(lane, e), disc_radius(e.dims)});
    }

    std::vector<ContactEvent> out;
    std::set<std::pair<EntityId, EntityId>> seen;
    std::vector<std::size_t> live;
    std::vector<Vec2> anchor;
    // No scenario moves faster than this; bounds how far a pair can close
    // within one tick for the coarse distance gate.
    constexpr double kMaxSpeed = 30.0;
    const int ticks = static_cast<int>(std::ceil((t_end - t_begin) / tick - kTimeEps));
    for (int k = 0; k < ticks; ++k) {
        const double t0 = t_begin + k * tick;
        const double t1 = std::min(t_begin + (k + 1) * tick, t_end);
        live.clear();
        anchor.clear();
        for (std::size_t i = 0; i < bodies.size(); ++i) {
            if (bodies[i].spawn < t1 && bodies[i].despawn > t0) {
                live.push_back(i);
                anchor.push_back(position_at(*bodies[i].lane, *bodies[i].e,
                                             std::max(t0, bodies[i].spawn)));
            }
        }
        for (std::size_t ii = 0; ii < live.size(); ++ii) {
            const Body& A = bodies[live[ii]];
            for (std::size_t jj = ii + 1; jj < live.size(); ++jj) {
                const Body& B = bodies[live[jj]];
                const double R = A.radius + B.radius;
                // Anchors are at most one tick of travel from the true
                // per-pair start positions, so this reject is conservative.
                const double reach = R + 3.0 * kMaxSpeed * tick;
                if ((anchor[ii] - anchor[jj]).squaredNorm() > reach * reach) continue;
                const double lo = std::max({t0, A.spawn, B.spawn});
                const double hi = std::min({t1, A.despawn, B.despawn});
                if (hi <= lo) continue;
                const auto key = std::minmax(A.e->id, B.e->id);
                if (seen.count(key)) continue;
                const Vec2 pa0 = position_at(*A.lane, *A.e, lo);
                const Vec2 pb0 = position_at(*B.lane, *B.e, lo);
                const Vec2 p0 = pa0 - pb0;
                const double c = p0.squaredNorm() - R * R;
                double hit = -1.0;
                if (c <= 0.0) {
                    hit = lo;
                } else {
                    const double span = hi - lo;
                    const Vec2 pa1 = position_at(*A.lane, *A.e, hi);
                    const Vec2 pb1 = position_at(*B.lane, *B.e, hi);
                    const Vec2 w = ((pa1 - pb1) - p0) / span;
                    const double a2 = w.squaredNorm();
                    if (a2 <= 0.0) continue;
                    const double a1 = 2.0 * p0.dot(w);
                    const double disc = a1 * a1 - 4.0 * a2 * c;
                    if (disc < 0.0) continue;
                    const double s = (-a1 - std::sqrt(disc)) / (2.0 * a2);
                    if (s < 0.0 || s > span) continue;
                    hit = lo + s;
                }
                seen.insert(key);
                const Vec2 pa = position_at(*A.lane, *A.e, hit);
                const Vec2 pb = position_at(*B.lane, *B.e, hit);
                ContactEvent ev;
                ev.a = key.first;
                ev.b = key.second;
                ev.time = hit;
                ev.position = 0.5 * (pa + pb);
                out.push_back(ev);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const ContactEvent& x, const ContactEvent& y) {
        if (x.time != y.time) return x.time < y.time;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    return out;
}

std::vector<Entity> strip_braking(const std::vector<Entity>& entities) {
    std::vector<Entity> out = entities;
    for (auto& e : out) e.braking.reset();
    return out;
}

}  // namespace colav

#include <colav/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace colav {

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::AvoidedOnTime: return "AvoidedOnTime";
        case Outcome::DetectedTooLate: return "DetectedTooLate";
        case Outcome::Undetected: return "Undetected";
        case Outcome::FalsePositive: return "FalsePositive";
        case Outcome::TrueNegative: return "TrueNegative";
    }
    return "?";
}

namespace {

using PairKey = std::pair<EntityId, EntityId>;

EntityKind kind_of(const std::map<EntityId, EntityKind>& kinds, EntityId id) {
    const auto it = kinds.find(id);
    if (it == kinds.end())
        throw std::runtime_error("trace references unknown entity " + std::to_string(id));
    return it->second;
}

}  // namespace

std::vector<PairRecord> classify(const std::vector<PairAlert>& alerts,
                                 const std::vector<ContactEvent>& counterfactual,
                                 const std::vector<ContactEvent>& actual,
                                 const std::map<EntityId, EntityKind>& kinds) {
    std::map<PairKey, PairRecord> records;
    auto touch = [&](EntityId a, EntityId b) -> PairRecord& {
        const PairKey key = std::minmax(a, b);
        auto [it, fresh] = records.try_emplace(key);
        if (fresh) {
            it->second.a = key.first;
            it->second.b = key.second;
            it->second.kind_a = kind_of(kinds, key.first);
            it->second.kind_b = kind_of(kinds, key.second);
        }
        return it->second;
    };

    for (const auto& ev : counterfactual) {
        PairRecord& r = touch(ev.a, ev.b);
        r.ground_truth = true;
        r.cf_contact = ev.time;
    }
    for (const auto& ev : actual) {
        PairRecord& r = touch(ev.a, ev.b);
        r.actual_contact = ev.time;
    }
    std::map<PairKey, const PairAlert*> alert_by_pair;
    for (const auto& al : alerts) {
        PairRecord& r = touch(al.a, al.b);
        r.first_alert_delivery = al.first_delivery;
        alert_by_pair[std::minmax(al.a, al.b)] = &al;
    }

    std::vector<PairRecord> out;
    out.reserve(records.size());
    for (auto& [key, r] : records) {
        const PairAlert* al = nullptr;
        if (const auto it = alert_by_pair.find(key); it != alert_by_pair.end()) al = it->second;
        if (r.ground_truth) {
            // Only an alert delivered before the would-be impact counts.
            r.alerted = al != nullptr && al->first_delivery < *r.cf_contact;
            if (!r.alerted) {
                r.outcome = Outcome::Undetected;
            } else if (r.actual_contact) {
                r.outcome = Outcome::DetectedTooLate;
            } else {
                r.outcome = Outcome::AvoidedOnTime;
            }
        } else if (al != nullptr) {
            r.alerted = true;
            if (al->while_braking) {
                // Reaction to somebody's emergency stop, not a detector
                // mistake about free-flowing traffic.
                r.outcome = Outcome::TrueNegative;
                r.induced = true;
            } else {
                r.outcome = Outcome::FalsePositive;
            }
        } else {
            // Actual-only contact: a braking side effect outside ground
            // truth (the unbraked world never had this pair colliding).
            r.outcome = Outcome::TrueNegative;
            r.induced = true;
        }
        out.push_back(r);
    }
    return out;
}

double pair_margin(const Topology& topo, const Entity& a, const Entity& b) {
    const Lane& la = topo.lane_or_throw(a.lane_id);
    const Lane& lb = topo.lane_or_throw(b.lane_id);
    double t0 = std::max(a.spawn_time, b.spawn_time);
    if (a.braking) t0 = std::max(t0, a.braking->stop_time);
    if (b.braking) t0 = std::max(t0, b.braking->stop_time);
    const double t_end = std::min(despawn_time(la, a), despawn_time(lb, b));
    if (t0 >= t_end) t0 = t_end;  // evaluate at the last shared instant

    // From t0 on, both parties move uniformly (stopped or cruising), so the
    // minimum over the remaining shared lifetime is a clamped linear CPA.
    const Vec2 p0 = position_at(la, a, t0) - position_at(lb, b, t0);
    const Vec2 dv = la.direction() * speed_at(a, t0) - lb.direction() * speed_at(b, t0);
    const double vv = dv.squaredNorm();
    if (vv <= 1e-12) return p0.norm();
    double t_star = -p0.dot(dv) / vv;
    t_star = std::clamp(t_star, 0.0, std::max(0.0, t_end - t0));
    return (p0 + dv * t_star).norm();
}

void fill_margins(std::vector<PairRecord>& records, const Topology& topo,
                  const std::vector<Entity>& entities) {
    std::map<EntityId, const Entity*> by_id;
    for (const auto& e : entities) by_id[e.id] = &e;
    for (auto& r : records) {
        if (r.outcome != Outcome::AvoidedOnTime) continue;
        const auto ia = by_id.find(r.a);
        const auto ib = by_id.find(r.b);
        if (ia == by_id.end() || ib == by_id.end())
            throw std::runtime_error("pair record references unknown entity");
        r.safety_margin = pair_margin(topo, *ia->second, *ib->second);
    }
}

std::vector<LoadSample> traffic_load(const std::vector<double>& bsm_times, double window,
                                     double t_end) {
    if (!(window > 0.0)) throw std::invalid_argument("load window must be positive");
    std::vector<double> times = bsm_times;
    std::sort(times.begin(), times.end());
    std::vector<LoadSample> out;
    for (double t = window; t <= t_end + kTimeEps; t += window) {
        const auto lo = std::upper_bound(times.begin(), times.end(), t - window);
        const auto hi = std::upper_bound(times.begin(), times.end(), t);
        out.push_back({t, static_cast<double>(hi - lo) / window});
    }
    return out;
}

std::optional<double> KindStats::detection_rate() const {
    if (ground_truth == 0) return std::nullopt;
    return static_cast<double>(avoided + too_late) / ground_truth;
}

std::optional<double> KindStats::avoided_rate() const {
    if (ground_truth == 0) return std::nullopt;
    return static_cast<double>(avoided) / ground_truth;
}

KindStats& RunStats::bucket(EntityKind a, EntityKind b) {
    if (a != b) return vehicle_pedestrian;
    return a == EntityKind::Vehicle ? vehicle_vehicle : pedestrian_pedestrian;
}

int RunStats::total_ground_truth() const {
    return vehicle_pedestrian.ground_truth + vehicle_vehicle.ground_truth +
           pedestrian_pedestrian.ground_truth;
}

int RunStats::total_false_positives() const {
    return vehicle_pedestrian.false_positive + vehicle_vehicle.false_positive +
           pedestrian_pedestrian.false_positive;
}

RunStats aggregate(const std::vector<PairRecord>& records) {
    RunStats s;
    for (const auto& r : records) {
        KindStats& k = s.bucket(r.kind_a, r.kind_b);
        if (r.alerted) ++s.alerted_pairs;
        if (r.induced) {
            ++s.true_negatives;
            if (r.actual_contact) ++s.induced_contacts;
            if (r.first_alert_delivery) ++s.induced_alert_pairs;
            continue;
        }
        switch (r.outcome) {
            case Outcome::AvoidedOnTime:
                ++k.ground_truth;
                ++k.avoided;
                break;
            case Outcome::DetectedTooLate:
                ++k.ground_truth;
                ++k.too_late;
                break;
            case Outcome::Undetected:
                ++k.ground_truth;
                ++k.undetected;
                break;
            case Outcome::FalsePositive:
                ++k.false_positive;
                break;
            case Outcome::TrueNegative:
                ++s.true_negatives;
                break;
        }
    }
    return s;
}

std::string format_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

std::string kinds_label(EntityKind a, EntityKind b) {
    if (a == b) return std::string(to_string(a)) + "-" + to_string(b);
    return "vehicle-pedestrian";  // mixed pairs print vehicle first
}

std::string opt_num(const std::optional<double>& v) { return v ? format_num(*v) : ""; }

}  // namespace

void write_collisions_csv(const std::string& path, const std::vector<PairRecord>& records) {
    auto out = open_out(path);
    out << "pair_a,pair_b,kinds,outcome,margin_m,contact_t,first_alert_t\n";
    for (const auto& r : records) {
        std::optional<double> contact = r.cf_contact ? r.cf_contact : r.actual_contact;
        out << r.a << ',' << r.b << ',' << kinds_label(r.kind_a, r.kind_b) << ','
            << to_string(r.outcome) << ',' << opt_num(r.safety_margin) << ','
            << opt_num(contact) << ',' << opt_num(r.first_alert_delivery) << '\n';
    }
}

void write_load_csv(const std::string& path, const std::vector<LoadSample>& load) {
    auto out = open_out(path);
    out << "t,msgs_per_s\n";
    for (const auto& s : load) out << format_num(s.t) << ',' << format_num(s.msgs_per_s) << '\n';
}

void write_alerts_csv(const std::string& path, const std::vector<Alert>& alerts) {
    auto out = open_out(path);
    out << "issued_at,tagged_id,other_id,t_star,d_star\n";
    for (const auto& a : alerts) {
        out << format_num(a.issued_at) << ',' << a.tagged_id << ',' << a.other_id << ','
            << format_num(a.t_star) << ',' << format_num(a.d_star) << '\n';
    }
}

}  // namespace colav

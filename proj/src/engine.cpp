#include "colav/engine.hpp"

#include "colav/beaconing.hpp"
#include "colav/detector.hpp"
#include "colav/network.hpp"
#include "colav/rng.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace colav {

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Spawn: return "Spawn";
        case EventKind::DeliverBsm: return "DeliverBsm";
        case EventKind::DeliverAlert: return "DeliverAlert";
        case EventKind::BrakeStart: return "BrakeStart";
        case EventKind::EmitBsm: return "EmitBsm";
        case EventKind::Tick: return "Tick";
        case EventKind::End: return "End";
        case EventKind::Contact: return "Contact";
    }
    return "?";
}

namespace {

constexpr double kTickS = 0.1;
constexpr EntityId kMecId = 0;  // entity ids start at 1

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::End;
    std::uint64_t seq = 0;
    int ingress = -1;     // Spawn
    EntityId entity = 0;  // EmitBsm sender, DeliverBsm receiver, DeliverAlert recipient
    double period = 0.0;  // EmitBsm reschedule interval
    Bsm bsm;              // DeliverBsm payload
    Alert alert;          // DeliverAlert payload
    bool issue_while_braking = false;
    long tick = 0;
};

struct EventAfter {
    bool operator()(const Event& x, const Event& y) const {
        if (x.time != y.time) return x.time > y.time;
        if (x.kind != y.kind) return x.kind > y.kind;
        return x.seq > y.seq;
    }
};

// Min-heap on (time, kind, sequence). Events pushed while one event is being
// handled are buffered and sequenced together on the next pop; reversing that
// batch permutes equal-time ordering without touching anything else, which is
// exactly the degree of freedom run results must be independent of.
class EventQueue {
   public:
    explicit EventQueue(bool reverse_batches) : reverse_(reverse_batches) {}

    void push(Event ev) { pending_.push_back(std::move(ev)); }

    bool empty() {
        flush();
        return heap_.empty();
    }

    Event pop() {
        flush();
        Event ev = heap_.top();
        heap_.pop();
        return ev;
    }

   private:
    void flush() {
        if (reverse_) std::reverse(pending_.begin(), pending_.end());
        for (Event& ev : pending_) {
            ev.seq = next_seq_++;
            heap_.push(std::move(ev));
        }
        pending_.clear();
    }

    bool reverse_;
    std::uint64_t next_seq_ = 0;
    std::vector<Event> pending_;
    std::priority_queue<Event, std::vector<Event>, EventAfter> heap_;
};

class Sim {
   public:
    Sim(const ScenarioConfig& cfg, const RunDebug& dbg)
        : cfg_(cfg),
          dbg_(dbg),
          world_(cfg.topology),
          queue_(dbg.reverse_equal_time),
          pen_rng_(derive_seed(cfg.master_seed, 1)),
          fading_rng_(derive_seed(cfg.master_seed, 2)) {
        if (cfg_.alerts_enabled && cfg_.mode == NetworkMode::Centralized)
            mec_.emplace(cfg_.detector);
    }

    RunResult run() {
        const double duration = cfg_.duration_s;
        const auto& ingresses = world_.topology().ingresses;
        for (std::size_t i = 0; i < ingresses.size(); ++i) {
            spawn_streams_.emplace_back(ingresses[i].rate_hz,
                                        derive_seed(cfg_.master_seed, 100 + i));
            double a = spawn_streams_.back().next();
            if (a <= duration) push_spawn(static_cast<int>(i), a);
        }
        {
            Event t;
            t.time = 0.0;
            t.kind = EventKind::Tick;
            t.tick = 0;
            queue_.push(t);
            Event end;
            end.time = duration;
            end.kind = EventKind::End;
            queue_.push(end);
        }

        while (!queue_.empty()) {
            Event ev = queue_.pop();
            if (ev.time < clock_ - kTimeEps)
                throw std::logic_error("event scheduled in the past");
            clock_ = std::max(clock_, ev.time);
            if (ev.kind == EventKind::End) {
                trace_line(ev.time, "End", "");
                break;
            }
            switch (ev.kind) {
                case EventKind::Spawn: on_spawn(ev); break;
                case EventKind::DeliverBsm: on_deliver_bsm(ev); break;
                case EventKind::DeliverAlert: on_deliver_alert(ev); break;
                case EventKind::BrakeStart:
                    trace_line(ev.time, "BrakeStart", "id=" + std::to_string(ev.entity));
                    break;
                case EventKind::EmitBsm: on_emit_event(ev); break;
                case EventKind::Tick: on_tick(ev); break;
                default: break;
            }
        }
        return finish();
    }

   private:
    // Ids are assigned densely from 1 in spawn order, so the entity vector
    // doubles as the id index.
    Entity& ent(EntityId id) { return world_.entities()[id - 1]; }

    void push_spawn(int ingress, double t) {
        Event ev;
        ev.time = t;
        ev.kind = EventKind::Spawn;
        ev.ingress = ingress;
        queue_.push(ev);
    }

    void trace_line(double t, const char* kind, const std::string& rest) {
        if (!dbg_.trace) return;
        (*dbg_.trace) << "t=" << format_num(t) << ' ' << kind;
        if (!rest.empty()) (*dbg_.trace) << ' ' << rest;
        (*dbg_.trace) << '\n';
    }

    void on_spawn(const Event& ev) {
        const double t = ev.time;
        const Ingress& ing = world_.topology().ingresses[ev.ingress];
        const Lane& lane = world_.topology().lane_or_throw(ing.lane_id);

        std::optional<double> last;
        if (auto it = last_spawn_.find(lane.id); it != last_spawn_.end()) last = it->second;
        const double eff = clamp_headway(t, last);
        if (eff > t + kTimeEps) {
            push_spawn(ev.ingress, eff);  // arrival held until the headway mark
            return;
        }

        Entity e;
        e.id = next_id_++;
        e.kind = lane.kind;
        e.lane_id = lane.id;
        e.spawn_time = t;
        e.spawn_offset = 0.0;
        const bool veh = e.kind == EntityKind::Vehicle;
        e.cruise_speed = veh ? cfg_.vehicle_speed : cfg_.pedestrian_speed;
        e.dims = veh ? cfg_.vehicle_dims : cfg_.pedestrian_dims;
        e.equipped = pen_rng_.uniform() <
                     (veh ? cfg_.penetration : cfg_.pedestrian_penetration);
        world_.add(e);
        active_.push_back(e.id);
        res_.kinds[e.id] = e.kind;
        last_spawn_[lane.id] = t;
        (veh ? res_.spawned_vehicles : res_.spawned_pedestrians)++;
        trace_line(t, "Spawn",
                   "id=" + std::to_string(e.id) + " lane=" + std::to_string(lane.id) +
                       " kind=" + to_string(e.kind) +
                       " equipped=" + (e.equipped ? "1" : "0"));

        Entity& stored = ent(e.id);
        if (stored.equipped) {
            (veh ? res_.equipped_vehicles : res_.equipped_pedestrians)++;
            emit(stored, lane, t);  // first beacon right away
            double period = 0.0;
            if (!veh)
                period = 1.0 / pedestrian_policy().fixed_rate_hz;
            else if (cfg_.beaconing.mode == BeaconMode::Fixed)
                period = 1.0 / cfg_.beaconing.fixed_rate_hz;
            if (period > 0.0) {
                Event em;
                em.time = t + period;
                em.kind = EventKind::EmitBsm;
                em.entity = stored.id;
                em.period = period;
                queue_.push(em);
            }
        }

        const double next = spawn_streams_[ev.ingress].next();
        if (next <= cfg_.duration_s) push_spawn(ev.ingress, std::max(next, t));
    }

    void emit(Entity& e, const Lane& lane, double t) {
        Bsm b = bsm_of(lane, e, t);
        tx_[e.id] = TxState{BeaconSnapshot{b.position, b.speed, b.heading}, t};
        res_.bsm_times.push_back(t);
        ++res_.bsm_sent;
        trace_line(t, "EmitBsm", "id=" + std::to_string(e.id));
        if (!cfg_.alerts_enabled) return;

        if (cfg_.mode == NetworkMode::Centralized) {
            Event d;
            d.time = t + cfg_.uplink_latency_s;
            d.kind = EventKind::DeliverBsm;
            d.entity = kMecId;
            d.bsm = b;
            queue_.push(d);
            return;
        }

        // Direct mode. The sender's own detector sees its own state for free;
        // every other equipped vehicle rolls an independent fading draw, in
        // ascending id order so the random stream is consumed reproducibly.
        Event self;
        self.time = t;
        self.kind = EventKind::DeliverBsm;
        self.entity = e.id;
        self.bsm = b;
        queue_.push(self);
        each_alive(t, [&](Entity& rx, const Lane& rx_lane) {
            if (rx.id == e.id || rx.kind != EntityKind::Vehicle || !rx.equipped) return;
            const Vec2 rp = position_at(rx_lane, rx, t);
            const double dist = (rp - b.position).norm();
            const bool los = line_of_sight(b.position, rp, cfg_.buildings);
            if (!deliver_v2v(cfg_.link, dist, los, fading_rng_)) return;
            Event d;
            d.time = t;
            d.kind = EventKind::DeliverBsm;
            d.entity = rx.id;
            d.bsm = b;
            queue_.push(d);
        });
    }

    void on_emit_event(const Event& ev) {
        Entity& e = ent(ev.entity);
        const Lane& lane = world_.lane_of(e);
        if (!alive_at(lane, e, ev.time)) return;  // gone; stop rescheduling
        if (e.braking) return;                    // radio-silent once reacting
        emit(e, lane, ev.time);
        Event next = ev;
        next.time = ev.time + ev.period;
        queue_.push(next);
    }

    void on_deliver_bsm(const Event& ev) {
        const double t = ev.time;
        ++res_.bsm_delivered;
        trace_line(t, "DeliverBsm",
                   "to=" + (ev.entity == kMecId ? std::string("mec")
                                                : std::to_string(ev.entity)) +
                       " from=" + std::to_string(ev.bsm.sender_id));
        if (ev.entity == kMecId) {
            if (!mec_) return;
            for (const Alert& a : mec_->process_bsm(ev.bsm, t))
                issue_alert(a, t + cfg_.downlink_latency_s);
            return;
        }
        Entity& rx = ent(ev.entity);
        if (!alive_at(world_.lane_of(rx), rx, t)) return;
        auto it = vdets_.try_emplace(rx.id, cfg_.detector, rx.id).first;
        for (const Alert& a : it->second.process_bsm(ev.bsm, t)) {
            if (a.tagged_id != rx.id) continue;  // alerts stay on the device
            issue_alert(a, t);
        }
    }

    void issue_alert(const Alert& a, double deliver_at) {
        res_.alerts.push_back(a);
        Event ev;
        ev.time = deliver_at;
        ev.kind = EventKind::DeliverAlert;
        ev.entity = a.tagged_id;
        ev.alert = a;
        ev.issue_while_braking =
            ent(a.tagged_id).braking.has_value() || ent(a.other_id).braking.has_value();
        queue_.push(ev);
    }

    void on_deliver_alert(const Event& ev) {
        const double t = ev.time;
        Entity& e = ent(ev.entity);
        const Lane& lane = world_.lane_of(e);
        if (!alive_at(lane, e, t)) return;  // recipient left before delivery
        ++res_.alerts_delivered;
        trace_line(t, "DeliverAlert",
                   "to=" + std::to_string(ev.alert.tagged_id) +
                       " other=" + std::to_string(ev.alert.other_id) +
                       " t_star=" + format_num(ev.alert.t_star) +
                       " d_star=" + format_num(ev.alert.d_star));

        const auto key = std::minmax(ev.alert.tagged_id, ev.alert.other_id);
        if (!pair_alerts_.count(key)) {
            PairAlert pa;
            pa.a = key.first;
            pa.b = key.second;
            pa.first_delivery = t;
            pa.while_braking = ev.issue_while_braking;
            pair_alerts_.emplace(key, pa);
        }

        if (e.braking) return;  // already reacting; repeat alerts change nothing
        e.braking = on_alert(e.kind, speed_at(e, t), t, cfg_.reaction);
        Event bs;
        bs.time = e.braking->brake_start;
        bs.kind = EventKind::BrakeStart;
        bs.entity = e.id;
        queue_.push(bs);
    }

    void on_tick(const Event& ev) {
        const double t = ev.time;
        // One compaction point: entities past their despawn drop out for good
        // (braking can only be attached to a live entity, so a despawn never
        // moves back once reached).
        std::vector<EntityId> emitters;
        std::size_t w = 0;
        int veh = 0, ped = 0;
        for (std::size_t i = 0; i < active_.size(); ++i) {
            Entity& e = ent(active_[i]);
            const Lane& lane = world_.lane_of(e);
            if (t >= despawn_time(lane, e)) continue;
            active_[w++] = active_[i];
            if (e.spawn_time > t) continue;
            (e.kind == EntityKind::Vehicle ? veh : ped)++;
            if (e.kind == EntityKind::Vehicle && e.equipped && !e.braking &&
                cfg_.beaconing.mode == BeaconMode::Dynamic) {
                const TxState& s = tx_[e.id];
                BeaconSnapshot cur{position_at(lane, e, t), speed_at(e, t), lane.heading()};
                if (should_emit(cfg_.beaconing, cur, s.last_sent, t - s.last_emit))
                    emitters.push_back(e.id);
            }
        }
        active_.resize(w);
        veh_sum_ += veh;
        ped_sum_ += ped;
        ++samples_;
        for (EntityId id : emitters) emit(ent(id), world_.lane_of(ent(id)), t);

        const long k = ev.tick + 1;
        const double nt = k * kTickS;
        if (nt <= cfg_.duration_s + kTimeEps) {
            Event next;
            next.time = std::min(nt, cfg_.duration_s);
            next.kind = EventKind::Tick;
            next.tick = k;
            queue_.push(next);
        }
    }

    // Live entities at time t, ascending id. Read-only: never compacts, so it
    // is safe inside another iteration.
    template <typename F>
    void each_alive(double t, F&& f) {
        for (EntityId id : active_) {
            Entity& e = ent(id);
            const Lane& lane = world_.lane_of(e);
            if (alive_at(lane, e, t)) f(e, lane);
        }
    }

    RunResult finish() {
        const Topology& topo = world_.topology();
        res_.entities = world_.entities();
        res_.actual_contacts =
            scan_contacts(topo, res_.entities, 0.0, cfg_.duration_s, kTickS);
        res_.cf_contacts = scan_contacts(topo, strip_braking(res_.entities), 0.0,
                                         cfg_.duration_s, kTickS);
        std::vector<PairAlert> pav;
        pav.reserve(pair_alerts_.size());
        for (const auto& [key, pa] : pair_alerts_) pav.push_back(pa);
        res_.records = classify(pav, res_.cf_contacts, res_.actual_contacts, res_.kinds);
        fill_margins(res_.records, topo, res_.entities);
        res_.stats = aggregate(res_.records);
        res_.load = traffic_load(res_.bsm_times, 1.0, cfg_.duration_s);
        std::stable_sort(res_.alerts.begin(), res_.alerts.end(),
                         [](const Alert& x, const Alert& y) {
                             if (x.issued_at != y.issued_at) return x.issued_at < y.issued_at;
                             if (x.tagged_id != y.tagged_id) return x.tagged_id < y.tagged_id;
                             return x.other_id < y.other_id;
                         });
        res_.alerts_issued = static_cast<long long>(res_.alerts.size());
        if (samples_ > 0) {
            res_.vehicles_mean_alive = veh_sum_ / static_cast<double>(samples_);
            res_.pedestrians_mean_alive = ped_sum_ / static_cast<double>(samples_);
        }
        // Contacts are derived from the final trajectories, so their trace
        // records land after End, sorted by contact time.
        for (const ContactEvent& c : res_.actual_contacts)
            trace_line(c.time, "Contact",
                       "a=" + std::to_string(c.a) + " b=" + std::to_string(c.b));
        return std::move(res_);
    }

    struct TxState {
        BeaconSnapshot last_sent;
        double last_emit = 0.0;
    };

    const ScenarioConfig& cfg_;
    const RunDebug& dbg_;
    World world_;
    EventQueue queue_;
    Rng pen_rng_;
    Rng fading_rng_;
    std::vector<SpawnStream> spawn_streams_;
    std::map<int, double> last_spawn_;
    EntityId next_id_ = 1;
    std::map<EntityId, TxState> tx_;
    std::optional<CollisionDetector> mec_;
    std::map<EntityId, CollisionDetector> vdets_;
    std::map<std::pair<EntityId, EntityId>, PairAlert> pair_alerts_;
    std::vector<EntityId> active_;
    double clock_ = 0.0;
    long long samples_ = 0;
    double veh_sum_ = 0.0;
    double ped_sum_ = 0.0;
    RunResult res_;
};

nlohmann::ordered_json kind_stats_json(const KindStats& k) {
    nlohmann::ordered_json j;
    j["ground_truth"] = k.ground_truth;
    j["avoided_on_time"] = k.avoided;
    j["detected_too_late"] = k.too_late;
    j["undetected"] = k.undetected;
    j["false_positive"] = k.false_positive;
    auto dr = k.detection_rate();
    j["detection_rate"] = dr ? nlohmann::ordered_json(*dr) : nlohmann::ordered_json(nullptr);
    auto ar = k.avoided_rate();
    j["avoided_rate"] = ar ? nlohmann::ordered_json(*ar) : nlohmann::ordered_json(nullptr);
    return j;
}

std::vector<double> margins_of(const std::vector<PairRecord>& records, EntityKind ka,
                               EntityKind kb) {
    std::vector<double> v;
    for (const PairRecord& r : records) {
        if (r.outcome != Outcome::AvoidedOnTime || !r.safety_margin) continue;
        const bool match = (r.kind_a == ka && r.kind_b == kb) ||
                           (r.kind_a == kb && r.kind_b == ka);
        if (match) v.push_back(*r.safety_margin);
    }
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, const RunDebug& dbg) {
    Sim sim(cfg, dbg);
    return sim.run();
}

nlohmann::ordered_json build_report(const ScenarioConfig& cfg, const RunResult& r) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.master_seed;
    j["duration_s"] = cfg.duration_s;
    nlohmann::ordered_json echo;
    for (const auto& [k, v] : config_echo(cfg)) echo[k] = v;
    j["config"] = echo;

    nlohmann::ordered_json pop;
    pop["spawned_vehicles"] = r.spawned_vehicles;
    pop["spawned_pedestrians"] = r.spawned_pedestrians;
    pop["equipped_vehicles"] = r.equipped_vehicles;
    pop["equipped_pedestrians"] = r.equipped_pedestrians;
    pop["vehicles_mean_alive"] = r.vehicles_mean_alive;
    pop["pedestrians_mean_alive"] = r.pedestrians_mean_alive;
    j["population"] = pop;

    double load_mean = 0.0, load_peak = 0.0;
    for (const LoadSample& s : r.load) {
        load_mean += s.msgs_per_s;
        load_peak = std::max(load_peak, s.msgs_per_s);
    }
    if (!r.load.empty()) load_mean /= static_cast<double>(r.load.size());
    nlohmann::ordered_json msg;
    msg["bsm_sent"] = r.bsm_sent;
    msg["bsm_delivered"] = r.bsm_delivered;
    msg["alerts_issued"] = r.alerts_issued;
    msg["alerts_delivered"] = r.alerts_delivered;
    msg["load_mean_msgs_per_s"] = load_mean;
    msg["load_peak_msgs_per_s"] = load_peak;
    j["messages"] = msg;

    nlohmann::ordered_json pairs;
    pairs["ground_truth_total"] = r.stats.total_ground_truth();
    pairs["alerted_pairs"] = r.stats.alerted_pairs;
    pairs["false_positive_total"] = r.stats.total_false_positives();
    pairs["true_negatives"] = r.stats.true_negatives;
    pairs["induced_contacts"] = r.stats.induced_contacts;
    pairs["induced_alert_pairs"] = r.stats.induced_alert_pairs;
    pairs["vehicle_pedestrian"] = kind_stats_json(r.stats.vehicle_pedestrian);
    pairs["vehicle_vehicle"] = kind_stats_json(r.stats.vehicle_vehicle);
    pairs["pedestrian_pedestrian"] = kind_stats_json(r.stats.pedestrian_pedestrian);
    j["pairs"] = pairs;

    nlohmann::ordered_json margins;
    margins["vehicle_pedestrian"] =
        margins_of(r.records, EntityKind::Vehicle, EntityKind::Pedestrian);
    margins["vehicle_vehicle"] =
        margins_of(r.records, EntityKind::Vehicle, EntityKind::Vehicle);
    margins["pedestrian_pedestrian"] =
        margins_of(r.records, EntityKind::Pedestrian, EntityKind::Pedestrian);
    j["safety_margins_m"] = margins;
    return j;
}

void write_outputs(const ScenarioConfig& cfg, const RunResult& r, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::string report_path = out_dir + "/report.json";
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + report_path);
    out << build_report(cfg, r).dump(2) << '\n';
    write_collisions_csv(out_dir + "/collisions.csv", r.records);
    write_load_csv(out_dir + "/load.csv", r.load);
    write_alerts_csv(out_dir + "/alerts.csv", r.alerts);
}

}  // namespace colav

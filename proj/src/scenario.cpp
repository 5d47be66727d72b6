#include "colav/scenario.hpp"

#include "colav/metrics.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace colav {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& what) {
    throw std::runtime_error("config key '" + key + "': " + what);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(x)) bad_value(key, "not a number: '" + v + "'");
        return x;
    } catch (const std::invalid_argument&) {
        bad_value(key, "not a number: '" + v + "'");
    } catch (const std::out_of_range&) {
        bad_value(key, "out of range: '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) bad_value(key, "not an integer: '" + v + "'");
        return x;
    } catch (const std::invalid_argument&) {
        bad_value(key, "not an integer: '" + v + "'");
    } catch (const std::out_of_range&) {
        bad_value(key, "out of range: '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    bad_value(key, "expected true or false, got '" + v + "'");
}

std::string resolve_path(const std::string& base_dir, const std::string& p) {
    if (p.empty() || base_dir.empty()) return p;
    std::filesystem::path fp(p);
    if (fp.is_absolute()) return p;
    return (std::filesystem::path(base_dir) / fp).lexically_normal().string();
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

struct KeyEntry {
    const char* key;
    std::function<void(ScenarioConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

#define NUM_KEY(name, field) \
    {name, [](ScenarioConfig& c, const std::string& v, const std::string&) { c.field = parse_double(name, v); }, \
     [](const ScenarioConfig& c) { return format_num(c.field); }}
#define BOOL_KEY(name, field) \
    {name, [](ScenarioConfig& c, const std::string& v, const std::string&) { c.field = parse_bool(name, v); }, \
     [](const ScenarioConfig& c) { return bool_str(c.field); }}
#define PATH_KEY(name, field) \
    {name, [](ScenarioConfig& c, const std::string& v, const std::string& base) { c.field = resolve_path(base, v); }, \
     [](const ScenarioConfig& c) { return c.field; }}

const std::vector<KeyEntry>& key_table() {
    static const std::vector<KeyEntry> table = {
        NUM_KEY("duration_s", duration_s),
        {"master_seed",
         [](ScenarioConfig& c, const std::string& v, const std::string&) {
             c.master_seed = parse_u64("master_seed", v);
         },
         [](const ScenarioConfig& c) { return std::to_string(c.master_seed); }},
        {"mode",
         [](ScenarioConfig& c, const std::string& v, const std::string&) {
             if (v == "centralized") c.mode = NetworkMode::Centralized;
             else if (v == "distributed") c.mode = NetworkMode::Distributed;
             else bad_value("mode", "expected centralized or distributed, got '" + v + "'");
         },
         [](const ScenarioConfig& c) {
             return std::string(c.mode == NetworkMode::Centralized ? "centralized" : "distributed");
         }},
        NUM_KEY("penetration", penetration),
        NUM_KEY("pedestrian_penetration", pedestrian_penetration),
        BOOL_KEY("alerts_enabled", alerts_enabled),
        PATH_KEY("topology", topology_file),
        PATH_KEY("buildings", buildings_file),
        {"out_dir",
         [](ScenarioConfig& c, const std::string& v, const std::string&) { c.out_dir = v; },
         [](const ScenarioConfig& c) { return c.out_dir; }},
        {"beaconing",
         [](ScenarioConfig& c, const std::string& v, const std::string&) {
             if (v == "dynamic") {
                 BeaconPolicy p = BeaconPolicy::dynamic_default();
                 p.min_interval_s = c.beaconing.min_interval_s;
                 p.max_interval_s = c.beaconing.max_interval_s;
                 p.pos_delta_m = c.beaconing.pos_delta_m;
                 p.speed_delta_mps = c.beaconing.speed_delta_mps;
                 p.heading_delta_rad = c.beaconing.heading_delta_rad;
                 c.beaconing = p;
             } else if (v.rfind("fixed:", 0) == 0) {
                 double hz = parse_double("beaconing", v.substr(6));
                 if (hz <= 0.0) bad_value("beaconing", "fixed rate must be positive");
                 BeaconPolicy p = c.beaconing;
                 p.mode = BeaconMode::Fixed;
                 p.fixed_rate_hz = hz;
                 c.beaconing = p;
             } else {
                 bad_value("beaconing", "expected dynamic or fixed:<rate_hz>, got '" + v + "'");
             }
         },
         [](const ScenarioConfig& c) {
             if (c.beaconing.mode == BeaconMode::Fixed)
                 return "fixed:" + format_num(c.beaconing.fixed_rate_hz);
             return std::string("dynamic");
         }},
        NUM_KEY("beacon.min_interval_s", beaconing.min_interval_s),
        NUM_KEY("beacon.max_interval_s", beaconing.max_interval_s),
        NUM_KEY("beacon.pos_delta_m", beaconing.pos_delta_m),
        NUM_KEY("beacon.speed_delta_mps", beaconing.speed_delta_mps),
        NUM_KEY("beacon.heading_delta_rad", beaconing.heading_delta_rad),
        NUM_KEY("detector.t2c_vehicle", detector.t2c_vehicle),
        NUM_KEY("detector.s2c_vehicle", detector.s2c_vehicle),
        NUM_KEY("detector.t2c_pedestrian", detector.t2c_pedestrian),
        NUM_KEY("detector.s2c_pedestrian", detector.s2c_pedestrian),
        NUM_KEY("detector.max_bsm_age", detector.max_bsm_age),
        NUM_KEY("detector.accel_switch_threshold", detector.accel_switch_threshold),
        NUM_KEY("detector.alert_cooldown", detector.alert_cooldown),
        NUM_KEY("detector.prefilter_max_speed_sum", detector.prefilter_max_speed_sum),
        BOOL_KEY("detector.prefilter_enabled", detector.prefilter_enabled),
        NUM_KEY("reaction.processing_delay_s", reaction.processing_delay_s),
        NUM_KEY("reaction.human_reaction_s", reaction.human_reaction_s),
        NUM_KEY("reaction.vehicle_decel_mps2", reaction.vehicle_decel_mps2),
        NUM_KEY("reaction.pedestrian_reaction_s", reaction.pedestrian_reaction_s),
        NUM_KEY("reaction.pedestrian_decel_mps2", reaction.pedestrian_decel_mps2),
        NUM_KEY("network.uplink_latency_s", uplink_latency_s),
        NUM_KEY("network.downlink_latency_s", downlink_latency_s),
        NUM_KEY("link.tx_power_dbm", link.tx_power_dbm),
        NUM_KEY("link.ref_loss_db", link.ref_loss_db),
        NUM_KEY("link.pathloss_exponent", link.pathloss_exponent),
        NUM_KEY("link.nlos_extra_loss_db", link.nlos_extra_loss_db),
        NUM_KEY("link.nakagami_m_los", link.nakagami_m_los),
        NUM_KEY("link.nakagami_m_nlos", link.nakagami_m_nlos),
        NUM_KEY("link.rx_threshold_dbm", link.rx_threshold_dbm),
        NUM_KEY("entity.vehicle_speed", vehicle_speed),
        NUM_KEY("entity.pedestrian_speed", pedestrian_speed),
        NUM_KEY("entity.vehicle_length", vehicle_dims.length),
        NUM_KEY("entity.vehicle_width", vehicle_dims.width),
        NUM_KEY("entity.pedestrian_length", pedestrian_dims.length),
        NUM_KEY("entity.pedestrian_width", pedestrian_dims.width),
    };
    return table;
}

#undef NUM_KEY
#undef BOOL_KEY
#undef PATH_KEY

void set_key(ScenarioConfig& cfg, const std::string& key, const std::string& value,
             const std::string& base_dir) {
    for (const KeyEntry& e : key_table()) {
        if (key == e.key) {
            e.set(cfg, value, base_dir);
            return;
        }
    }
    throw std::runtime_error("unknown config key '" + key + "'");
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) bad_value(key, what);
}

}  // namespace

void finalize_config(ScenarioConfig& cfg, const std::string& base_dir) {
    require(cfg.duration_s >= 0.0 && std::isfinite(cfg.duration_s), "duration_s",
            "must be >= 0");
    require(cfg.penetration >= 0.0 && cfg.penetration <= 1.0, "penetration",
            "must be in [0, 1]");
    require(cfg.pedestrian_penetration >= 0.0 && cfg.pedestrian_penetration <= 1.0,
            "pedestrian_penetration", "must be in [0, 1]");
    require(cfg.uplink_latency_s >= 0.0, "network.uplink_latency_s", "must be >= 0");
    require(cfg.downlink_latency_s >= 0.0, "network.downlink_latency_s", "must be >= 0");

    const BeaconPolicy& b = cfg.beaconing;
    require(b.fixed_rate_hz > 0.0, "beaconing", "fixed rate must be positive");
    require(b.min_interval_s > 0.0, "beacon.min_interval_s", "must be positive");
    require(b.max_interval_s >= b.min_interval_s, "beacon.max_interval_s",
            "must be >= beacon.min_interval_s");
    require(b.pos_delta_m > 0.0, "beacon.pos_delta_m", "must be positive");
    require(b.speed_delta_mps > 0.0, "beacon.speed_delta_mps", "must be positive");
    require(b.heading_delta_rad > 0.0, "beacon.heading_delta_rad", "must be positive");

    const DetectorConfig& d = cfg.detector;
    require(d.t2c_vehicle > 0.0, "detector.t2c_vehicle", "must be positive");
    require(d.s2c_vehicle > 0.0, "detector.s2c_vehicle", "must be positive");
    require(d.t2c_pedestrian > 0.0, "detector.t2c_pedestrian", "must be positive");
    require(d.s2c_pedestrian > 0.0, "detector.s2c_pedestrian", "must be positive");
    require(d.max_bsm_age > 0.0, "detector.max_bsm_age", "must be positive");
    require(d.accel_switch_threshold >= 0.0, "detector.accel_switch_threshold",
            "must be >= 0");
    require(d.alert_cooldown >= 0.0, "detector.alert_cooldown", "must be >= 0");
    require(d.prefilter_max_speed_sum > 0.0, "detector.prefilter_max_speed_sum",
            "must be positive");

    const ReactionProfile& r = cfg.reaction;
    require(r.processing_delay_s >= 0.0, "reaction.processing_delay_s", "must be >= 0");
    require(r.human_reaction_s >= 0.0, "reaction.human_reaction_s", "must be >= 0");
    require(r.vehicle_decel_mps2 > 0.0, "reaction.vehicle_decel_mps2", "must be positive");
    require(r.pedestrian_reaction_s >= 0.0, "reaction.pedestrian_reaction_s", "must be >= 0");
    require(r.pedestrian_decel_mps2 > 0.0, "reaction.pedestrian_decel_mps2",
            "must be positive");
    // The contact sweep closes each 0.1 s window assuming braking begun by an
    // alert in that window cannot start inside it.
    require(r.processing_delay_s + r.human_reaction_s >= 0.1, "reaction.human_reaction_s",
            "vehicle alert-to-brake lag must be at least 0.1 s");
    require(r.pedestrian_reaction_s >= 0.1, "reaction.pedestrian_reaction_s",
            "must be at least 0.1 s");

    cfg.link.validate();
    require(cfg.vehicle_speed > 0.0, "entity.vehicle_speed", "must be positive");
    require(cfg.pedestrian_speed > 0.0, "entity.pedestrian_speed", "must be positive");
    require(cfg.vehicle_dims.length > 0.0 && cfg.vehicle_dims.width > 0.0,
            "entity.vehicle_length", "vehicle dimensions must be positive");
    require(cfg.pedestrian_dims.length > 0.0 && cfg.pedestrian_dims.width > 0.0,
            "entity.pedestrian_length", "pedestrian dimensions must be positive");

    std::string topo = resolve_path(base_dir, cfg.topology_file);
    cfg.topology = topo.empty() ? default_topology() : Topology::load(topo);
    std::string bld = resolve_path(base_dir, cfg.buildings_file);
    cfg.buildings = bld.empty() ? std::vector<Rect>{} : load_buildings(bld);
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string base_dir = std::filesystem::path(path).parent_path().string();

    ScenarioConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string body = trim(line);
        if (body.empty()) continue;
        std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
        set_key(cfg, key, value, base_dir);
    }
    finalize_config(cfg);
    return cfg;
}

void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    set_key(cfg, key, value, "");
    finalize_config(cfg);
}

std::vector<std::pair<std::string, std::string>> config_echo(const ScenarioConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(key_table().size());
    for (const KeyEntry& e : key_table()) out.emplace_back(e.key, e.get(cfg));
    return out;
}

}  // namespace colav

#pragma once

#include <colav/metrics.hpp>
#include <colav/mobility.hpp>
#include <colav/scenario.hpp>

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

namespace colav {

// Discrete-event kinds, in tie-break order: simultaneous events process
// deliveries first, then alert handling, then transmissions, then the
// bookkeeping tick. Equal (time, kind) resolves by sequence number, so a
// run is a pure function of its inputs.
enum class EventKind : std::uint8_t {
    Spawn = 0,
    DeliverBsm = 1,
    DeliverAlert = 2,
    BrakeStart = 3,
    EmitBsm = 4,
    Tick = 5,
    End = 6,
    Contact = 7,  // trace record only; contacts are derived, never queued
};

const char* to_string(EventKind k);

// Everything one simulated run produced, before any file is written.
struct RunResult {
    std::vector<Entity> entities;  // final descriptors, braking attached
    std::map<EntityId, EntityKind> kinds;
    std::vector<PairRecord> records;
    RunStats stats;
    std::vector<Alert> alerts;  // issued alerts, sorted for stable output
    std::vector<double> bsm_times;
    std::vector<LoadSample> load;  // 1 s sliding-window transmit load
    std::vector<ContactEvent> actual_contacts;
    std::vector<ContactEvent> cf_contacts;  // with all braking stripped
    int spawned_vehicles = 0;
    int spawned_pedestrians = 0;
    int equipped_vehicles = 0;
    int equipped_pedestrians = 0;
    long long bsm_sent = 0;
    long long bsm_delivered = 0;
    long long alerts_issued = 0;
    long long alerts_delivered = 0;
    double vehicles_mean_alive = 0.0;
    double pedestrians_mean_alive = 0.0;
};

// Test and debugging hooks. reverse_equal_time flips the enqueue order of
// same-instant transmission batches; results must not depend on it.
struct RunDebug {
    std::ostream* trace = nullptr;
    bool reverse_equal_time = false;
};

// Execute one scenario with the config's master seed. Deterministic:
// identical inputs produce identical results, bit for bit.
RunResult run_scenario(const ScenarioConfig& cfg, const RunDebug& dbg = {});

// Self-describing run summary (includes the full config echo).
nlohmann::ordered_json build_report(const ScenarioConfig& cfg, const RunResult& r);

// Write report.json, collisions.csv, load.csv, alerts.csv under out_dir
// (created if needed).
void write_outputs(const ScenarioConfig& cfg, const RunResult& r, const std::string& out_dir);

}  // namespace colav

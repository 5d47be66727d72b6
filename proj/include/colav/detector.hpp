#pragma once

#include "colav/messages.hpp"

#include <map>
#include <optional>
#include <utility>

namespace colav {

struct DetectorConfig {
    double t2c_vehicle = 10.0;          // s
    double s2c_vehicle = 5.0;           // m
    double t2c_pedestrian = 5.0;        // s
    double s2c_pedestrian = 2.0;        // m
    double max_bsm_age = 0.8;           // s
    double accel_switch_threshold = 0.1; // m/s^2, per-party |acceleration|
    double alert_cooldown = 1.0;        // s, per unordered pair
    double prefilter_max_speed_sum = 27.78; // m/s
    bool prefilter_enabled = true;

    double horizon() const { return t2c_vehicle > t2c_pedestrian ? t2c_vehicle : t2c_pedestrian; }
    double guard() const { return s2c_vehicle > s2c_pedestrian ? s2c_vehicle : s2c_pedestrian; }
};

// Per-message collision detection over a neighbor table.
//
// process_bsm(bsm, now):
//   1. malformed or stale (now - generated_at > max_bsm_age) input is
//      rejected with no state change;
//   2. the table is pruned and candidates computed;
//   3. each candidate pair is extrapolated to the common time `now`;
//      the linear variant applies when BOTH parties report
//      |acceleration| below the switch threshold, else the quadratic;
//   4. a pair is detected when 0 <= t_star <= t2c and d_star <= s2c,
//      with pedestrian thresholds whenever either party is a pedestrian;
//   5. each detected pair yields two alerts (one per recipient) unless
//      the pair alerted less than alert_cooldown ago;
//   6. the incoming message is upserted last.
//
// With restrict_to set (per-vehicle deployment), only pairs involving
// that entity are evaluated.
class CollisionDetector {
public:
    explicit CollisionDetector(DetectorConfig cfg,
                               std::optional<EntityId> restrict_to = std::nullopt)
        : cfg_(cfg), restrict_to_(restrict_to) {}

    AlertSet process_bsm(const Bsm& bsm, double now);

    NeighborTable& table() { return table_; }
    const NeighborTable& table() const { return table_; }
    const DetectorConfig& config() const { return cfg_; }

private:
    DetectorConfig cfg_;
    std::optional<EntityId> restrict_to_;
    NeighborTable table_;
    std::map<std::pair<EntityId, EntityId>, double> last_alert_;
};

} // namespace colav

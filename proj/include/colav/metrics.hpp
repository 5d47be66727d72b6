#pragma once

#include <colav/messages.hpp>
#include <colav/mobility.hpp>
#include <colav/types.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace colav {

enum class Outcome : std::uint8_t {
    AvoidedOnTime,    // ground truth, alert in time, no actual contact
    DetectedTooLate,  // ground truth, alert in time, contact happened anyway
    Undetected,       // ground truth, no (timely) alert
    FalsePositive,    // alerted, no ground-truth collision
    TrueNegative,     // everything else that still warranted a record
};

const char* to_string(Outcome o);

// Per-pair alert summary handed over by the run: the earliest delivery to
// any involved party, and whether a party was already executing a braking
// schedule when the first alert was issued (alerts that merely react to
// alert-induced braking are tracked separately, not as false positives).
struct PairAlert {
    EntityId a = 0;  // a < b
    EntityId b = 0;
    double first_delivery = 0.0;
    bool while_braking = false;
};

struct PairRecord {
    EntityId a = 0;
    EntityKind kind_a = EntityKind::Vehicle;
    EntityId b = 0;
    EntityKind kind_b = EntityKind::Vehicle;
    bool ground_truth = false;
    bool alerted = false;  // a timely alert per the rules below
    std::optional<double> first_alert_delivery;
    std::optional<double> cf_contact;
    std::optional<double> actual_contact;
    Outcome outcome = Outcome::TrueNegative;
    std::optional<double> safety_margin;
    bool induced = false;  // braking side effect: excluded from FP/FN counts
};

// Classify every pair that was alerted, collided counterfactually, or
// collided in the actual world. An alert counts toward detection only if
// its first delivery precedes the counterfactual contact time. Alerts first
// issued against an already braking party classify as induced TrueNegative
// rather than FalsePositive; actual-only contacts (caused by braking, absent
// from ground truth and never alerted) likewise become induced records.
// Throws std::runtime_error if a pair references an unknown entity kind.
std::vector<PairRecord> classify(const std::vector<PairAlert>& alerts,
                                 const std::vector<ContactEvent>& counterfactual,
                                 const std::vector<ContactEvent>& actual,
                                 const std::map<EntityId, EntityKind>& kinds);

// Minimum center distance once the dust settles: from the latest stop time
// of the braking parties (or the alert horizon if nobody braked) until one
// of the two leaves the world. Exact, since relative motion is linear there.
double pair_margin(const Topology& topo, const Entity& a, const Entity& b);

// Attach safety margins to AvoidedOnTime records.
void fill_margins(std::vector<PairRecord>& records, const Topology& topo,
                  const std::vector<Entity>& entities);

struct LoadSample {
    double t = 0.0;
    double msgs_per_s = 0.0;
};

// Sliding-window transmit load: samples at t = window, 2*window, ... up to
// t_end, each counting messages in (t - window, t].
std::vector<LoadSample> traffic_load(const std::vector<double>& bsm_times, double window,
                                     double t_end);

// Outcome tallies for one pair-kind bucket.
struct KindStats {
    int ground_truth = 0;
    int avoided = 0;
    int too_late = 0;
    int undetected = 0;
    int false_positive = 0;
    std::optional<double> detection_rate() const;  // (avoided+too_late)/gt
    std::optional<double> avoided_rate() const;    // avoided/gt
};

struct RunStats {
    KindStats vehicle_pedestrian;
    KindStats vehicle_vehicle;
    KindStats pedestrian_pedestrian;
    int induced_contacts = 0;
    int induced_alert_pairs = 0;
    int true_negatives = 0;
    KindStats& bucket(EntityKind a, EntityKind b);
    int total_ground_truth() const;
    int total_false_positives() const;
    int alerted_pairs = 0;  // pairs with a counted alert
};

RunStats aggregate(const std::vector<PairRecord>& records);

// Formats numbers the way every CSV and JSON writer here does: shortest
// round-trippable decimal up to 9 significant digits.
std::string format_num(double v);

void write_collisions_csv(const std::string& path, const std::vector<PairRecord>& records);
void write_load_csv(const std::string& path, const std::vector<LoadSample>& load);
void write_alerts_csv(const std::string& path, const std::vector<Alert>& alerts);

}  // namespace colav

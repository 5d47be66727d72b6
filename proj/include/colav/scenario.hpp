#pragma once

#include <colav/beaconing.hpp>
#include <colav/detector.hpp>
#include <colav/mobility.hpp>
#include <colav/network.hpp>
#include <colav/reaction.hpp>

#include <string>
#include <utility>
#include <vector>

namespace colav {

// Everything a run needs, loadable from a `key = value` text file and
// overridable from the command line through the same key space.
struct ScenarioConfig {
    double duration_s = 600.0;
    std::uint64_t master_seed = 1;
    NetworkMode mode = NetworkMode::Centralized;
    double penetration = 1.0;
    double pedestrian_penetration = 1.0;
    bool alerts_enabled = true;
    std::string topology_file;   // empty: built-in default topology
    std::string buildings_file;  // empty: no obstructions
    std::string out_dir = "out";

    BeaconPolicy beaconing;  // dynamic by default
    DetectorConfig detector;
    ReactionProfile reaction;
    LinkModel link;
    double uplink_latency_s = 0.005;
    double downlink_latency_s = 0.005;

    double vehicle_speed = 13.89;
    double pedestrian_speed = 2.0;
    Dimensions vehicle_dims{4.0, 1.8};
    Dimensions pedestrian_dims{0.5, 0.5};

    // Resolved at load/finalize time.
    Topology topology;
    std::vector<Rect> buildings;
};

// Parse a config file. Unknown keys, malformed values, or out-of-range
// settings throw std::runtime_error naming the offending key; referenced
// topology/buildings files are resolved relative to the config file and
// loaded immediately (missing files throw, naming the path).
ScenarioConfig load_config(const std::string& path);

// Apply one `key=value` override using the same key space as the file,
// then re-validate. File-path overrides resolve relative to the current
// working directory.
void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value);

// Load/refresh topology and buildings from the recorded file names and
// check all value ranges. Throws std::runtime_error on any violation.
void finalize_config(ScenarioConfig& cfg, const std::string& base_dir = "");

// The effective settings as ordered key/value text, one entry per config
// key: the self-describing echo embedded in every report.
std::vector<std::pair<std::string, std::string>> config_echo(const ScenarioConfig& cfg);

}  // namespace colav

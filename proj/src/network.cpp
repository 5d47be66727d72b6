#include <colav/network.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace colav {

void LinkModel::validate() const {
    if (!(nakagami_m_los >= 0.5) || !(nakagami_m_nlos >= 0.5))
        throw std::invalid_argument("nakagami m must be >= 0.5");
    if (!(pathloss_exponent > 0.0))
        throw std::invalid_argument("path loss exponent must be positive");
}

void NetworkConfig::validate() const {
    if (uplink_latency_s < 0.0 || downlink_latency_s < 0.0)
        throw std::invalid_argument("latencies must be non-negative");
    if (!(penetration >= 0.0 && penetration <= 1.0))
        throw std::invalid_argument("penetration must be within [0,1]");
    if (!(pedestrian_penetration >= 0.0 && pedestrian_penetration <= 1.0))
        throw std::invalid_argument("pedestrian_penetration must be within [0,1]");
    link.validate();
    for (const auto& b : buildings)
        if (!(b.x_min < b.x_max) || !(b.y_min < b.y_max))
            throw std::invalid_argument("building rectangle must have positive area");
}

bool segment_intersects_rect(const Vec2& a, const Vec2& b, const Rect& r) {
    // Liang-Barsky clip of the parametric segment a + t*(b-a), t in [0,1].
    const double dx = b.x() - a.x();
    const double dy = b.y() - a.y();
    double t0 = 0.0;
    double t1 = 1.0;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x() - r.x_min, r.x_max - a.x(), a.y() - r.y_min, r.y_max - a.y()};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;  // parallel and fully outside
            continue;
        }
        const double t = q[i] / p[i];
        if (p[i] < 0.0) {
            if (t > t1) return false;
            t0 = std::max(t0, t);
        } else {
            if (t < t0) return false;
            t1 = std::min(t1, t);
        }
    }
    return t0 <= t1;  // grazing the boundary counts as blocked
}

bool line_of_sight(const Vec2& a, const Vec2& b, const std::vector<Rect>& buildings) {
    for (const auto& r : buildings)
        if (segment_intersects_rect(a, b, r)) return false;
    return true;
}

double mean_received_power_dbm(const LinkModel& link, double distance, bool los) {
    const double d = std::max(distance, 1.0);
    double loss = link.ref_loss_db + 10.0 * link.pathloss_exponent * std::log10(d);
    if (!los) loss += link.nlos_extra_loss_db;
    return link.tx_power_dbm - loss;
}

double fading_gain(Rng& rng, double m) { return rng.gamma(m, 1.0 / m); }

bool deliver_v2v(const LinkModel& link, double distance, bool los, Rng& rng) {
    const double gain = fading_gain(rng, los ? link.nakagami_m_los : link.nakagami_m_nlos);
    const double rx = mean_received_power_dbm(link, distance, los) +
                      10.0 * std::log10(std::max(gain, 1e-300));
    return rx >= link.rx_threshold_dbm;
}

double v2v_delivery_probability(const LinkModel& link, double distance, bool los, Rng& rng,
                                int trials) {
    int ok = 0;
    for (int i = 0; i < trials; ++i)
        if (deliver_v2v(link, distance, los, rng)) ++ok;
    return static_cast<double>(ok) / trials;
}

std::vector<Rect> parse_buildings(const std::string& text, const std::string& name) {
    std::vector<Rect> out;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        Rect r;
        char c1 = 0, c2 = 0, c3 = 0;
        if (!(row >> r.x_min >> c1 >> r.y_min >> c2 >> r.x_max >> c3 >> r.y_max) || c1 != ',' ||
            c2 != ',' || c3 != ',') {
            std::ostringstream os;
            os << name << ":" << lineno << ": expected x_min,y_min,x_max,y_max";
            throw std::runtime_error(os.str());
        }
        if (!(r.x_min < r.x_max) || !(r.y_min < r.y_max)) {
            std::ostringstream os;
            os << name << ":" << lineno << ": rectangle must have positive area";
            throw std::runtime_error(os.str());
        }
        out.push_back(r);
    }
    return out;
}

std::vector<Rect> load_buildings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open buildings file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_buildings(os.str(), path);
}

}  // namespace colav

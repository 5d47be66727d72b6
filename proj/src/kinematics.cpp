#include "colav/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace colav {

namespace {

bool finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

bool finite(const KinematicState& s) {
    return finite(s.position) && finite(s.velocity) && finite(s.acceleration) &&
           std::isfinite(s.timestamp);
}

double poly_eval(double c3, double c2, double c1, double c0, double t) {
    return ((c3 * t + c2) * t + c1) * t + c0;
}

double poly_deriv(double c3, double c2, double c1, double t) {
    return (3.0 * c3 * t + 2.0 * c2) * t + c1;
}

void newton_polish(double c3, double c2, double c1, double c0, double& root) {
    for (int i = 0; i < 3; ++i) {
        const double d = poly_deriv(c3, c2, c1, root);
        if (d == 0.0 || !std::isfinite(d)) return;
        const double step = poly_eval(c3, c2, c1, c0, root) / d;
        if (!std::isfinite(step)) return;
        root -= step;
    }
}

} // namespace

KinematicState extrapolate(const KinematicState& s, double t) {
    const double dt = t - s.timestamp;
    KinematicState out;
    out.position = s.position + s.velocity * dt + 0.5 * dt * dt * s.acceleration;
    out.velocity = s.velocity + s.acceleration * dt;
    out.acceleration = s.acceleration;
    out.timestamp = t;
    return out;
}

RelativeMotion relative_motion(const KinematicState& a, const KinematicState& b, double t) {
    if (!finite(a) || !finite(b) || !std::isfinite(t))
        throw std::invalid_argument("relative_motion: non-finite input");
    const KinematicState ap = extrapolate(a, t);
    const KinematicState bp = extrapolate(b, t);
    RelativeMotion rm;
    rm.p0 = bp.position - ap.position;
    rm.dv = bp.velocity - ap.velocity;
    rm.da = bp.acceleration - ap.acceleration;
    return rm;
}

RelativeMotion relative_motion(const KinematicState& a, const KinematicState& b) {
    return relative_motion(a, b, std::max(a.timestamp, b.timestamp));
}

double separation_at(const RelativeMotion& rm, double dt) {
    return (rm.p0 + rm.dv * dt + (0.5 * dt * dt) * rm.da).norm();
}

ClosestApproach closest_approach_linear(const RelativeMotion& rm) {
    const double v2 = rm.dv.squaredNorm();
    if (v2 <= kSpeedSqEpsilon) return {0.0, rm.p0.norm()};
    const double t_star = -rm.p0.dot(rm.dv) / v2;
    if (t_star < 0.0) return {t_star, rm.p0.norm()};
    return {t_star, separation_at(rm, t_star)};
}

std::vector<double> solve_cubic_real(double c3, double c2, double c1, double c0) {
    std::vector<double> roots;

    if (c3 == 0.0) {
        if (c2 == 0.0) {
            if (c1 == 0.0) {
                if (c0 == 0.0)
                    throw std::invalid_argument("solve_cubic_real: identically zero polynomial");
                return roots; // nonzero constant: no roots
            }
            roots.push_back(-c0 / c1);
        } else {
            const double disc = c1 * c1 - 4.0 * c2 * c0;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                const double q = -0.5 * (c1 + std::copysign(sq, c1));
                if (q == 0.0) {
                    roots.push_back(0.0);
                } else {
                    roots.push_back(q / c2);
                    roots.push_back(c0 / q);
                }
            }
        }
    } else {
        // Normalized cubic t^3 + a t^2 + b t + c.
        const double a = c2 / c3;
        const double b = c1 / c3;
        const double c = c0 / c3;
        const double q = (a * a - 3.0 * b) / 9.0;
        const double r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
        const double q3 = q * q * q;
        if (r * r < q3) {
            const double theta = std::acos(std::clamp(r / std::sqrt(q3), -1.0, 1.0));
            const double m = -2.0 * std::sqrt(q);
            roots.push_back(m * std::cos(theta / 3.0) - a / 3.0);
            roots.push_back(m * std::cos((theta + 2.0 * M_PI) / 3.0) - a / 3.0);
            roots.push_back(m * std::cos((theta - 2.0 * M_PI) / 3.0) - a / 3.0);
        } else {
            const double big =
                -std::copysign(std::cbrt(std::abs(r) + std::sqrt(r * r - q3)), r);
            const double small = (big == 0.0) ? 0.0 : q / big;
            roots.push_back(big + small - a / 3.0);
            // Boundary case r^2 == q^3: the complex pair collapses onto a
            // real double root at -(big+small)/2 - a/3.
            if (std::abs(big - small) <= 1e-7 * std::max(1.0, std::abs(big) + std::abs(small)))
                roots.push_back(-0.5 * (big + small) - a / 3.0);
        }
    }

    for (double& root : roots) newton_polish(c3, c2, c1, c0, root);
    std::sort(roots.begin(), roots.end());
    std::vector<double> out;
    for (double root : roots) {
        if (out.empty() || std::abs(root - out.back()) > 1e-9 * std::max(1.0, std::abs(root)))
            out.push_back(root);
    }
    return out;
}

ClosestApproach closest_approach_quadratic(const RelativeMotion& rm) {
    const double c3 = 0.5 * rm.da.squaredNorm();
    const double c2 = 1.5 * rm.dv.dot(rm.da);
    const double c1 = rm.dv.squaredNorm() + rm.p0.dot(rm.da);
    const double c0 = rm.p0.dot(rm.dv);
    const std::vector<double> roots = solve_cubic_real(c3, c2, c1, c0);

    ClosestApproach best{0.0, separation_at(rm, 0.0)};
    for (double root : roots) {
        if (root <= 0.0) continue;
        const double d = separation_at(rm, root);
        if (d < best.d_star) best = {root, d};
    }
    return best;
}

ClosestApproach closest_approach(const RelativeMotion& rm, double accel_switch) {
    if (rm.da.squaredNorm() >= accel_switch * accel_switch)
        return closest_approach_quadratic(rm);
    return closest_approach_linear(rm);
}

} // namespace colav

#pragma once

#include "colav/types.hpp"

#include <vector>

namespace colav {

// Squared-speed floor below which relative motion counts as stationary.
inline constexpr double kSpeedSqEpsilon = 1e-9; // (m/s)^2

struct KinematicState {
    Vec2 position = Vec2::Zero();
    Vec2 velocity = Vec2::Zero();
    Vec2 acceleration = Vec2::Zero();
    double timestamp = 0.0;
};

// Constant-acceleration projection of a state to time t (t may precede
// the state's own timestamp).
KinematicState extrapolate(const KinematicState& s, double t);

// Relative motion of b with respect to a, both projected to time t:
// separation(dt) = p0 + dv*dt + 0.5*da*dt^2 for dt >= 0.
// Throws std::invalid_argument on non-finite inputs.
struct RelativeMotion {
    Vec2 p0 = Vec2::Zero(); // position of b minus position of a at t
    Vec2 dv = Vec2::Zero(); // velocity difference at t
    Vec2 da = Vec2::Zero(); // acceleration difference
};

RelativeMotion relative_motion(const KinematicState& a, const KinematicState& b, double t);

// Convenience overload: projects both states to the later timestamp.
RelativeMotion relative_motion(const KinematicState& a, const KinematicState& b);

// Separation distance of a relative-motion pair at lookahead dt.
double separation_at(const RelativeMotion& rm, double dt);

struct ClosestApproach {
    double t_star = 0.0; // seconds from the evaluation time
    double d_star = 0.0; // metres
};

// Constant-velocity closest approach. t_star = -(p0.dv)/|dv|^2.
// If |dv|^2 <= kSpeedSqEpsilon the pair is relatively stationary:
// t_star = 0, d_star = |p0|.  A receding pair yields a NEGATIVE t_star
// (reported as computed) with d_star = |p0|, the minimum over t >= 0.
ClosestApproach closest_approach_linear(const RelativeMotion& rm);

// Constant-acceleration closest approach: minimizes |p0 + dv t + da t^2/2|
// over t >= 0 via the real roots of the distance-derivative cubic
//   (|da|^2/2) t^3 + (3/2)(dv.da) t^2 + (|dv|^2 + p0.da) t + p0.dv = 0.
// Candidate times are the nonnegative roots plus t = 0; t_star is the
// candidate with minimal separation (so t_star >= 0 always).
ClosestApproach closest_approach_quadratic(const RelativeMotion& rm);

// Dispatch: quadratic when |da| >= accel_switch, else linear.
ClosestApproach closest_approach(const RelativeMotion& rm, double accel_switch);

// All real roots of c3 t^3 + c2 t^2 + c1 t + c0 = 0, ascending, deduped.
// Degrades gracefully through quadratic/linear/constant as leading
// coefficients vanish; the identically-zero polynomial (all coefficients
// zero) throws std::invalid_argument. Roots are Newton-polished.
std::vector<double> solve_cubic_real(double c3, double c2, double c1, double c0);

} // namespace colav

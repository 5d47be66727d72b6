#pragma once

#include "colav/kinematics.hpp"
#include "colav/rng.hpp"

#include <cstdint>

namespace colav {

// Independent cross-checks for the closed-form kinematics. These
// deliberately avoid the analytic solver: the grid search brackets the
// minimum by dense sampling and refines it by golden-section search, so
// agreement with the closed form is meaningful evidence, not tautology.

// Minimum separation over t in [0, t_max] by dense sampling (step
// coarse_dt) followed by golden-section refinement of the best bracket.
ClosestApproach grid_closest_approach(const RelativeMotion& rm, double t_max,
                                      double coarse_dt = 1e-3);

// |c3 r^3 + c2 r^2 + c1 r + c0| for a claimed root r.
double cubic_residual(double c3, double c2, double c1, double c0, double r);

// Sum of term magnitudes at r, the scale against which a residual is
// judged (backward-error style).
double cubic_scale(double c3, double c2, double c1, double c0, double r);

struct OracleSummary {
    int cases = 0;
    int failures = 0;
    double max_d_error = 0.0;       // worst |d_closed - d_grid|
    double max_rel_residual = 0.0;  // worst cubic residual / scale
};

// Randomized comparison of the closed-form closest approach against the
// grid oracle plus residual checks of every cubic root. A case fails if
// closed-form d* differs from the grid minimum by more than d_tol or a
// root residual exceeds residual_tol * scale.
OracleSummary run_kinematics_oracle(int cases, std::uint64_t seed,
                                    double d_tol = 1e-4,
                                    double residual_tol = 1e-7);

} // namespace colav

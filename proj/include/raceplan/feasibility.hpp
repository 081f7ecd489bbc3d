#pragma once

#include <vector>

#include "raceplan/gg_diagram.hpp"
#include "raceplan/track.hpp"
#include "raceplan/trajectory.hpp"

namespace raceplan {

struct FeasibilityParams {
  double d_w = 1.93;       // vehicle width [m]
  double d_s = 0.2;        // lateral safety margin [m]
  double kappa_max = 0.1;  // [1/m]
  bool flat_2d = false;    // evaluate the dynamics check with flat-track accelerations
};

/// Per-point results of the track-bounds inequality (interpolated widths,
/// non-strict comparison).
std::vector<bool> check_bounds(const TrajectoryCandidate& candidate, const TrackGeometry& track,
                               double d_w, double d_s);

/// |kappa_hat| <= kappa_max per point.
std::vector<bool> check_curvature(const TrajectoryCandidate& candidate, double kappa_max);

/// Diamond gg check per point with the envelope interpolated at (v, g_tilde).
std::vector<bool> check_dynamics(const TrajectoryCandidate& candidate, const GgLookup& gg,
                                 bool flat_2d);

/// Runs all three checks and fills candidate.report.
FeasibilityReport evaluate_candidate(TrajectoryCandidate& candidate, const TrackGeometry& track,
                                     const GgLookup& gg, const FeasibilityParams& params);

struct EvaluateSetResult {
  std::vector<int> feasible;   // candidate indices, ascending
  int soft_fallback = -1;      // fewest violations; tie-break by worst slack, then index
};

EvaluateSetResult evaluate_set(std::vector<TrajectoryCandidate>& candidates,
                               const TrackGeometry& track, const GgLookup& gg,
                               const FeasibilityParams& params);

}  // namespace raceplan

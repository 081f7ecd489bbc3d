#pragma once

#include <memory>
#include <string>
#include <vector>

#include "raceplan/gg_diagram.hpp"
#include "raceplan/polynomial.hpp"
#include "raceplan/racing_line.hpp"
#include "raceplan/sampling.hpp"
#include "raceplan/track.hpp"
#include "raceplan/vehicle_state.hpp"

namespace raceplan {

enum class GenMode { jerk_optimal, relative };

/// Longitudinal curve s_i(t): either a plain jerk-optimal quartic or a
/// quartic on the residual against the racing line with the line added back.
class LonCurve {
 public:
  static LonCurve jerk_optimal(const VehicleState& state, const LongitudinalSample& sample,
                               double T);
  static LonCurve relative(const VehicleState& state, const LongitudinalSample& sample,
                           std::shared_ptr<const RacingLine> rl, double T);

  LonState eval(double t) const;
  GenMode mode() const { return mode_; }
  double horizon() const { return poly_.horizon(); }
  const Poly4& poly() const { return poly_; }
  bool tracks_racing_line_sample() const { return racing_line_sample_; }

 private:
  GenMode mode_ = GenMode::jerk_optimal;
  Poly4 poly_;
  std::shared_ptr<const RacingLine> rl_;
  bool racing_line_sample_ = false;
};

/// Lateral curve n_j(t): jerk-optimal quintic in time, or a quintic on the
/// residual against the reparameterized racing line profile of the paired
/// longitudinal curve.
class LatCurve {
 public:
  static LatCurve jerk_optimal(const VehicleState& state, const LateralSample& sample, double T);
  static LatCurve relative(const VehicleState& state, const LateralSample& sample,
                           std::shared_ptr<const LonCurve> lon,
                           std::shared_ptr<const RacingLine> rl, double T);

  LatState eval(double t) const;
  GenMode mode() const { return mode_; }
  const Poly5& poly() const { return poly_; }
  bool tracks_racing_line_sample() const { return racing_line_sample_; }

 private:
  GenMode mode_ = GenMode::jerk_optimal;
  Poly5 poly_;
  std::shared_ptr<const LonCurve> lon_;
  std::shared_ptr<const RacingLine> rl_;
  bool racing_line_sample_ = false;
};

/// One evaluated trajectory point: curvilinear states, velocity-frame
/// quantities from the closed transformation, and apparent accelerations.
struct TrajectoryPoint {
  double t = 0.0;
  double s = 0.0, s_dot = 0.0, s_ddot = 0.0;
  double n = 0.0, n_dot = 0.0, n_ddot = 0.0;
  double x = 0.0, y = 0.0, z = 0.0;
  double v = 0.0;
  double chi_hat = 0.0;
  double ax_hat = 0.0, ay_hat = 0.0;
  double kappa_hat = 0.0;
  double w = 0.0;        // vertical rate in the road frame
  double omega_x = 0.0;  // roll rate of the road frame along the motion
  double ax_tilde = 0.0, ay_tilde = 0.0, g_tilde = kGravity;
};

struct FeasibilityReport {
  int bounds_violations = 0;
  int curvature_violations = 0;
  int dynamics_violations = 0;
  double worst_bounds_slack = 0.0;
  double worst_curvature_slack = 0.0;
  double worst_dynamics_slack = 0.0;
  bool feasible = false;
  int total_violations() const {
    return bounds_violations + curvature_violations + dynamics_violations;
  }
  double worst_slack() const;
};

struct TrajectoryCandidate {
  int index = -1;
  std::shared_ptr<const LonCurve> lon;
  std::shared_ptr<const LatCurve> lat;
  std::vector<TrajectoryPoint> points;
  bool kinematically_valid = true;
  std::string invalid_reason;
  bool is_racing_line_candidate = false;
  FeasibilityReport report;
  double cost = 0.0;
};

/// Generates the curvilinear candidate set for one planning cycle.
/// In relative mode the longitudinal generation switches to jerk-optimal
/// when the start velocity deviates from the racing line by more than
/// s0_thr, and both lateral variants are produced per end sample.
std::vector<TrajectoryCandidate> generate_candidates(const VehicleState& state,
                                                     std::shared_ptr<const RacingLine> rl,
                                                     const std::vector<LongitudinalSample>& lon_samples,
                                                     double T, double s0_thr,
                                                     const TrackGeometry& track, int n_n, double d_w,
                                                     int n_points, bool relative_mode);

/// Closed transformation of one curvilinear state to the velocity frame.
/// Apparent accelerations are not filled here (they need w_dot, see
/// attach_apparent_accels).
TrajectoryPoint transform_state(const TrackGeometry& track, double t, const LonState& lon,
                                const LatState& lat);

/// Adds apparent accelerations to a point sequence; w_dot is obtained from
/// finite differences of omega_x along the trajectory.
void attach_apparent_accels(const TrackGeometry& track, std::vector<TrajectoryPoint>& points);

/// Fills the Cartesian/velocity-frame/apparent fields of all points.
/// On a transform domain error the candidate is marked invalid.
void to_cartesian(TrajectoryCandidate& candidate, const TrackGeometry& track);

/// Debug dump, one row per point.
void write_candidate_csv(const TrajectoryCandidate& candidate, const std::string& path);

}  // namespace raceplan

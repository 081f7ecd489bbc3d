#pragma once

#include <functional>
#include <string>
#include <vector>

#include "raceplan/gg_diagram.hpp"
#include "raceplan/track.hpp"
#include "raceplan/vehicle_state.hpp"

namespace raceplan {

struct RacingLinePoint {
  double t = 0.0;
  double s = 0.0;
  double s_dot = 0.0;
  double s_ddot = 0.0;
  double n = 0.0;
  double n_dot = 0.0;
  double n_ddot = 0.0;
};

/// Time-parameterized curvilinear curve with strictly increasing s and
/// s_dot > 0 everywhere. Immutable; interpolation is linear in t.
class RacingLine {
 public:
  explicit RacingLine(std::vector<RacingLinePoint> points);

  double horizon() const { return points_.back().t; }
  double s_start() const { return points_.front().s; }
  double s_end() const { return points_.back().s; }
  const std::vector<RacingLinePoint>& points() const { return points_; }

  /// Linear interpolation of all fields; throws outside [0, T_rl].
  RacingLinePoint state_at(double t) const;

  /// Monotone inverse s -> t; throws outside [s_start, s_end].
  double time_at_s(double s) const;
  RacingLinePoint state_at_s(double s) const;

  /// CSV format t,s,s_dot,s_ddot,n,n_dot,n_ddot.
  static RacingLine load(const std::string& path);
  void save(const std::string& path) const;

 private:
  std::vector<RacingLinePoint> points_;
};

/// Lateral profile and time derivatives needed to follow the racing line
/// path with a longitudinal curve deviating from s_rl(t).
LatState reparam_lateral(const RacingLine& rl, const LonState& lon);

/// Lateral path n(s) used by the racing line providers.
using LateralPathFn = std::function<double(double)>;

LateralPathFn centerline_path(const TrackGeometry& track);

/// Heuristic apex-cutting path: offsets toward the inside of upcoming
/// curvature, smoothed over smooth_len and clamped to the margined bounds.
LateralPathFn corner_cut_path(const TrackGeometry& track, double gain, double smooth_len,
                              double margin);

struct RacingLineMargins {
  double d_s_rl = 0.5;     // lateral safety margin [m]
  double d_w = 1.93;       // vehicle width [m]
  double a_mgn = 0.1;      // relative envelope margin
  double a_abs_mgn = 0.8;  // absolute envelope margin [m/s^2]
};

struct ProfilerConfig {
  double ds = 1.0;           // profile grid spacing [m]
  double kappa_max = 0.1;    // path curvature limit [1/m]
  double fixed_point_tol = 1e-6;  // [m/s]
  int max_iterations = 64;
  double blend_len_max = 150.0;  // online lateral blend length cap [m]
};

/// Closed flying-lap racing line: quasi-steady-state forward/backward
/// velocity profile over the given path, iterated around the loop to the
/// fixed point. The envelope is shrunk by the racing line margins.
RacingLine offline_racing_line(const TrackGeometry& track, const GgLookup& gg,
                               const LateralPathFn& path, const RacingLineMargins& margins,
                               const ProfilerConfig& config = {});

struct OnlineRacingLineResult {
  RacingLine line;
  bool start_speed_clamped = false;
  double clamp_excess = 0.0;  // [m/s] above the backward-pass bound
};

/// Racing line re-solved from the current vehicle state over a spatial
/// horizon, with a smooth lateral blend from the ego position onto the path.
OnlineRacingLineResult online_racing_line(const TrackGeometry& track, const GgLookup& gg,
                                          const LateralPathFn& path, const VehicleState& ego,
                                          double horizon_m, const RacingLineMargins& margins,
                                          const ProfilerConfig& config = {});

/// Shifts a closed-lap line so it starts at s0 (wrapped) and covers the
/// requested duration, unwrapping s across lap seams.
RacingLine anchor_closed_line(const RacingLine& closed_lap, double s0, double duration,
                              double track_length);

}  // namespace raceplan

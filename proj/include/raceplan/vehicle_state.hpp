#pragma once

namespace raceplan {

/// Ego state in curvilinear coordinates.
struct VehicleState {
  double s = 0.0;
  double s_dot = 0.0;
  double s_ddot = 0.0;
  double n = 0.0;
  double n_dot = 0.0;
  double n_ddot = 0.0;
};

/// Longitudinal curve value (s, s_dot, s_ddot) at one time.
struct LonState {
  double s = 0.0;
  double s_dot = 0.0;
  double s_ddot = 0.0;
};

/// Lateral curve value (n, n_dot, n_ddot) at one time.
struct LatState {
  double n = 0.0;
  double n_dot = 0.0;
  double n_ddot = 0.0;
};

}  // namespace raceplan

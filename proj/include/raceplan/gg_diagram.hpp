#pragma once

#include <string>
#include <vector>

#include "raceplan/track.hpp"

namespace raceplan {

inline constexpr double kGravity = 9.81;  // [m/s^2]

/// Diamond-shaped acceleration envelope at one (v, g_tilde) grid point.
/// p blends the shape between a rhombus (p=1) and an ellipse (p=2).
struct GgShape {
  double ax_min = 0.0;  // <= 0 [m/s^2]
  double ax_max = 0.0;  // >= 0 [m/s^2]
  double ay_max = 0.0;  // >= 0 [m/s^2]
  double p = 1.0;
};

/// Accelerations as felt on the inclined road plane.
struct ApparentAccel {
  double ax_tilde = 0.0;
  double ay_tilde = 0.0;
  double g_tilde = kGravity;
};

/// Result of the diamond check: ok plus the signed slack of each inequality
/// (positive means satisfied, negative the amount of violation).
struct AccelCheck {
  bool ok = false;
  double slack_drive = 0.0;     // ax_max - ax_tilde
  double slack_lateral = 0.0;   // ay_max - |ay_tilde|
  double slack_combined = 0.0;  // |ax_min|*bracket - |ax_tilde|
};

/// Lookup tables of the diamond parameters over a rectangular (v, g_tilde)
/// grid with bilinear interpolation. Out-of-grid queries clamp to the
/// boundary. Immutable after construction.
class GgLookup {
 public:
  static GgLookup from_tables(std::vector<double> v_grid, std::vector<double> g_grid,
                              std::vector<double> ax_min, std::vector<double> ax_max,
                              std::vector<double> ay_max, std::vector<double> p);

  /// Synthetic friction-circle style table: ax_min = -mu_x*g, ay_max = mu_y*g,
  /// ax_max = min(ax_drive_max, mu_x*g), constant shape factor.
  static GgLookup synth(double mu_x, double mu_y, double ax_drive_max, double p,
                        std::vector<double> v_grid, std::vector<double> g_grid);

  /// CSV format: header v,g_tilde,ax_min,ax_max,ay_max,p over a complete grid.
  static GgLookup load(const std::string& path);
  void save(const std::string& path) const;

  GgShape query(double v, double g_tilde) const;

  const std::vector<double>& v_grid() const { return v_grid_; }
  const std::vector<double>& g_grid() const { return g_grid_; }
  double v_max() const { return v_grid_.back(); }

 private:
  GgLookup() = default;
  double cell(const std::vector<double>& table, std::size_t iv, std::size_t ig) const {
    return table[iv * g_grid_.size() + ig];
  }

  std::vector<double> v_grid_;
  std::vector<double> g_grid_;
  std::vector<double> ax_min_, ax_max_, ay_max_, p_;
};

/// Shrinks the envelope for racing line generation: each extremal value e is
/// replaced by max(eps, (1-a_mgn)*e - a_abs_mgn). The shape factor stays.
GgShape scale_for_racing_line(const GgShape& shape, double a_mgn, double a_abs_mgn);

AccelCheck check_accel(const GgShape& shape, const ApparentAccel& accel);

/// Apparent accelerations on the 3D track. w_dot is the time derivative of
/// the vertical velocity, supplied by the caller (w_dot = n_dot*omega_x +
/// n*omega_x_dot with omega_x = Omega_x*s_dot).
ApparentAccel apparent_accels(double ax_hat, double ay_hat, double v, double chi_hat,
                              const RoadFrame& frame, double s_dot, double w_dot);

}  // namespace raceplan

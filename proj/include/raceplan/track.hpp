#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace raceplan {

using Vec3 = Eigen::Vector3d;

/// One discrete sample of the reference line.
struct TrackSample {
  double s = 0.0;              // arc length [m]
  Vec3 position = Vec3::Zero();
  double theta = 0.0;          // yaw, intrinsic zyx Euler angles [rad]
  double mu = 0.0;             // pitch/slope [rad]
  double phi = 0.0;            // roll/banking [rad]
  double n_l = 0.0;            // left lateral bound, >= 0 [m]
  double n_r = 0.0;            // right lateral bound, <= 0 [m]
};

/// Moving road frame at a given arc length. n_vec points to the left of
/// travel, m_vec = t_vec x n_vec is the road normal.
struct RoadFrame {
  Vec3 t_vec;
  Vec3 n_vec;
  Vec3 m_vec;
  Vec3 omega;        // angular rate of the frame per arc length [rad/m]
  Vec3 omega_slope;  // d(omega)/ds [rad/m^2]
  double theta = 0.0;
  double mu = 0.0;
  double phi = 0.0;
};

/// Discretized 3D reference line with Euler angles and lateral widths.
/// All per-sample quantities are interpolated linearly in s. Immutable
/// after construction; queries are thread-safe.
class TrackGeometry {
 public:
  static TrackGeometry from_samples(std::vector<TrackSample> samples, bool closed);

  /// Reads the CSV track format (header s,x,y,z,theta,mu,phi,n_l,n_r and
  /// an optional `# closed=true|false` metadata line).
  static TrackGeometry load(const std::string& path);
  void save(const std::string& path) const;

  double length() const { return s_f_; }
  bool closed() const { return closed_; }
  std::size_t size() const { return samples_.size(); }
  const std::vector<TrackSample>& samples() const { return samples_; }

  /// Maps s into [0, s_f) for closed tracks. Throws for an open track when
  /// s lies outside [0, s_f].
  double wrap_s(double s) const;

  RoadFrame frame_at(double s) const;
  Vec3 surface_point(double s, double n) const;

  double n_left(double s) const;
  double n_right(double s) const;
  double n_left_slope(double s) const;
  double n_right_slope(double s) const;

 private:
  TrackGeometry() = default;
  void build_derivative_grids();
  // index of the segment containing s (s already wrapped/clamped)
  std::size_t segment_index(double s) const;

  std::vector<TrackSample> samples_;
  // per-sample central-difference derivatives
  std::vector<Vec3> euler_rate_;     // (theta', mu', phi')
  std::vector<Vec3> omega_;          // body rates per arc length at samples
  std::vector<Vec3> omega_slope_;    // d(omega)/ds at samples
  std::vector<double> nl_slope_;
  std::vector<double> nr_slope_;
  double s_f_ = 0.0;
  bool closed_ = false;
  bool uniform_ = false;
  double uniform_ds_ = 0.0;
};

}  // namespace raceplan

#include "raceplan/track.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "csv_util.hpp"

namespace raceplan {

namespace {

constexpr double kMinSampleSpacing = 1e-6;  // [m]
constexpr double kClosureTol = 1e-3;        // [m]

Eigen::Matrix3d rotation_zyx(double theta, double mu, double phi) {
  using Eigen::AngleAxisd;
  return (AngleAxisd(theta, Vec3::UnitZ()) * AngleAxisd(mu, Vec3::UnitY()) *
          AngleAxisd(phi, Vec3::UnitX()))
      .toRotationMatrix();
}

// Intrinsic zyx body rates from Euler angle derivatives with respect to s.
Vec3 body_rates(double theta_d, double mu_d, double phi_d, double mu, double phi) {
  const double sm = std::sin(mu), cm = std::cos(mu);
  const double sp = std::sin(phi), cp = std::cos(phi);
  return {phi_d - theta_d * sm,
          mu_d * cp + theta_d * cm * sp,
          theta_d * cm * cp - mu_d * sp};
}

}  // namespace

TrackGeometry TrackGeometry::from_samples(std::vector<TrackSample> samples, bool closed) {
  if (samples.size() < 4) throw std::runtime_error("track: needs at least 4 samples");
  if (samples.front().s != 0.0) throw std::runtime_error("track: first sample must be at s=0");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& sm = samples[i];
    if (i > 0) {
      const double ds = sm.s - samples[i - 1].s;
      if (ds <= 0.0)
        throw std::runtime_error("track: sample s values must be strictly increasing (index " +
                                 std::to_string(i) + ")");
      if (ds < kMinSampleSpacing)
        throw std::runtime_error("track: samples closer than 1e-6 m (index " + std::to_string(i) + ")");
    }
    if (!(sm.n_r < sm.n_l))
      throw std::runtime_error("track: n_r < n_l violated at s=" + detail::fmt_double(sm.s));
    if (std::abs(sm.mu) >= std::numbers::pi / 2 || std::abs(sm.phi) >= std::numbers::pi / 2)
      throw std::runtime_error("track: |mu| and |phi| must stay below pi/2 at s=" +
                               detail::fmt_double(sm.s));
  }

  // Unwrap theta so linear interpolation never crosses a +-pi discontinuity.
  for (std::size_t i = 1; i < samples.size(); ++i) {
    double d = samples[i].theta - samples[i - 1].theta;
    while (d > std::numbers::pi) {
      samples[i].theta -= 2 * std::numbers::pi;
      d = samples[i].theta - samples[i - 1].theta;
    }
    while (d < -std::numbers::pi) {
      samples[i].theta += 2 * std::numbers::pi;
      d = samples[i].theta - samples[i - 1].theta;
    }
  }

  if (closed) {
    const double gap = (samples.back().position - samples.front().position).norm();
    if (gap > kClosureTol)
      throw std::runtime_error("track: closure violation, |c(0) - c(s_f)| = " +
                               detail::fmt_double(gap) + " m");
  }

  TrackGeometry track;
  track.samples_ = std::move(samples);
  track.closed_ = closed;
  track.s_f_ = track.samples_.back().s;

  // detect uniform spacing for O(1) segment lookup
  const double ds0 = track.samples_[1].s - track.samples_[0].s;
  track.uniform_ = true;
  for (std::size_t i = 1; i + 1 < track.samples_.size(); ++i) {
    const double ds = track.samples_[i + 1].s - track.samples_[i].s;
    if (std::abs(ds - ds0) > 1e-9 * std::max(1.0, ds0)) {
      track.uniform_ = false;
      break;
    }
  }
  track.uniform_ds_ = ds0;

  track.build_derivative_grids();
  return track;
}

void TrackGeometry::build_derivative_grids() {
  const std::size_t n = samples_.size();
  euler_rate_.resize(n);
  nl_slope_.resize(n);
  nr_slope_.resize(n);

  auto angle_of = [&](std::size_t k) {
    return Vec3(samples_[k].theta, samples_[k].mu, samples_[k].phi);
  };

  // For closed tracks the last sample duplicates the first; wrap the stencil
  // across the seam with the accumulated heading offset.
  const double theta_turn = samples_.back().theta - samples_.front().theta;
  for (std::size_t k = 0; k < n; ++k) {
    Vec3 prev_a, next_a;
    double prev_nl, next_nl, prev_nr, next_nr;
    double ds;
    if (k > 0 && k + 1 < n) {
      prev_a = angle_of(k - 1);
      next_a = angle_of(k + 1);
      prev_nl = samples_[k - 1].n_l;
      next_nl = samples_[k + 1].n_l;
      prev_nr = samples_[k - 1].n_r;
      next_nr = samples_[k + 1].n_r;
      ds = samples_[k + 1].s - samples_[k - 1].s;
    } else if (closed_) {
      // endpoints: neighbours across the seam (sample n-1 == sample 0)
      const std::size_t before = n - 2;
      const std::size_t after = 1;
      prev_a = angle_of(before);
      next_a = angle_of(after);
      if (k == 0) {
        prev_a.x() -= theta_turn;
      } else {  // k == n-1
        next_a.x() += theta_turn;
      }
      prev_nl = samples_[before].n_l;
      next_nl = samples_[after].n_l;
      prev_nr = samples_[before].n_r;
      next_nr = samples_[after].n_r;
      ds = (s_f_ - samples_[before].s) + samples_[after].s;
    } else if (k == 0) {
      prev_a = angle_of(0);
      next_a = angle_of(1);
      prev_nl = samples_[0].n_l;
      next_nl = samples_[1].n_l;
      prev_nr = samples_[0].n_r;
      next_nr = samples_[1].n_r;
      ds = samples_[1].s - samples_[0].s;
    } else {
      prev_a = angle_of(n - 2);
      next_a = angle_of(n - 1);
      prev_nl = samples_[n - 2].n_l;
      next_nl = samples_[n - 1].n_l;
      prev_nr = samples_[n - 2].n_r;
      next_nr = samples_[n - 1].n_r;
      ds = samples_[n - 1].s - samples_[n - 2].s;
    }
    euler_rate_[k] = (next_a - prev_a) / ds;
    nl_slope_[k] = (next_nl - prev_nl) / ds;
    nr_slope_[k] = (next_nr - prev_nr) / ds;
  }

  omega_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    omega_[k] = body_rates(euler_rate_[k].x(), euler_rate_[k].y(), euler_rate_[k].z(),
                           samples_[k].mu, samples_[k].phi);
  }

  omega_slope_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    Vec3 prev_o, next_o;
    double ds;
    if (k > 0 && k + 1 < n) {
      prev_o = omega_[k - 1];
      next_o = omega_[k + 1];
      ds = samples_[k + 1].s - samples_[k - 1].s;
    } else if (closed_) {
      prev_o = omega_[n - 2];
      next_o = omega_[1];
      ds = (s_f_ - samples_[n - 2].s) + samples_[1].s;
    } else if (k == 0) {
      prev_o = omega_[0];
      next_o = omega_[1];
      ds = samples_[1].s - samples_[0].s;
    } else {
      prev_o = omega_[n - 2];
      next_o = omega_[n - 1];
      ds = samples_[n - 1].s - samples_[n - 2].s;
    }
    omega_slope_[k] = (next_o - prev_o) / ds;
  }
}

double TrackGeometry::wrap_s(double s) const {
  if (!closed_) {
    if (s < 0.0 || s > s_f_)
      throw std::out_of_range("track: s=" + detail::fmt_double(s) + " outside open track [0, " +
                              detail::fmt_double(s_f_) + "]");
    return s;
  }
  double w = std::fmod(s, s_f_);
  if (w < 0.0) w += s_f_;
  return w;
}

std::size_t TrackGeometry::segment_index(double s) const {
  const std::size_t n = samples_.size();
  if (uniform_) {
    auto idx = static_cast<std::ptrdiff_t>(s / uniform_ds_);
    if (idx < 0) idx = 0;
    if (idx > static_cast<std::ptrdiff_t>(n - 2)) idx = static_cast<std::ptrdiff_t>(n - 2);
    // guard against rounding at segment edges
    while (idx > 0 && s < samples_[idx].s) --idx;
    while (idx < static_cast<std::ptrdiff_t>(n - 2) && s > samples_[idx + 1].s) ++idx;
    return static_cast<std::size_t>(idx);
  }
  auto it = std::upper_bound(samples_.begin(), samples_.end(), s,
                             [](double value, const TrackSample& sm) { return value < sm.s; });
  std::size_t idx = static_cast<std::size_t>(std::distance(samples_.begin(), it));
  if (idx == 0) return 0;
  if (idx >= n) return n - 2;
  return idx - 1;
}

RoadFrame TrackGeometry::frame_at(double s) const {
  double sw;
  if (closed_) {
    sw = wrap_s(s);
  } else {
    sw = std::clamp(s, 0.0, s_f_);
  }
  const std::size_t k = segment_index(sw);
  const TrackSample& a = samples_[k];
  const TrackSample& b = samples_[k + 1];
  const double alpha = (sw - a.s) / (b.s - a.s);

  RoadFrame f;
  f.theta = a.theta + alpha * (b.theta - a.theta);
  f.mu = a.mu + alpha * (b.mu - a.mu);
  f.phi = a.phi + alpha * (b.phi - a.phi);

  const Eigen::Matrix3d rot = rotation_zyx(f.theta, f.mu, f.phi);
  f.t_vec = rot.col(0);
  f.n_vec = rot.col(1);
  f.m_vec = rot.col(2);

  const Vec3 rate = euler_rate_[k] + alpha * (euler_rate_[k + 1] - euler_rate_[k]);
  f.omega = body_rates(rate.x(), rate.y(), rate.z(), f.mu, f.phi);
  f.omega_slope = omega_slope_[k] + alpha * (omega_slope_[k + 1] - omega_slope_[k]);
  return f;
}

Vec3 TrackGeometry::surface_point(double s, double n) const {
  double sw;
  if (closed_) {
    sw = wrap_s(s);
  } else {
    sw = std::clamp(s, 0.0, s_f_);
  }
  const std::size_t k = segment_index(sw);
  const TrackSample& a = samples_[k];
  const TrackSample& b = samples_[k + 1];
  const double alpha = (sw - a.s) / (b.s - a.s);
  const Vec3 c = a.position + alpha * (b.position - a.position);
  const double theta = a.theta + alpha * (b.theta - a.theta);
  const double mu = a.mu + alpha * (b.mu - a.mu);
  const double phi = a.phi + alpha * (b.phi - a.phi);
  return c + n * rotation_zyx(theta, mu, phi).col(1);
}

double TrackGeometry::n_left(double s) const {
  const double sw = closed_ ? wrap_s(s) : std::clamp(s, 0.0, s_f_);
  const std::size_t k = segment_index(sw);
  const TrackSample& a = samples_[k];
  const TrackSample& b = samples_[k + 1];
  const double alpha = (sw - a.s) / (b.s - a.s);
  return a.n_l + alpha * (b.n_l - a.n_l);
}

double TrackGeometry::n_right(double s) const {
  const double sw = closed_ ? wrap_s(s) : std::clamp(s, 0.0, s_f_);
  const std::size_t k = segment_index(sw);
  const TrackSample& a = samples_[k];
  const TrackSample& b = samples_[k + 1];
  const double alpha = (sw - a.s) / (b.s - a.s);
  return a.n_r + alpha * (b.n_r - a.n_r);
}

double TrackGeometry::n_left_slope(double s) const {
  const double sw = closed_ ? wrap_s(s) : std::clamp(s, 0.0, s_f_);
  const std::size_t k = segment_index(sw);
  const double alpha = (sw - samples_[k].s) / (samples_[k + 1].s - samples_[k].s);
  return nl_slope_[k] + alpha * (nl_slope_[k + 1] - nl_slope_[k]);
}

double TrackGeometry::n_right_slope(double s) const {
  const double sw = closed_ ? wrap_s(s) : std::clamp(s, 0.0, s_f_);
  const std::size_t k = segment_index(sw);
  const double alpha = (sw - samples_[k].s) / (samples_[k + 1].s - samples_[k].s);
  return nr_slope_[k] + alpha * (nr_slope_[k + 1] - nr_slope_[k]);
}

TrackGeometry TrackGeometry::load(const std::string& path) {
  const detail::CsvFile csv = detail::read_csv(path);
  const std::vector<std::string> expected = {"s", "x", "y", "z", "theta", "mu", "phi", "n_l", "n_r"};
  if (csv.header != expected)
    throw std::runtime_error(path + ": expected header s,x,y,z,theta,mu,phi,n_l,n_r");

  bool closed = false;
  for (const auto& [key, value] : csv.metadata) {
    if (key == "closed") closed = (value == "true" || value == "1");
  }

  std::vector<TrackSample> samples;
  samples.reserve(csv.rows.size());
  for (const auto& row : csv.rows) {
    if (row.fields.size() != 9)
      throw std::runtime_error(path + ":" + std::to_string(row.line_no) + ": expected 9 fields, got " +
                               std::to_string(row.fields.size()));
    TrackSample sm;
    sm.s = detail::parse_double(row.fields[0], path, row.line_no);
    sm.position = Vec3(detail::parse_double(row.fields[1], path, row.line_no),
                       detail::parse_double(row.fields[2], path, row.line_no),
                       detail::parse_double(row.fields[3], path, row.line_no));
    sm.theta = detail::parse_double(row.fields[4], path, row.line_no);
    sm.mu = detail::parse_double(row.fields[5], path, row.line_no);
    sm.phi = detail::parse_double(row.fields[6], path, row.line_no);
    sm.n_l = detail::parse_double(row.fields[7], path, row.line_no);
    sm.n_r = detail::parse_double(row.fields[8], path, row.line_no);
    samples.push_back(sm);
  }
  return from_samples(std::move(samples), closed);
}

void TrackGeometry::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "# closed=" << (closed_ ? "true" : "false") << "\n";
  out << "s,x,y,z,theta,mu,phi,n_l,n_r\n";
  for (const auto& sm : samples_) {
    out << detail::fmt_double(sm.s) << ',' << detail::fmt_double(sm.position.x()) << ','
        << detail::fmt_double(sm.position.y()) << ',' << detail::fmt_double(sm.position.z()) << ','
        << detail::fmt_double(sm.theta) << ',' << detail::fmt_double(sm.mu) << ','
        << detail::fmt_double(sm.phi) << ',' << detail::fmt_double(sm.n_l) << ','
        << detail::fmt_double(sm.n_r) << '\n';
  }
}

}  // namespace raceplan

#include "raceplan/track_presets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace raceplan {

namespace {

constexpr double kPi = std::numbers::pi;

double smoothstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

}  // namespace

TrackGeometry make_straight(double length, double width, double ds) {
  if (length <= 0.0 || width <= 0.0 || ds <= 0.0)
    throw std::invalid_argument("make_straight: parameters must be positive");
  const std::size_t K = static_cast<std::size_t>(std::max(3.0, std::round(length / ds)));
  const double step = length / static_cast<double>(K);
  std::vector<TrackSample> samples;
  samples.reserve(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    TrackSample sm;
    sm.s = step * static_cast<double>(k);
    sm.position = Vec3(sm.s, 0.0, 0.0);
    sm.n_l = width / 2.0;
    sm.n_r = -width / 2.0;
    samples.push_back(sm);
  }
  return TrackGeometry::from_samples(std::move(samples), false);
}

TrackGeometry make_flat_circle(double radius, double width, double ds) {
  if (radius <= 0.0 || width <= 0.0 || ds <= 0.0)
    throw std::invalid_argument("make_flat_circle: parameters must be positive");
  const double s_f = 2.0 * kPi * radius;
  const std::size_t K = static_cast<std::size_t>(std::max(8.0, std::round(s_f / ds)));
  const double step = s_f / static_cast<double>(K);
  std::vector<TrackSample> samples;
  samples.reserve(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    TrackSample sm;
    sm.s = step * static_cast<double>(k);
    const double theta = sm.s / radius;
    sm.theta = theta;
    sm.position = Vec3(radius * std::sin(theta), radius * (1.0 - std::cos(theta)), 0.0);
    sm.n_l = width / 2.0;
    sm.n_r = -width / 2.0;
    samples.push_back(sm);
  }
  samples.back().position = samples.front().position;  // analytic closure
  return TrackGeometry::from_samples(std::move(samples), true);
}

TrackGeometry make_oval_banked(const OvalParams& params) {
  const double R = params.turn_radius;
  const double Lt = params.transition_length;
  const double Ls = params.straight_length;
  if (R <= 0.0 || Lt <= 0.0 || Ls <= 0.0 || params.width <= 0.0 || params.ds <= 0.0)
    throw std::invalid_argument("make_oval_banked: parameters must be positive");
  const double La = kPi * R - Lt;
  if (La <= 0.0) throw std::invalid_argument("make_oval_banked: transition too long for the radius");
  const double phi_max = params.banking_deg * kPi / 180.0;
  if (phi_max < 0.0 || phi_max >= kPi / 2.0)
    throw std::invalid_argument("make_oval_banked: banking out of range");

  // one turn block: ramp-in Lt, arc La, ramp-out Lt; turn angle (La+Lt)/R = pi
  const double block = 2.0 * Lt + La;
  const double s_f = 2.0 * (Ls + block);

  auto curvature_factor = [&](double s) {
    // normalized curvature profile in [0, 1]; the layout repeats every
    // straight+turn block
    while (s >= Ls + block) s -= Ls + block;
    if (s < Ls) return 0.0;
    s -= Ls;
    if (s < Lt) return smoothstep(s / Lt);
    s -= Lt;
    if (s < La) return 1.0;
    s -= La;
    if (s < Lt) return smoothstep(1.0 - s / Lt);
    return 0.0;
  };

  const std::size_t K = static_cast<std::size_t>(std::max(16.0, std::round(s_f / params.ds)));
  const double step = s_f / static_cast<double>(K);

  std::vector<TrackSample> samples;
  samples.reserve(K + 1);

  // RK4 on (x, y, theta) along s
  double x = 0.0, y = 0.0, theta = 0.0;
  const int substeps = 8;
  const double h = step / static_cast<double>(substeps);
  for (std::size_t k = 0; k <= K; ++k) {
    const double s = step * static_cast<double>(k);
    TrackSample sm;
    sm.s = s;
    sm.position = Vec3(x, y, 0.0);
    sm.theta = theta;
    sm.phi = -phi_max * curvature_factor(s);
    sm.n_l = params.width / 2.0;
    sm.n_r = -params.width / 2.0;
    samples.push_back(sm);
    if (k == K) break;
    for (int i = 0; i < substeps; ++i) {
      const double s0 = s + h * static_cast<double>(i);
      auto deriv = [&](double si, double th) {
        return Vec3(std::cos(th), std::sin(th), curvature_factor(si) / R);
      };
      const Vec3 k1 = deriv(s0, theta);
      const Vec3 k2 = deriv(s0 + h / 2, theta + h / 2 * k1.z());
      const Vec3 k3 = deriv(s0 + h / 2, theta + h / 2 * k2.z());
      const Vec3 k4 = deriv(s0 + h, theta + h * k3.z());
      x += h / 6.0 * (k1.x() + 2 * k2.x() + 2 * k3.x() + k4.x());
      y += h / 6.0 * (k1.y() + 2 * k2.y() + 2 * k3.y() + k4.y());
      theta += h / 6.0 * (k1.z() + 2 * k2.z() + 2 * k3.z() + k4.z());
    }
  }
  return TrackGeometry::from_samples(std::move(samples), true);
}

TrackGeometry make_complex_synthetic(const ComplexParams& params) {
  if (params.scale <= 0.0 || params.width <= 0.0 || params.ds <= 0.0)
    throw std::invalid_argument("make_complex_synthetic: parameters must be positive");
  const double phi_max = params.banking_deg * kPi / 180.0;
  const double mu_cap = params.slope_max_deg * kPi / 180.0;
  if (phi_max < 0.0 || phi_max >= kPi / 2.0 || mu_cap <= 0.0 || mu_cap >= kPi / 2.0)
    throw std::invalid_argument("make_complex_synthetic: angles out of range");

  // Half-course segment plan; the second half repeats it rotated by 180
  // degrees, which closes the loop exactly. Net heading change +180 deg.
  struct Segment {
    double straight;   // [m] before the corner
    double radius;     // [m]
    double angle_deg;  // signed corner angle
  };
  const std::vector<Segment> half_plan = {
      {190.0, 42.0, 100.0}, {70.0, 90.0, -45.0},  {45.0, 36.0, 95.0},
      {40.0, 60.0, -40.0},  {105.0, 150.0, 70.0},
  };
  const double ramp = 25.0;  // curvature transition length [m]

  // curvature profile of one half as (start_s, length, kappa or ramp)
  struct Piece {
    double start, length, kappa;
    int kind;  // 0 straight, 1 ramp-in, 2 arc, 3 ramp-out
  };
  std::vector<Piece> pieces;
  double cursor = 0.0;
  for (const auto& seg : half_plan) {
    const double angle = seg.angle_deg * kPi / 180.0;
    const double radius = seg.radius * params.scale;
    const double kappa = (angle >= 0.0 ? 1.0 : -1.0) / radius;
    const double arc = std::abs(angle) * radius - ramp;
    if (arc <= 0.0) throw std::invalid_argument("make_complex_synthetic: corner too short");
    pieces.push_back({cursor, seg.straight * params.scale, 0.0, 0});
    cursor += seg.straight * params.scale;
    pieces.push_back({cursor, ramp, kappa, 1});
    cursor += ramp;
    pieces.push_back({cursor, arc, kappa, 2});
    cursor += arc;
    pieces.push_back({cursor, ramp, kappa, 3});
    cursor += ramp;
  }
  const double half_len = cursor;
  const double s_f_nominal = 2.0 * half_len;

  auto curvature = [&](double s) {
    while (s >= half_len) s -= half_len;
    for (const auto& piece : pieces) {
      if (s < piece.start || s >= piece.start + piece.length) continue;
      const double u = (s - piece.start) / piece.length;
      switch (piece.kind) {
        case 0: return 0.0;
        case 1: return piece.kappa * smoothstep(u);
        case 2: return piece.kappa;
        default: return piece.kappa * smoothstep(1.0 - u);
      }
    }
    return 0.0;
  };

  // elevation: two full waves per half so the seam stays smooth
  double z_amp = params.elevation;
  auto height = [&](double s) {
    while (s >= half_len) s -= half_len;
    return z_amp * (std::sin(4.0 * kPi * s / half_len) +
                    0.45 * std::sin(8.0 * kPi * s / half_len + 0.7));
  };
  auto height_slope = [&](double s) {
    while (s >= half_len) s -= half_len;
    return z_amp * (4.0 * kPi / half_len * std::cos(4.0 * kPi * s / half_len) +
                    0.45 * 8.0 * kPi / half_len * std::cos(8.0 * kPi * s / half_len + 0.7));
  };
  {
    double worst = 0.0;
    for (int i = 0; i < 4096; ++i) {
      worst = std::max(worst, std::abs(height_slope(half_len * i / 4096.0) / z_amp));
    }
    const double allowed = std::sin(0.95 * mu_cap) / worst;  // dz/ds = -sin(mu)
    if (z_amp > allowed) z_amp = allowed;
  }

  const std::size_t K =
      static_cast<std::size_t>(std::max(32.0, std::round(s_f_nominal / params.ds)));
  const double step = s_f_nominal / static_cast<double>(K);

  std::vector<TrackSample> samples;
  samples.reserve(K + 1);
  constexpr double kappa_ref = 1.0 / 60.0;  // corners at or below R=60 get full banking

  // integrate the plan; mu comes from the height profile, so the plan
  // advances with cos(mu)
  double x = 0.0, y = 0.0, theta = 0.0;
  const int substeps = 8;
  const double h = step / static_cast<double>(substeps);
  for (std::size_t k = 0; k <= K; ++k) {
    const double s = step * static_cast<double>(k);
    const double kappa = curvature(s);
    TrackSample sm;
    sm.s = s;
    const double zs = height_slope(s);
    const double mu = -std::asin(std::clamp(zs, -0.99, 0.99));
    sm.position = Vec3(x, y, height(s));
    sm.theta = theta;
    sm.mu = mu;
    sm.phi = -phi_max * std::tanh(kappa / kappa_ref);
    sm.n_l = params.width / 2.0;
    sm.n_r = -params.width / 2.0;
    samples.push_back(sm);
    if (k == K) break;
    for (int i = 0; i < substeps; ++i) {
      const double s0 = s + h * static_cast<double>(i);
      auto deriv = [&](double si, double th) {
        const double cm = std::cos(-std::asin(std::clamp(height_slope(si), -0.99, 0.99)));
        return Vec3(std::cos(th) * cm, std::sin(th) * cm, curvature(si));
      };
      const Vec3 k1 = deriv(s0, theta);
      const Vec3 k2 = deriv(s0 + h / 2, theta + h / 2 * k1.z());
      const Vec3 k3 = deriv(s0 + h / 2, theta + h / 2 * k2.z());
      const Vec3 k4 = deriv(s0 + h, theta + h * k3.z());
      x += h / 6.0 * (k1.x() + 2 * k2.x() + 2 * k3.x() + k4.x());
      y += h / 6.0 * (k1.y() + 2 * k2.y() + 2 * k3.y() + k4.y());
      theta += h / 6.0 * (k1.z() + 2 * k2.z() + 2 * k3.z() + k4.z());
    }
  }
  samples.back().position = samples.front().position;
  samples.back().mu = samples.front().mu;
  samples.back().phi = samples.front().phi;
  return TrackGeometry::from_samples(std::move(samples), true);
}

}  // namespace raceplan

#include "raceplan/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "csv_util.hpp"

namespace raceplan {

namespace {
constexpr double kSpeedEps = 1e-9;
}

double FeasibilityReport::worst_slack() const {
  return std::min({worst_bounds_slack, worst_curvature_slack, worst_dynamics_slack});
}

LonCurve LonCurve::jerk_optimal(const VehicleState& state, const LongitudinalSample& sample,
                                double T) {
  LonCurve c;
  c.mode_ = GenMode::jerk_optimal;
  c.poly_ = Poly4::connect({state.s, state.s_dot, state.s_ddot},
                           {sample.s_dot_e, sample.s_ddot_e}, T);
  c.racing_line_sample_ = sample.is_racing_line;
  return c;
}

LonCurve LonCurve::relative(const VehicleState& state, const LongitudinalSample& sample,
                            std::shared_ptr<const RacingLine> rl, double T) {
  if (T > rl->horizon() + 1e-9)
    throw std::runtime_error("trajectory: horizon T exceeds the racing line horizon");
  const RacingLinePoint rl0 = rl->state_at(0.0);
  const RacingLinePoint rlT = rl->state_at(T);
  LonCurve c;
  c.mode_ = GenMode::relative;
  c.rl_ = std::move(rl);
  c.poly_ = Poly4::connect(
      {state.s - rl0.s, state.s_dot - rl0.s_dot, state.s_ddot - rl0.s_ddot},
      {sample.s_dot_e - rlT.s_dot, sample.s_ddot_e - rlT.s_ddot}, T);
  c.racing_line_sample_ = sample.is_racing_line;
  return c;
}

LonState LonCurve::eval(double t) const {
  LonState out{poly_.pos(t), poly_.vel(t), poly_.acc(t)};
  if (mode_ == GenMode::relative) {
    const RacingLinePoint rl = rl_->state_at(t);
    out.s += rl.s;
    out.s_dot += rl.s_dot;
    out.s_ddot += rl.s_ddot;
  }
  return out;
}

LatCurve LatCurve::jerk_optimal(const VehicleState& state, const LateralSample& sample, double T) {
  LatCurve c;
  c.mode_ = GenMode::jerk_optimal;
  c.poly_ = Poly5::connect({state.n, state.n_dot, state.n_ddot},
                           {sample.n_e, sample.n_dot_e, sample.n_ddot_e}, T);
  c.racing_line_sample_ = sample.is_racing_line;
  return c;
}

LatCurve LatCurve::relative(const VehicleState& state, const LateralSample& sample,
                            std::shared_ptr<const LonCurve> lon,
                            std::shared_ptr<const RacingLine> rl, double T) {
  const LatState rl_start = reparam_lateral(*rl, lon->eval(0.0));
  const LatState rl_end = reparam_lateral(*rl, lon->eval(T));
  LatCurve c;
  c.mode_ = GenMode::relative;
  c.lon_ = std::move(lon);
  c.rl_ = std::move(rl);
  c.poly_ = Poly5::connect(
      {state.n - rl_start.n, state.n_dot - rl_start.n_dot, state.n_ddot - rl_start.n_ddot},
      {sample.n_e - rl_end.n, sample.n_dot_e - rl_end.n_dot, sample.n_ddot_e - rl_end.n_ddot}, T);
  c.racing_line_sample_ = sample.is_racing_line;
  return c;
}

LatState LatCurve::eval(double t) const {
  LatState out{poly_.pos(t), poly_.vel(t), poly_.acc(t)};
  if (mode_ == GenMode::relative) {
    const LatState rl = reparam_lateral(*rl_, lon_->eval(t));
    out.n += rl.n;
    out.n_dot += rl.n_dot;
    out.n_ddot += rl.n_ddot;
  }
  return out;
}

std::vector<TrajectoryCandidate> generate_candidates(const VehicleState& state,
                                                     std::shared_ptr<const RacingLine> rl,
                                                     const std::vector<LongitudinalSample>& lon_samples,
                                                     double T, double s0_thr,
                                                     const TrackGeometry& track, int n_n, double d_w,
                                                     int n_points, bool relative_mode) {
  if (n_points < 2) throw std::invalid_argument("trajectory: n_points must be >= 2");
  if (T > rl->horizon() + 1e-9)
    throw std::runtime_error("trajectory: horizon T exceeds the racing line horizon");

  const RacingLinePoint rl0 = rl->state_at(0.0);
  const bool lon_relative =
      relative_mode && std::abs(state.s_dot - rl0.s_dot) / rl0.s_dot <= s0_thr;

  std::vector<TrajectoryCandidate> candidates;
  candidates.reserve(lon_samples.size() * static_cast<std::size_t>(n_n + 1) * 2);

  const double dt = T / static_cast<double>(n_points - 1);
  int index = 0;
  for (const auto& lon_sample : lon_samples) {
    auto lon = std::make_shared<LonCurve>(lon_relative
                                              ? LonCurve::relative(state, lon_sample, rl, T)
                                              : LonCurve::jerk_optimal(state, lon_sample, T));

    // probe the curve before building lateral variants
    bool lon_valid = true;
    std::string lon_reason;
    std::vector<LonState> lon_states(static_cast<std::size_t>(n_points));
    for (int k = 0; k < n_points; ++k) {
      lon_states[static_cast<std::size_t>(k)] = lon->eval(dt * static_cast<double>(k));
      if (lon_states[static_cast<std::size_t>(k)].s_dot < 0.0) {
        lon_valid = false;
        lon_reason = "negative longitudinal velocity";
        break;
      }
    }
    if (lon_valid && (lon_states.back().s < rl->s_start() - 1e-9 ||
                      lon_states.back().s > rl->s_end() + 1e-9)) {
      lon_valid = false;
      lon_reason = "end position outside the racing line range";
    }

    if (!lon_valid) {
      TrajectoryCandidate c;
      c.index = index++;
      c.lon = lon;
      c.kinematically_valid = false;
      c.invalid_reason = lon_reason;
      candidates.push_back(std::move(c));
      continue;
    }

    const double s_end = lon_states.back().s;
    const double s_dot_end = lon_states.back().s_dot;
    const LatState rl_end = reparam_lateral(*rl, lon_states.back());
    const std::vector<LateralSample> lat_samples =
        sample_lateral(track, s_end, s_dot_end, rl_end, n_n, d_w);

    for (const auto& lat_sample : lat_samples) {
      const int variants = relative_mode ? 2 : 1;
      for (int variant = 0; variant < variants; ++variant) {
        TrajectoryCandidate c;
        c.index = index++;
        c.lon = lon;
        if (variant == 0) {
          c.lat = std::make_shared<LatCurve>(LatCurve::jerk_optimal(state, lat_sample, T));
        } else {
          c.lat = std::make_shared<LatCurve>(LatCurve::relative(state, lat_sample, lon, rl, T));
        }
        c.is_racing_line_candidate = lon->mode() == GenMode::relative &&
                                     lon->tracks_racing_line_sample() &&
                                     c.lat->mode() == GenMode::relative &&
                                     lat_sample.is_racing_line;
        c.points.resize(static_cast<std::size_t>(n_points));
        for (int k = 0; k < n_points; ++k) {
          const double t = dt * static_cast<double>(k);
          TrajectoryPoint& pt = c.points[static_cast<std::size_t>(k)];
          const LonState& ls = lon_states[static_cast<std::size_t>(k)];
          const LatState lat = c.lat->eval(t);
          pt.t = t;
          pt.s = ls.s;
          pt.s_dot = ls.s_dot;
          pt.s_ddot = ls.s_ddot;
          pt.n = lat.n;
          pt.n_dot = lat.n_dot;
          pt.n_ddot = lat.n_ddot;
        }
        candidates.push_back(std::move(c));
      }
    }
  }
  return candidates;
}

TrajectoryPoint transform_state(const TrackGeometry& track, double t, const LonState& lon,
                                const LatState& lat) {
  const RoadFrame f = track.frame_at(lon.s);
  TrajectoryPoint pt;
  pt.t = t;
  pt.s = lon.s;
  pt.s_dot = lon.s_dot;
  pt.s_ddot = lon.s_ddot;
  pt.n = lat.n;
  pt.n_dot = lat.n_dot;
  pt.n_ddot = lat.n_ddot;

  const double u_factor = 1.0 - lat.n * f.omega.z();
  if (u_factor <= 0.0)
    throw std::runtime_error("transform: point beyond the instantaneous curvature center");

  // road-frame velocity components
  const double u = lon.s_dot * u_factor;
  const double q = lat.n_dot;
  pt.w = lat.n * f.omega.x() * lon.s_dot;
  pt.omega_x = f.omega.x() * lon.s_dot;
  pt.v = std::hypot(u, q);

  const Vec3 p = track.surface_point(lon.s, lat.n);
  pt.x = p.x();
  pt.y = p.y();
  pt.z = p.z();

  if (pt.v < kSpeedEps) {
    if (std::abs(q) > kSpeedEps)
      throw std::runtime_error("transform: singular heading at standstill");
    pt.chi_hat = 0.0;
  } else {
    pt.chi_hat = std::atan2(q, u);
  }

  // time derivatives of the road-frame velocity, including frame rotation
  const double u_dot = lon.s_ddot * u_factor -
                       lon.s_dot * (lat.n_dot * f.omega.z() +
                                    lat.n * f.omega_slope.z() * lon.s_dot);
  const double q_dot = lat.n_ddot;
  const Vec3 omega_t = f.omega * lon.s_dot;  // frame rotation rate in time
  const double a_t = u_dot + omega_t.y() * pt.w - omega_t.z() * q;
  const double a_n = q_dot + omega_t.z() * u - omega_t.x() * pt.w;

  const double cc = std::cos(pt.chi_hat), sc = std::sin(pt.chi_hat);
  pt.ax_hat = a_t * cc + a_n * sc;
  pt.ay_hat = -a_t * sc + a_n * cc;

  if (pt.v < kSpeedEps) {
    pt.kappa_hat = 0.0;
  } else {
    const double chi_dot = (q_dot * u - u_dot * q) / (pt.v * pt.v);
    pt.kappa_hat = (chi_dot + f.omega.z() * lon.s_dot) / pt.v;
  }
  return pt;
}

void attach_apparent_accels(const TrackGeometry& track, std::vector<TrajectoryPoint>& points) {
  const std::size_t n = points.size();
  for (std::size_t k = 0; k < n; ++k) {
    double omega_x_dot;
    if (n < 2) {
      omega_x_dot = 0.0;
    } else if (k == 0) {
      omega_x_dot = (points[1].omega_x - points[0].omega_x) / (points[1].t - points[0].t);
    } else if (k + 1 == n) {
      omega_x_dot = (points[k].omega_x - points[k - 1].omega_x) / (points[k].t - points[k - 1].t);
    } else {
      omega_x_dot =
          (points[k + 1].omega_x - points[k - 1].omega_x) / (points[k + 1].t - points[k - 1].t);
    }
    const double w_dot = points[k].n_dot * points[k].omega_x + points[k].n * omega_x_dot;
    const RoadFrame f = track.frame_at(points[k].s);
    const ApparentAccel a = apparent_accels(points[k].ax_hat, points[k].ay_hat, points[k].v,
                                            points[k].chi_hat, f, points[k].s_dot, w_dot);
    points[k].ax_tilde = a.ax_tilde;
    points[k].ay_tilde = a.ay_tilde;
    points[k].g_tilde = a.g_tilde;
  }
}

void to_cartesian(TrajectoryCandidate& candidate, const TrackGeometry& track) {
  if (!candidate.kinematically_valid) return;
  try {
    for (auto& pt : candidate.points) {
      const LonState lon{pt.s, pt.s_dot, pt.s_ddot};
      const LatState lat{pt.n, pt.n_dot, pt.n_ddot};
      pt = transform_state(track, pt.t, lon, lat);
    }
    attach_apparent_accels(track, candidate.points);
  } catch (const std::exception& e) {
    candidate.kinematically_valid = false;
    candidate.invalid_reason = e.what();
  }
}

void write_candidate_csv(const TrajectoryCandidate& candidate, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "t,s,s_dot,s_ddot,n,n_dot,n_ddot,x,y,z,v,chi_hat,ax_hat,ay_hat,kappa_hat,"
         "ax_tilde,ay_tilde,g_tilde\n";
  for (const auto& p : candidate.points) {
    out << detail::fmt_double(p.t) << ',' << detail::fmt_double(p.s) << ','
        << detail::fmt_double(p.s_dot) << ',' << detail::fmt_double(p.s_ddot) << ','
        << detail::fmt_double(p.n) << ',' << detail::fmt_double(p.n_dot) << ','
        << detail::fmt_double(p.n_ddot) << ',' << detail::fmt_double(p.x) << ','
        << detail::fmt_double(p.y) << ',' << detail::fmt_double(p.z) << ','
        << detail::fmt_double(p.v) << ',' << detail::fmt_double(p.chi_hat) << ','
        << detail::fmt_double(p.ax_hat) << ',' << detail::fmt_double(p.ay_hat) << ','
        << detail::fmt_double(p.kappa_hat) << ',' << detail::fmt_double(p.ax_tilde) << ','
        << detail::fmt_double(p.ay_tilde) << ',' << detail::fmt_double(p.g_tilde) << '\n';
  }
}

}  // namespace raceplan

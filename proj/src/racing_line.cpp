#include "raceplan/racing_line.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "csv_util.hpp"
#include "raceplan/polynomial.hpp"
#include "raceplan/trajectory.hpp"

namespace raceplan {

namespace {

constexpr double kMinSpeed = 1e-6;  // [m/s]

double path_slope(const LateralPathFn& path, double s) {
  const double h = 0.5;
  return (path(s + h) - path(s - h)) / (2.0 * h);
}

double path_curv(const LateralPathFn& path, double s) {
  const double h = 0.5;
  return (path(s + h) - 2.0 * path(s) + path(s - h)) / (h * h);
}

struct ProfilePoint {
  double s = 0.0;      // reference-line arc length (may be unwrapped)
  double n = 0.0;      // path offset
  double np = 0.0;     // dn/ds
  double npp = 0.0;    // d2n/ds2
  double J = 1.0;      // in-plane speed factor, v = J * s_dot
  double chi = 0.0;    // heading within the road frame
  double kappa = 0.0;  // in-plane path curvature
  double g_lat = 0.0;  // lateral gravity term
  double g_lon = 0.0;  // longitudinal gravity term
  double g_base = 0.0; // g * c_mu * c_phi
  double G2 = 0.0;     // g_tilde = g_base + G2 * v^2
  double dsig = 0.0;   // path arc length to the next grid point
};

double g_tilde_at(const ProfilePoint& pt, double v) { return pt.g_base + pt.G2 * v * v; }

double lateral_demand(const ProfilePoint& pt, double v) { return v * v * pt.kappa + pt.g_lat; }

// Remaining |ax| budget of the diamond at the local lateral demand.
double combined_bracket(const GgShape& shape, double ay_demand) {
  const double ratio = std::min(1.0, std::abs(ay_demand) / shape.ay_max);
  return std::pow(1.0 - std::pow(ratio, shape.p), 1.0 / shape.p);
}

class EnvelopeEval {
 public:
  EnvelopeEval(const GgLookup& gg, const RacingLineMargins& margins)
      : gg_(gg), margins_(margins) {}

  GgShape shape(const ProfilePoint& pt, double v) const {
    return scale_for_racing_line(gg_.query(v, g_tilde_at(pt, v)), margins_.a_mgn,
                                 margins_.a_abs_mgn);
  }

  bool lateral_ok(const ProfilePoint& pt, double v) const {
    return std::abs(lateral_demand(pt, v)) <= shape(pt, v).ay_max;
  }

  // signed available path acceleration (apparent budget minus gravity term)
  double max_accel(const ProfilePoint& pt, double v) const {
    const GgShape sh = shape(pt, v);
    const double bracket = combined_bracket(sh, lateral_demand(pt, v));
    return std::min(sh.ax_max, std::abs(sh.ax_min) * bracket) - pt.g_lon;
  }

  // available deceleration magnitude along the path, >= 0
  double max_decel(const ProfilePoint& pt, double v) const {
    const GgShape sh = shape(pt, v);
    const double bracket = combined_bracket(sh, lateral_demand(pt, v));
    return std::max(0.0, std::abs(sh.ax_min) * bracket + pt.g_lon);
  }

  double v_cap() const { return gg_.v_max(); }

 private:
  const GgLookup& gg_;
  const RacingLineMargins& margins_;
};

double bisect_speed_limit(const EnvelopeEval& env, const ProfilePoint& pt) {
  const double v_cap = env.v_cap();
  if (!env.lateral_ok(pt, 0.0)) {
    throw std::runtime_error("racing line: path infeasible near s=" + detail::fmt_double(pt.s) +
                             " (lateral demand exceeds envelope at standstill)");
  }
  if (env.lateral_ok(pt, v_cap)) return v_cap;
  double lo = 0.0, hi = v_cap;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (env.lateral_ok(pt, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

// One forward step: bound on the next speed after accelerating over dsig.
double forward_bound(const EnvelopeEval& env, const ProfilePoint& pt, double v_entry) {
  double acc = env.max_accel(pt, v_entry);
  double bound = std::sqrt(std::max(0.0, v_entry * v_entry + 2.0 * acc * pt.dsig));
  // refine once with the mid-segment speed
  acc = env.max_accel(pt, 0.5 * (v_entry + bound));
  bound = std::sqrt(std::max(0.0, v_entry * v_entry + 2.0 * acc * pt.dsig));
  return bound;
}

// One backward step: bound on the entry speed that can still brake to v_exit.
double backward_bound(const EnvelopeEval& env, const ProfilePoint& pt, double v_exit) {
  double dec = env.max_decel(pt, v_exit);
  double bound = std::sqrt(v_exit * v_exit + 2.0 * dec * pt.dsig);
  dec = env.max_decel(pt, 0.5 * (v_exit + bound));
  bound = std::sqrt(v_exit * v_exit + 2.0 * dec * pt.dsig);
  return bound;
}

// Shared conversion of a converged speed profile to racing line points.
// Closed profiles wrap the finite-difference stencils; open ones use
// one-sided differences at the ends.
std::vector<RacingLinePoint> profile_to_points(const std::vector<ProfilePoint>& pts,
                                               const std::vector<double>& v, bool closed,
                                               double track_length) {
  const std::size_t K = pts.size();
  std::vector<double> s_dot(K), t(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    if (v[k] < kMinSpeed)
      throw std::runtime_error("racing line: profile speed vanished near s=" +
                               detail::fmt_double(pts[k].s));
    s_dot[k] = v[k] / pts[k].J;
  }
  for (std::size_t k = 1; k < K; ++k) {
    t[k] = t[k - 1] + pts[k - 1].dsig * 2.0 / (v[k - 1] + v[k]);
  }

  auto ds_dot_ds = [&](std::size_t k) {
    if (k > 0 && k + 1 < K) {
      return (s_dot[k + 1] - s_dot[k - 1]) / (pts[k + 1].s - pts[k - 1].s);
    }
    if (closed) {
      // endpoints touch across the lap seam
      const double ds = (track_length - pts[K - 2].s) + pts[1].s - pts[0].s;
      return (s_dot[1] - s_dot[K - 2]) / ds;
    }
    if (k == 0) return (s_dot[1] - s_dot[0]) / (pts[1].s - pts[0].s);
    return (s_dot[K - 1] - s_dot[K - 2]) / (pts[K - 1].s - pts[K - 2].s);
  };

  std::vector<RacingLinePoint> out(K);
  for (std::size_t k = 0; k < K; ++k) {
    RacingLinePoint p;
    p.t = t[k];
    p.s = pts[k].s;
    p.s_dot = s_dot[k];
    p.s_ddot = s_dot[k] * ds_dot_ds(k);
    p.n = pts[k].n;
    p.n_dot = pts[k].np * s_dot[k];
    p.n_ddot = pts[k].npp * s_dot[k] * s_dot[k] + pts[k].np * p.s_ddot;
    out[k] = p;
  }
  return out;
}

// Geometry terms at one grid point given the path offset and s-derivatives.
ProfilePoint make_profile_point(const TrackGeometry& track, double s_unwrapped, double n, double np,
                                double npp) {
  const RoadFrame f = track.frame_at(s_unwrapped);
  ProfilePoint pt;
  pt.s = s_unwrapped;
  pt.n = n;
  pt.np = np;
  pt.npp = npp;
  const double u_factor = 1.0 - n * f.omega.z();
  if (u_factor <= 0.0)
    throw std::runtime_error("racing line: path beyond curvature center at s=" +
                             detail::fmt_double(s_unwrapped));
  pt.J = std::hypot(u_factor, np);
  pt.chi = std::atan2(np, u_factor);
  const double sm = std::sin(f.mu), cm = std::cos(f.mu);
  const double sp = std::sin(f.phi), cp = std::cos(f.phi);
  const double sc = std::sin(pt.chi), cc = std::cos(pt.chi);
  pt.g_lat = kGravity * (sm * sc + cm * sp * cc);
  pt.g_lon = kGravity * (cm * sp * sc - sm * cc);
  pt.g_base = kGravity * cm * cp;
  pt.G2 = (np * f.omega.x() + n * f.omega_slope.x()) / (pt.J * pt.J) -
          (f.omega.y() * cc - f.omega.x() * sc) / pt.J;
  return pt;
}

// In-plane curvature from the heading change along the grid.
void fill_curvature(std::vector<ProfilePoint>& pts, const TrackGeometry& track, bool closed) {
  const std::size_t K = pts.size();
  auto omega_z = [&](std::size_t k) { return track.frame_at(pts[k].s).omega.z(); };
  for (std::size_t k = 0; k < K; ++k) {
    double chi_slope;
    if (k > 0 && k + 1 < K) {
      chi_slope = (pts[k + 1].chi - pts[k - 1].chi) / (pts[k + 1].s - pts[k - 1].s);
    } else if (closed) {
      const double ds = (pts[K - 1].s - pts[K - 2].s) + (pts[1].s - pts[0].s);
      chi_slope = (pts[1].chi - pts[K - 2].chi) / ds;
    } else if (k == 0) {
      chi_slope = (pts[1].chi - pts[0].chi) / (pts[1].s - pts[0].s);
    } else {
      chi_slope = (pts[K - 1].chi - pts[K - 2].chi) / (pts[K - 1].s - pts[K - 2].s);
    }
    pts[k].kappa = (chi_slope + omega_z(k)) / pts[k].J;
  }
}

// The quasi-steady-state passes approximate the vertical and transient
// terms; this loop re-checks the converged profile through the exact
// transform against the margin-scaled envelope and shaves speed locally
// until every point passes (the planner relies on that property).
template <typename RunPasses>
void relax_profile_to_checks(const TrackGeometry& track, const GgLookup& gg,
                             const RacingLineMargins& margins,
                             const std::vector<ProfilePoint>& base_pts, std::vector<double>& v,
                             const std::vector<double>& v_lim, bool closed, double track_length,
                             const RunPasses& run_passes, int max_rounds) {
  const std::size_t K = base_pts.size();
  std::vector<double> caps = v_lim;
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<ProfilePoint> pts = base_pts;
    std::vector<double> vv = v;
    if (closed) {
      pts.push_back(base_pts[0]);
      pts.back().s = track_length;
      vv.push_back(v[0]);
    }
    const std::vector<RacingLinePoint> line = profile_to_points(pts, vv, closed, track_length);
    std::vector<TrajectoryPoint> tp(line.size());
    for (std::size_t k = 0; k < line.size(); ++k) {
      tp[k] = transform_state(track, line[k].t, {line[k].s, line[k].s_dot, line[k].s_ddot},
                              {line[k].n, line[k].n_dot, line[k].n_ddot});
    }
    attach_apparent_accels(track, tp);
    bool any = false;
    for (std::size_t k = 0; k < K; ++k) {
      const GgShape shape = scale_for_racing_line(gg.query(tp[k].v, tp[k].g_tilde),
                                                  margins.a_mgn, margins.a_abs_mgn);
      const AccelCheck check = check_accel(shape, {tp[k].ax_tilde, tp[k].ay_tilde, tp[k].g_tilde});
      if (!check.ok) {
        any = true;
        caps[k] = std::min(caps[k], v[k]) * 0.985;
        if (std::getenv("RACEPLAN_RELAX_DEBUG") != nullptr && round < 6) {
          const double sl = std::min({check.slack_drive, check.slack_lateral, check.slack_combined});
          std::fprintf(stderr, "RELAX round=%d k=%zu s=%.1f v=%.2f slack=%.3f sdd=%.2f ay=%.2f g=%.2f\n",
                       round, k, tp[k].s, tp[k].v, sl, tp[k].s_ddot, tp[k].ay_tilde, tp[k].g_tilde);
        }
      }
    }
    if (!any) return;
    // rebuild from the tightened caps so the passes shape a smooth profile
    // into the capped points instead of leaving local dips
    v = caps;
    run_passes(v);
  }
}

void validate_path_point(const TrackGeometry& track, const ProfilePoint& pt,
                         const RacingLineMargins& margins, const ProfilerConfig& config) {
  const double margin = margins.d_w / 2.0 + margins.d_s_rl;
  const double lo = track.n_right(pt.s) + margin;
  const double hi = track.n_left(pt.s) - margin;
  if (pt.n < lo - 1e-9 || pt.n > hi + 1e-9)
    throw std::runtime_error("racing line: path outside margined bounds at s=" +
                             detail::fmt_double(pt.s));
  if (std::abs(pt.kappa) > config.kappa_max)
    throw std::runtime_error("racing line: path curvature " + detail::fmt_double(pt.kappa) +
                             " exceeds limit at s=" + detail::fmt_double(pt.s));
}

}  // namespace

RacingLine::RacingLine(std::vector<RacingLinePoint> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw std::runtime_error("racing line: needs at least 2 points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].s_dot <= 0.0)
      throw std::runtime_error("racing line: s_dot must stay positive (index " + std::to_string(i) +
                               ")");
    if (i > 0) {
      if (points_[i].t <= points_[i - 1].t)
        throw std::runtime_error("racing line: t must be strictly increasing");
      if (points_[i].s <= points_[i - 1].s)
        throw std::runtime_error("racing line: s must be strictly increasing");
    }
  }
}

RacingLinePoint RacingLine::state_at(double t) const {
  const double t0 = points_.front().t;
  const double t1 = points_.back().t;
  if (t < t0 - 1e-12 || t > t1 + 1e-12)
    throw std::out_of_range("racing line: t=" + detail::fmt_double(t) + " outside [" +
                            detail::fmt_double(t0) + ", " + detail::fmt_double(t1) + "]");
  const double tc = std::clamp(t, t0, t1);
  auto it = std::upper_bound(points_.begin(), points_.end(), tc,
                             [](double value, const RacingLinePoint& p) { return value < p.t; });
  std::size_t idx = static_cast<std::size_t>(std::distance(points_.begin(), it));
  if (idx == 0) idx = 1;
  if (idx >= points_.size()) idx = points_.size() - 1;
  const RacingLinePoint& a = points_[idx - 1];
  const RacingLinePoint& b = points_[idx];
  const double alpha = (tc - a.t) / (b.t - a.t);
  RacingLinePoint p;
  p.t = tc;
  p.s = a.s + alpha * (b.s - a.s);
  p.s_dot = a.s_dot + alpha * (b.s_dot - a.s_dot);
  p.s_ddot = a.s_ddot + alpha * (b.s_ddot - a.s_ddot);
  p.n = a.n + alpha * (b.n - a.n);
  p.n_dot = a.n_dot + alpha * (b.n_dot - a.n_dot);
  p.n_ddot = a.n_ddot + alpha * (b.n_ddot - a.n_ddot);
  return p;
}

double RacingLine::time_at_s(double s) const {
  return state_at_s(s).t;
}

RacingLinePoint RacingLine::state_at_s(double s) const {
  const double s0 = points_.front().s;
  const double s1 = points_.back().s;
  const double tol = 1e-9 * std::max(1.0, std::abs(s1));
  if (s < s0 - tol || s > s1 + tol)
    throw std::out_of_range("racing line: s=" + detail::fmt_double(s) + " outside [" +
                            detail::fmt_double(s0) + ", " + detail::fmt_double(s1) + "]");
  const double sc = std::clamp(s, s0, s1);
  auto it = std::upper_bound(points_.begin(), points_.end(), sc,
                             [](double value, const RacingLinePoint& p) { return value < p.s; });
  std::size_t idx = static_cast<std::size_t>(std::distance(points_.begin(), it));
  if (idx == 0) idx = 1;
  if (idx >= points_.size()) idx = points_.size() - 1;
  const RacingLinePoint& a = points_[idx - 1];
  const RacingLinePoint& b = points_[idx];
  const double alpha = (sc - a.s) / (b.s - a.s);
  RacingLinePoint p;
  p.t = a.t + alpha * (b.t - a.t);
  p.s = sc;
  p.s_dot = a.s_dot + alpha * (b.s_dot - a.s_dot);
  p.s_ddot = a.s_ddot + alpha * (b.s_ddot - a.s_ddot);
  p.n = a.n + alpha * (b.n - a.n);
  p.n_dot = a.n_dot + alpha * (b.n_dot - a.n_dot);
  p.n_ddot = a.n_ddot + alpha * (b.n_ddot - a.n_ddot);
  return p;
}

RacingLine RacingLine::load(const std::string& path) {
  const detail::CsvFile csv = detail::read_csv(path);
  const std::vector<std::string> expected = {"t", "s", "s_dot", "s_ddot", "n", "n_dot", "n_ddot"};
  if (csv.header != expected)
    throw std::runtime_error(path + ": expected header t,s,s_dot,s_ddot,n,n_dot,n_ddot");
  std::vector<RacingLinePoint> pts;
  pts.reserve(csv.rows.size());
  for (const auto& row : csv.rows) {
    if (row.fields.size() != 7)
      throw std::runtime_error(path + ":" + std::to_string(row.line_no) + ": expected 7 fields");
    RacingLinePoint p;
    p.t = detail::parse_double(row.fields[0], path, row.line_no);
    p.s = detail::parse_double(row.fields[1], path, row.line_no);
    p.s_dot = detail::parse_double(row.fields[2], path, row.line_no);
    p.s_ddot = detail::parse_double(row.fields[3], path, row.line_no);
    p.n = detail::parse_double(row.fields[4], path, row.line_no);
    p.n_dot = detail::parse_double(row.fields[5], path, row.line_no);
    p.n_ddot = detail::parse_double(row.fields[6], path, row.line_no);
    pts.push_back(p);
  }
  return RacingLine(std::move(pts));
}

void RacingLine::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "t,s,s_dot,s_ddot,n,n_dot,n_ddot\n";
  for (const auto& p : points_) {
    out << detail::fmt_double(p.t) << ',' << detail::fmt_double(p.s) << ','
        << detail::fmt_double(p.s_dot) << ',' << detail::fmt_double(p.s_ddot) << ','
        << detail::fmt_double(p.n) << ',' << detail::fmt_double(p.n_dot) << ','
        << detail::fmt_double(p.n_ddot) << '\n';
  }
}

LatState reparam_lateral(const RacingLine& rl, const LonState& lon) {
  const RacingLinePoint at = rl.state_at_s(lon.s);
  LatState out;
  out.n = at.n;
  const double ratio = at.n_dot / at.s_dot;
  out.n_dot = ratio * lon.s_dot;
  out.n_ddot = (at.n_ddot / (at.s_dot * at.s_dot) -
                at.n_dot * at.s_ddot / (at.s_dot * at.s_dot * at.s_dot)) *
                   lon.s_dot * lon.s_dot +
               ratio * lon.s_ddot;
  return out;
}

LateralPathFn centerline_path(const TrackGeometry& track) {
  return [&track](double s) { return 0.5 * (track.n_left(s) + track.n_right(s)); };
}

LateralPathFn corner_cut_path(const TrackGeometry& track, double gain, double smooth_len,
                              double margin) {
  if (!track.closed()) throw std::runtime_error("corner_cut_path: requires a closed track");
  const double ds = 2.0;
  const std::size_t K = static_cast<std::size_t>(std::max(8.0, std::round(track.length() / ds)));
  const double step = track.length() / static_cast<double>(K);

  auto values = std::make_shared<std::vector<double>>(K);
  std::vector<double> kappa(K);
  for (std::size_t k = 0; k < K; ++k) {
    kappa[k] = track.frame_at(static_cast<double>(k) * step).omega.z();
  }
  // circular box filter, applied three times for a smooth bump shape
  const int w = std::max(1, static_cast<int>(std::round(smooth_len / step)));
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<double> sm(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      double acc = 0.0;
      for (int j = -w; j <= w; ++j) {
        acc += kappa[(k + K + static_cast<std::size_t>(j + static_cast<int>(K))) % K];
      }
      sm[k] = acc / (2 * w + 1);
    }
    kappa = std::move(sm);
  }
  for (std::size_t k = 0; k < K; ++k) {
    const double s = static_cast<double>(k) * step;
    const double lo = track.n_right(s) + margin;
    const double hi = track.n_left(s) - margin;
    const double half = 0.45 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    const double raw = gain * kappa[k];
    (*values)[k] = mid + half * std::tanh(raw / std::max(half, 1e-6));
  }

  const double length = track.length();
  return [values, step, length, K](double s) {
    double sw = std::fmod(s, length);
    if (sw < 0) sw += length;
    const double pos = sw / step;
    std::size_t k = static_cast<std::size_t>(pos);
    if (k >= K) k = K - 1;
    const double alpha = pos - static_cast<double>(k);
    const double a = (*values)[k];
    const double b = (*values)[(k + 1) % K];
    return a + alpha * (b - a);
  };
}

RacingLine offline_racing_line(const TrackGeometry& track, const GgLookup& gg,
                               const LateralPathFn& path, const RacingLineMargins& margins,
                               const ProfilerConfig& config) {
  if (!track.closed()) throw std::runtime_error("offline racing line: requires a closed track");
  const double s_f = track.length();
  const std::size_t K = static_cast<std::size_t>(std::max(16.0, std::round(s_f / config.ds)));
  const double ds = s_f / static_cast<double>(K);

  std::vector<double> n(K);
  for (std::size_t k = 0; k < K; ++k) n[k] = path(static_cast<double>(k) * ds);

  std::vector<ProfilePoint> pts(K);
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t prev = (k + K - 1) % K;
    const std::size_t next = (k + 1) % K;
    const double np = (n[next] - n[prev]) / (2.0 * ds);
    const double npp = (n[next] - 2.0 * n[k] + n[prev]) / (ds * ds);
    pts[k] = make_profile_point(track, static_cast<double>(k) * ds, n[k], np, npp);
    pts[k].dsig = 0.0;  // filled below
  }
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t next = (k + 1) % K;
    pts[k].dsig = 0.5 * (pts[k].J + pts[next].J) * ds;
  }
  // closed-loop curvature stencils
  {
    std::vector<ProfilePoint> ext = pts;
    ext.push_back(pts[0]);
    ext.back().s = s_f;
    fill_curvature(ext, track, true);
    for (std::size_t k = 0; k < K; ++k) pts[k].kappa = ext[k].kappa;
  }
  for (const auto& pt : pts) validate_path_point(track, pt, margins, config);

  const EnvelopeEval env(gg, margins);
  std::vector<double> v_lim(K);
  for (std::size_t k = 0; k < K; ++k) v_lim[k] = bisect_speed_limit(env, pts[k]);
  std::vector<double> v = v_lim;

  auto run_passes = [&](std::vector<double>& speeds) {
    for (int iter = 0; iter < config.max_iterations; ++iter) {
      double change = 0.0;
      // braking envelope, two sweeps to cross the seam
      for (int sweep = 0; sweep < 2; ++sweep) {
        for (std::size_t i = K; i-- > 0;) {
          const std::size_t next = (i + 1) % K;
          const double bound = backward_bound(env, pts[i], speeds[next]);
          if (speeds[i] > bound) {
            change = std::max(change, speeds[i] - bound);
            speeds[i] = bound;
          }
        }
      }
      // acceleration envelope
      for (int sweep = 0; sweep < 2; ++sweep) {
        for (std::size_t i = 0; i < K; ++i) {
          const std::size_t next = (i + 1) % K;
          const double bound = forward_bound(env, pts[i], speeds[i]);
          if (speeds[next] > bound) {
            change = std::max(change, speeds[next] - bound);
            speeds[next] = bound;
          }
        }
      }
      if (change < config.fixed_point_tol) break;
    }
  };
  run_passes(v);
  relax_profile_to_checks(track, gg, margins, pts, v, v_lim, true, s_f, run_passes, 32);

  // emit one lap plus the closing point
  std::vector<ProfilePoint> closed_pts = pts;
  closed_pts.push_back(pts[0]);
  closed_pts.back().s = s_f;
  std::vector<double> closed_v = v;
  closed_v.push_back(v[0]);
  return RacingLine(profile_to_points(closed_pts, closed_v, true, s_f));
}

OnlineRacingLineResult online_racing_line(const TrackGeometry& track, const GgLookup& gg,
                                          const LateralPathFn& path, const VehicleState& ego,
                                          double horizon_m, const RacingLineMargins& margins,
                                          const ProfilerConfig& config) {
  const double s0 = track.closed() ? track.wrap_s(ego.s) : ego.s;
  const EnvelopeEval env(gg, margins);

  // braking-distance reserve keeps the horizon end consistent with
  // constraints just beyond it
  const double v_cap = env.v_cap();
  const GgShape ref = scale_for_racing_line(gg.query(v_cap, kGravity), margins.a_mgn,
                                            margins.a_abs_mgn);
  const double reserve = v_cap * v_cap / (2.0 * std::max(1.0, 0.7 * std::abs(ref.ax_min)));
  const double ds = config.ds;
  const std::size_t K_h = static_cast<std::size_t>(std::ceil(horizon_m / ds));
  const std::size_t K = K_h + static_cast<std::size_t>(std::ceil(reserve / ds)) + 1;

  // relative lateral blend: quintic residual from the ego offset onto the path
  const double blend_len = std::min(config.blend_len_max, horizon_m / 3.0);
  double np0 = 0.0, npp0 = 0.0;
  if (ego.s_dot > 0.5) {
    np0 = ego.n_dot / ego.s_dot;
    npp0 = (ego.n_ddot - np0 * ego.s_ddot) / (ego.s_dot * ego.s_dot);
  }
  const Poly5 residual = Poly5::connect({ego.n - path(s0), np0 - path_slope(path, s0),
                                         npp0 - path_curv(path, s0)},
                                        {0.0, 0.0, 0.0}, blend_len);

  auto blended = [&](double s_abs) {
    const double sigma = s_abs - s0;
    double value = path(s_abs);
    if (sigma < blend_len) value += residual.pos(sigma);
    return value;
  };

  std::vector<double> n(K + 1);
  for (std::size_t k = 0; k <= K; ++k) n[k] = blended(s0 + static_cast<double>(k) * ds);

  std::vector<ProfilePoint> pts(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    double np, npp;
    if (k > 0 && k < K) {
      np = (n[k + 1] - n[k - 1]) / (2.0 * ds);
      npp = (n[k + 1] - 2.0 * n[k] + n[k - 1]) / (ds * ds);
    } else if (k == 0) {
      np = np0;
      npp = npp0;
    } else {
      np = (n[K] - n[K - 1]) / ds;
      npp = 0.0;
    }
    pts[k] = make_profile_point(track, s0 + static_cast<double>(k) * ds, n[k], np, npp);
  }
  for (std::size_t k = 0; k < K; ++k) pts[k].dsig = 0.5 * (pts[k].J + pts[k + 1].J) * ds;
  pts[K].dsig = pts[K - 1].dsig;
  fill_curvature(pts, track, false);

  std::vector<double> v_lim_online(K + 1);
  for (std::size_t k = 0; k <= K; ++k) v_lim_online[k] = bisect_speed_limit(env, pts[k]);
  std::vector<double> v = v_lim_online;

  for (std::size_t i = K; i-- > 0;) {
    v[i] = std::min(v[i], backward_bound(env, pts[i], v[i + 1]));
  }

  bool clamped = false;
  double excess = 0.0;
  const RoadFrame f0 = track.frame_at(s0);
  const double v_ego = std::hypot(ego.s_dot * (1.0 - ego.n * f0.omega.z()), ego.n_dot);
  if (v_ego > v[0]) {
    clamped = true;
    excess = v_ego - v[0];
  } else {
    v[0] = v_ego;
  }
  auto run_passes = [&](std::vector<double>& speeds) {
    for (std::size_t i = K; i-- > 0;) {
      speeds[i] = std::min(speeds[i], backward_bound(env, pts[i], speeds[i + 1]));
    }
    speeds[0] = std::min(speeds[0], v_ego);
    for (std::size_t i = 0; i < K; ++i) {
      speeds[i + 1] = std::min(speeds[i + 1], forward_bound(env, pts[i], speeds[i]));
    }
  };
  for (std::size_t i = 0; i < K; ++i) {
    v[i + 1] = std::min(v[i + 1], forward_bound(env, pts[i], v[i]));
  }
  relax_profile_to_checks(track, gg, margins, pts, v, v_lim_online, false, track.length(),
                          run_passes, 12);

  pts.resize(K_h + 1);
  v.resize(K_h + 1);
  std::vector<RacingLinePoint> line_points = profile_to_points(pts, v, false, track.length());
  // pin the anchor exactly at the ego position
  line_points.front().s = ego.s;
  return {RacingLine(std::move(line_points)), clamped, excess};
}

RacingLine anchor_closed_line(const RacingLine& closed_lap, double s0, double duration,
                              double track_length) {
  const double T_lap = closed_lap.horizon();
  const auto& pts = closed_lap.points();
  const std::size_t K = pts.size() - 1;  // last point duplicates the first
  if (std::abs(pts.back().s - pts.front().s - track_length) > 1e-6)
    throw std::runtime_error("racing line: anchored line must cover exactly one lap");

  const double s_base = pts.front().s;
  const double t_star = closed_lap.time_at_s(s_base + s0);
  RacingLinePoint start = closed_lap.state_at(t_star);
  start.t = 0.0;
  start.s = s0;

  std::vector<RacingLinePoint> out;
  out.reserve(static_cast<std::size_t>(duration / (T_lap / static_cast<double>(K))) + 4);
  out.push_back(start);

  // walk the closed lap cyclically until the duration is covered
  auto it = std::upper_bound(pts.begin(), pts.end(), t_star,
                             [](double value, const RacingLinePoint& p) { return value < p.t; });
  std::size_t idx = static_cast<std::size_t>(std::distance(pts.begin(), it));
  int lap = 0;
  while (true) {
    if (idx >= K) {
      idx = 0;
      ++lap;
    }
    const double t_out = pts[idx].t + static_cast<double>(lap) * T_lap - t_star;
    if (t_out <= 1e-12) {
      ++idx;
      continue;
    }
    RacingLinePoint p = pts[idx];
    p.t = t_out;
    p.s = (pts[idx].s - s_base) + static_cast<double>(lap) * track_length;
    out.push_back(p);
    if (t_out >= duration) break;
    ++idx;
  }
  return RacingLine(std::move(out));
}

}  // namespace raceplan

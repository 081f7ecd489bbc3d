#include "raceplan/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace raceplan {

namespace {
constexpr double kDedupFraction = 1e-9;  // of the grid spacing
}

std::vector<LongitudinalSample> sample_longitudinal(const VehicleState& state,
                                                    const RacingLine& rl, double T, int n_sdot,
                                                    double k_sdot, double s0_thr) {
  if (n_sdot < 2) throw std::invalid_argument("sampling: n_sdot must be >= 2");
  if (k_sdot <= 1.0) throw std::invalid_argument("sampling: k_sdot must be > 1");
  const RacingLinePoint rl0 = rl.state_at(0.0);
  const RacingLinePoint rlT = rl.state_at(T);
  if (rlT.s_dot <= 0.0)
    throw std::runtime_error("sampling: racing line is stationary at the horizon");

  const double upper = rlT.s_dot * k_sdot;
  const double spacing = upper / static_cast<double>(n_sdot - 1);
  const double dedup_tol = kDedupFraction * spacing;

  const double d_start = std::abs(state.s_dot - rl0.s_dot) / (s0_thr * rl0.s_dot);
  const double start_factor = std::clamp(1.0 - d_start, 0.0, 1.0);

  std::vector<LongitudinalSample> samples;
  samples.reserve(static_cast<std::size_t>(n_sdot) + 1);
  bool injected = false;
  for (int i = 0; i < n_sdot; ++i) {
    const double s_dot_e = spacing * static_cast<double>(i);
    LongitudinalSample sm;
    if (std::abs(s_dot_e - rlT.s_dot) <= dedup_tol) {
      sm.s_dot_e = rlT.s_dot;
      sm.s_ddot_e = rlT.s_ddot;
      sm.is_racing_line = true;
      injected = true;
    } else {
      const double d_end = std::abs(s_dot_e - rlT.s_dot) / (s0_thr * rlT.s_dot);
      const double lambda = start_factor * std::clamp(1.0 - d_end, 0.0, 1.0);
      sm.s_dot_e = s_dot_e;
      sm.s_ddot_e = lambda * rlT.s_ddot;
    }
    samples.push_back(sm);
  }
  if (!injected) {
    LongitudinalSample sm;
    sm.s_dot_e = rlT.s_dot;
    sm.s_ddot_e = rlT.s_ddot;
    sm.is_racing_line = true;
    auto pos = std::lower_bound(samples.begin(), samples.end(), sm.s_dot_e,
                                [](const LongitudinalSample& a, double v) { return a.s_dot_e < v; });
    samples.insert(pos, sm);
  }
  return samples;
}

std::vector<LateralSample> sample_lateral(const TrackGeometry& track, double s_end,
                                          double s_dot_end, const LatState& rl_end, int n_n,
                                          double d_w) {
  if (n_n < 2) throw std::invalid_argument("sampling: n_n must be >= 2");
  const double lo = track.n_right(s_end) + d_w / 2.0;
  const double hi = track.n_left(s_end) - d_w / 2.0;
  if (lo >= hi)
    throw std::runtime_error("sampling: track narrower than the vehicle width at s_end");

  // boundary-aligned derivative anchors: travel parallel to the boundary
  const double lo_slope = track.n_right_slope(s_end) * s_dot_end;
  const double hi_slope = track.n_left_slope(s_end) * s_dot_end;

  const double spacing = (hi - lo) / static_cast<double>(n_n - 1);
  const double dedup_tol = kDedupFraction * spacing;

  auto derivatives_at = [&](double n_e) -> std::pair<double, double> {
    // linear interpolation between the racing line anchor and the boundary
    if (n_e >= rl_end.n) {
      const double span = hi - rl_end.n;
      const double alpha = span > 0.0 ? std::clamp((n_e - rl_end.n) / span, 0.0, 1.0) : 1.0;
      return {(1.0 - alpha) * rl_end.n_dot + alpha * hi_slope, (1.0 - alpha) * rl_end.n_ddot};
    }
    const double span = rl_end.n - lo;
    const double alpha = span > 0.0 ? std::clamp((rl_end.n - n_e) / span, 0.0, 1.0) : 1.0;
    return {(1.0 - alpha) * rl_end.n_dot + alpha * lo_slope, (1.0 - alpha) * rl_end.n_ddot};
  };

  std::vector<LateralSample> samples;
  samples.reserve(static_cast<std::size_t>(n_n) + 1);
  bool injected = false;
  for (int j = 0; j < n_n; ++j) {
    const double n_e = lo + spacing * static_cast<double>(j);
    LateralSample sm;
    if (std::abs(n_e - rl_end.n) <= dedup_tol) {
      sm.n_e = rl_end.n;
      sm.n_dot_e = rl_end.n_dot;
      sm.n_ddot_e = rl_end.n_ddot;
      sm.is_racing_line = true;
      injected = true;
    } else {
      const auto [nd, ndd] = derivatives_at(n_e);
      sm.n_e = n_e;
      sm.n_dot_e = nd;
      sm.n_ddot_e = ndd;
    }
    samples.push_back(sm);
  }
  if (!injected) {
    LateralSample sm;
    sm.n_e = rl_end.n;
    sm.n_dot_e = rl_end.n_dot;
    sm.n_ddot_e = rl_end.n_ddot;
    sm.is_racing_line = true;
    auto pos = std::lower_bound(samples.begin(), samples.end(), sm.n_e,
                                [](const LateralSample& a, double v) { return a.n_e < v; });
    samples.insert(pos, sm);
  }
  return samples;
}

}  // namespace raceplan

#pragma once

#include <vector>

#include "raceplan/racing_line.hpp"
#include "raceplan/track.hpp"
#include "raceplan/vehicle_state.hpp"

namespace raceplan {

struct LongitudinalSample {
  double s_dot_e = 0.0;
  double s_ddot_e = 0.0;
  bool is_racing_line = false;
};

struct LateralSample {
  double n_e = 0.0;
  double n_dot_e = 0.0;
  double n_ddot_e = 0.0;
  bool is_racing_line = false;
};

/// End velocities: n_sdot equidistant samples over [0, s_dot_rl(T)*k_sdot]
/// plus the exact terminal racing line velocity. End accelerations blend
/// toward s_ddot_rl(T) with the proximity factor lambda; the racing line
/// sample carries it exactly.
std::vector<LongitudinalSample> sample_longitudinal(const VehicleState& state,
                                                    const RacingLine& rl, double T, int n_sdot,
                                                    double k_sdot, double s0_thr);

/// End offsets: n_n equidistant samples within the width-margined bounds at
/// the end position plus the reparameterized terminal racing line offset.
/// Derivatives are boundary-aligned at the interval ends, racing-line-aligned
/// at the injected sample, and linearly interpolated in between.
std::vector<LateralSample> sample_lateral(const TrackGeometry& track, double s_end,
                                          double s_dot_end, const LatState& rl_end, int n_n,
                                          double d_w);

}  // namespace raceplan

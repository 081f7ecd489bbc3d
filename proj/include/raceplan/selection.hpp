#pragma once

#include <vector>

#include "raceplan/trajectory.hpp"

namespace raceplan {

/// One opponent's predicted curvilinear motion sampled at the candidate
/// time points; s shares the ego's continuous (unwrapped) chart.
struct OpponentPrediction {
  std::vector<double> s;
  std::vector<double> n;
};

struct CostWeights {
  double w_n = 0.1;
  double w_v = 100.0;
  double w_pr = 5000.0;
  double k_s = 0.015;
  double k_n = 0.5;
  double d_snr = 200.0;  // sensor range [m]
};

/// Exponential proximity cost to all predicted opponents per point.
std::vector<double> prediction_term(const TrajectoryCandidate& candidate,
                                    const std::vector<OpponentPrediction>& predictions, double k_s,
                                    double k_n);

/// Rectangle-rule cost: racing line tracking terms plus prediction
/// avoidance. rl_reference holds the transformed racing line at the same
/// time points (v must be positive everywhere).
double total_cost(const TrajectoryCandidate& candidate,
                  const std::vector<TrajectoryPoint>& rl_reference,
                  const std::vector<OpponentPrediction>& predictions, const CostWeights& weights,
                  double T);

/// Argmin over the feasible set; ties break toward the lowest candidate
/// index. Falls back to soft_fallback (flagged by the caller) when no
/// candidate is feasible.
struct SelectionResult {
  int index = -1;
  bool used_soft_fallback = false;
};

SelectionResult select(const std::vector<TrajectoryCandidate>& candidates,
                       const std::vector<int>& feasible, int soft_fallback);

}  // namespace raceplan

#include "raceplan/selection.hpp"

#include <cmath>
#include <stdexcept>

namespace raceplan {

std::vector<double> prediction_term(const TrajectoryCandidate& candidate,
                                    const std::vector<OpponentPrediction>& predictions, double k_s,
                                    double k_n) {
  std::vector<double> d_pr(candidate.points.size(), 0.0);
  for (const auto& opp : predictions) {
    for (std::size_t k = 0; k < candidate.points.size(); ++k) {
      const double ds = opp.s[k] - candidate.points[k].s;
      const double dn = opp.n[k] - candidate.points[k].n;
      d_pr[k] += std::exp(-k_s * ds * ds - k_n * dn * dn);
    }
  }
  return d_pr;
}

double total_cost(const TrajectoryCandidate& candidate,
                  const std::vector<TrajectoryPoint>& rl_reference,
                  const std::vector<OpponentPrediction>& predictions, const CostWeights& weights,
                  double T) {
  const std::size_t n = candidate.points.size();
  if (rl_reference.size() != n)
    throw std::invalid_argument("selection: racing line reference size mismatch");
  const std::vector<double> d_pr = prediction_term(candidate, predictions, weights.k_s, weights.k_n);

  double cost = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double v_rl = rl_reference[k].v;
    if (v_rl <= 0.0) throw std::runtime_error("selection: racing line speed vanished");
    const double dn = rl_reference[k].n - candidate.points[k].n;
    const double dv = v_rl - candidate.points[k].v;
    cost += weights.w_n * dn * dn + weights.w_v * dv * dv / (v_rl * v_rl) + weights.w_pr * d_pr[k];
  }
  return cost * T / static_cast<double>(n);
}

SelectionResult select(const std::vector<TrajectoryCandidate>& candidates,
                       const std::vector<int>& feasible, int soft_fallback) {
  SelectionResult result;
  if (!feasible.empty()) {
    double best_cost = 0.0;
    for (const int idx : feasible) {
      const auto& candidate = candidates[static_cast<std::size_t>(idx)];
      if (result.index < 0 || candidate.cost < best_cost) {
        result.index = idx;
        best_cost = candidate.cost;
      }
    }
    return result;
  }
  if (soft_fallback < 0) throw std::runtime_error("selection: no candidate available");
  result.index = soft_fallback;
  result.used_soft_fallback = true;
  return result;
}

}  // namespace raceplan

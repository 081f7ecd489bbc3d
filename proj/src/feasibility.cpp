#include "raceplan/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace raceplan {

std::vector<bool> check_bounds(const TrajectoryCandidate& candidate, const TrackGeometry& track,
                               double d_w, double d_s) {
  std::vector<bool> ok(candidate.points.size(), false);
  for (std::size_t k = 0; k < candidate.points.size(); ++k) {
    const auto& pt = candidate.points[k];
    const double lo = track.n_right(pt.s) + d_w / 2.0 + d_s;
    const double hi = track.n_left(pt.s) - d_w / 2.0 - d_s;
    ok[k] = pt.n >= lo && pt.n <= hi;
  }
  return ok;
}

std::vector<bool> check_curvature(const TrajectoryCandidate& candidate, double kappa_max) {
  std::vector<bool> ok(candidate.points.size(), false);
  for (std::size_t k = 0; k < candidate.points.size(); ++k) {
    ok[k] = std::abs(candidate.points[k].kappa_hat) <= kappa_max;
  }
  return ok;
}

std::vector<bool> check_dynamics(const TrajectoryCandidate& candidate, const GgLookup& gg,
                                 bool flat_2d) {
  std::vector<bool> ok(candidate.points.size(), false);
  for (std::size_t k = 0; k < candidate.points.size(); ++k) {
    const auto& pt = candidate.points[k];
    ApparentAccel accel;
    if (flat_2d) {
      accel = {pt.ax_hat, pt.ay_hat, kGravity};
    } else {
      accel = {pt.ax_tilde, pt.ay_tilde, pt.g_tilde};
    }
    ok[k] = check_accel(gg.query(pt.v, accel.g_tilde), accel).ok;
  }
  return ok;
}

FeasibilityReport evaluate_candidate(TrajectoryCandidate& candidate, const TrackGeometry& track,
                                     const GgLookup& gg, const FeasibilityParams& params) {
  FeasibilityReport report;
  report.worst_bounds_slack = std::numeric_limits<double>::infinity();
  report.worst_curvature_slack = std::numeric_limits<double>::infinity();
  report.worst_dynamics_slack = std::numeric_limits<double>::infinity();

  for (const auto& pt : candidate.points) {
    const double lo = track.n_right(pt.s) + params.d_w / 2.0 + params.d_s;
    const double hi = track.n_left(pt.s) - params.d_w / 2.0 - params.d_s;
    const double bounds_slack = std::min(pt.n - lo, hi - pt.n);
    if (bounds_slack < 0.0) ++report.bounds_violations;
    report.worst_bounds_slack = std::min(report.worst_bounds_slack, bounds_slack);

    const double curvature_slack = params.kappa_max - std::abs(pt.kappa_hat);
    if (curvature_slack < 0.0) ++report.curvature_violations;
    report.worst_curvature_slack = std::min(report.worst_curvature_slack, curvature_slack);

    ApparentAccel accel;
    if (params.flat_2d) {
      accel = {pt.ax_hat, pt.ay_hat, kGravity};
    } else {
      accel = {pt.ax_tilde, pt.ay_tilde, pt.g_tilde};
    }
    const AccelCheck check = check_accel(gg.query(pt.v, accel.g_tilde), accel);
    const double dynamics_slack =
        std::min({check.slack_drive, check.slack_lateral, check.slack_combined});
    if (!check.ok) ++report.dynamics_violations;
    report.worst_dynamics_slack = std::min(report.worst_dynamics_slack, dynamics_slack);
  }
  report.feasible = report.total_violations() == 0;
  candidate.report = report;
  return report;
}

EvaluateSetResult evaluate_set(std::vector<TrajectoryCandidate>& candidates,
                               const TrackGeometry& track, const GgLookup& gg,
                               const FeasibilityParams& params) {
  if (candidates.empty()) throw std::runtime_error("feasibility: empty candidate set");

  EvaluateSetResult result;
  for (auto& candidate : candidates) {
    if (!candidate.kinematically_valid) continue;
    evaluate_candidate(candidate, track, gg, params);
    if (candidate.report.feasible) result.feasible.push_back(candidate.index);
  }

  if (result.feasible.empty()) {
    const TrajectoryCandidate* best = nullptr;
    for (const auto& candidate : candidates) {
      if (!candidate.kinematically_valid) continue;
      if (best == nullptr) {
        best = &candidate;
        continue;
      }
      const auto& cur = best->report;
      const auto& alt = candidate.report;
      if (alt.total_violations() < cur.total_violations() ||
          (alt.total_violations() == cur.total_violations() &&
           std::abs(alt.worst_slack()) < std::abs(cur.worst_slack()))) {
        best = &candidate;
      }
    }
    if (best == nullptr) throw std::runtime_error("feasibility: no kinematically valid candidate");
    result.soft_fallback = best->index;
  }
  return result;
}

}  // namespace raceplan

#include <doctest.h>

#include <cmath>

#include "raceplan/feasibility.hpp"
#include "raceplan/track_presets.hpp"

using namespace raceplan;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return out;
}

TrajectoryCandidate flat_candidate(double n, double kappa, double v, double ay, int n_points = 10) {
  TrajectoryCandidate c;
  c.index = 0;
  c.points.resize(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) {
    auto& pt = c.points[static_cast<std::size_t>(k)];
    pt.t = 0.1 * k;
    pt.s = 10.0 * k;
    pt.n = n;
    pt.v = v;
    pt.kappa_hat = kappa;
    pt.ay_hat = ay;
    pt.ay_tilde = ay;
    pt.g_tilde = kGravity;
  }
  return c;
}

}  // namespace

TEST_CASE("bounds check arithmetic") {
  const TrackGeometry track = make_straight(200.0, 10.0, 1.0);  // bounds +-5
  SUBCASE("center of a wide track passes") {
    const auto ok = check_bounds(flat_candidate(0.0, 0, 30, 0), track, 1.93, 0.2);
    for (bool v : ok) CHECK(v);
  }
  SUBCASE("n = 4.5 fails: 4.5 > 5 - 0.965 - 0.2") {
    const auto ok = check_bounds(flat_candidate(4.5, 0, 30, 0), track, 1.93, 0.2);
    for (bool v : ok) CHECK_FALSE(v);
  }
  SUBCASE("exact boundary passes (non-strict)") {
    const double limit = 5.0 - 1.93 / 2.0 - 0.2;
    const auto ok = check_bounds(flat_candidate(limit, 0, 30, 0), track, 1.93, 0.2);
    for (bool v : ok) CHECK(v);
  }
}

TEST_CASE("curvature check uses the absolute value") {
  TrajectoryCandidate c = flat_candidate(0.0, 0.05, 30, 0);
  auto ok = check_curvature(c, 0.1);
  for (bool v : ok) CHECK(v);

  c = flat_candidate(0.0, 0.1, 30, 0);  // boundary
  ok = check_curvature(c, 0.1);
  for (bool v : ok) CHECK(v);

  c = flat_candidate(0.0, -0.12, 30, 0);  // left turn beyond the limit
  ok = check_curvature(c, 0.1);
  for (bool v : ok) CHECK_FALSE(v);
}

TEST_CASE("dynamics check against the interpolated envelope") {
  const GgLookup gg =
      GgLookup::synth(1.0, 1.0, 5.0, 1.8, linspace(0, 60, 7), linspace(6, 16, 6));
  SUBCASE("coasting on a flat straight passes") {
    const auto ok = check_dynamics(flat_candidate(0, 0, 30, 0), gg, false);
    for (bool v : ok) CHECK(v);
  }
  SUBCASE("flat circle at 30 m/s with R=100 fails a tight envelope") {
    // ay demand 9 against ay_max = mu * g = 8.0 with mu ~ 0.815
    const GgLookup tight =
        GgLookup::synth(0.8155, 0.8155, 5.0, 1.8, linspace(0, 60, 7), linspace(6, 16, 6));
    TrajectoryCandidate c = flat_candidate(0, 0.01, 30, 9.0);
    const auto ok = check_dynamics(c, tight, false);
    for (bool v : ok) CHECK_FALSE(v);
  }
  SUBCASE("banking raises g_tilde and the same demand passes") {
    const GgLookup tight =
        GgLookup::synth(0.8155, 0.8155, 5.0, 1.8, linspace(0, 60, 7), linspace(6, 16, 6));
    TrajectoryCandidate c = flat_candidate(0, 0.01, 30, 9.0);
    for (auto& pt : c.points) pt.g_tilde = 11.3;  // banked turn vertical load
    const auto ok3d = check_dynamics(c, tight, false);
    for (bool v : ok3d) CHECK(v);
    // the planar reading ignores the banking benefit and still fails
    const auto ok2d = check_dynamics(c, tight, true);
    for (bool v : ok2d) CHECK_FALSE(v);
  }
}

TEST_CASE("evaluate_set partitions and soft fallback") {
  const TrackGeometry track = make_straight(200.0, 10.0, 1.0);
  const GgLookup gg =
      GgLookup::synth(1.0, 1.0, 5.0, 1.8, linspace(0, 60, 7), linspace(6, 16, 6));
  FeasibilityParams params;

  SUBCASE("all feasible leaves the fallback unused") {
    std::vector<TrajectoryCandidate> set;
    for (int i = 0; i < 3; ++i) {
      set.push_back(flat_candidate(0.0, 0.0, 30, 0));
      set.back().index = i;
    }
    const auto result = evaluate_set(set, track, gg, params);
    CHECK(result.feasible.size() == 3);
    CHECK(result.soft_fallback == -1);
  }

  SUBCASE("fewest violations wins when nothing is feasible") {
    std::vector<TrajectoryCandidate> set;
    // bounds violations on 3, 5 and 2 of 10 points
    for (int count : {3, 5, 2}) {
      TrajectoryCandidate c = flat_candidate(0.0, 0.0, 30, 0);
      for (int k = 0; k < count; ++k) c.points[static_cast<std::size_t>(k)].n = 4.9;
      c.index = static_cast<int>(set.size());
      set.push_back(c);
    }
    const auto result = evaluate_set(set, track, gg, params);
    CHECK(result.feasible.empty());
    CHECK(result.soft_fallback == 2);
  }

  SUBCASE("ties break by smaller worst slack, then index") {
    std::vector<TrajectoryCandidate> set;
    TrajectoryCandidate a = flat_candidate(0.0, 0.0, 30, 0);
    a.points[0].n = 4.6;  // violation depth 0.765
    a.index = 0;
    TrajectoryCandidate b = flat_candidate(0.0, 0.0, 30, 0);
    b.points[0].n = 4.0;  // violation depth 0.165
    b.index = 1;
    set.push_back(a);
    set.push_back(b);
    auto result = evaluate_set(set, track, gg, params);
    CHECK(result.soft_fallback == 1);

    // full tie -> lowest index
    std::vector<TrajectoryCandidate> tied;
    for (int i = 0; i < 2; ++i) {
      TrajectoryCandidate c = flat_candidate(0.0, 0.0, 30, 0);
      c.points[0].n = 4.0;
      c.index = i;
      tied.push_back(c);
    }
    result = evaluate_set(tied, track, gg, params);
    CHECK(result.soft_fallback == 0);
  }

  SUBCASE("empty set is an error") {
    std::vector<TrajectoryCandidate> empty;
    CHECK_THROWS(evaluate_set(empty, track, gg, params));
  }

  SUBCASE("deterministic across repeated evaluation") {
    std::vector<TrajectoryCandidate> set;
    for (int i = 0; i < 5; ++i) {
      TrajectoryCandidate c = flat_candidate(0.0, 0.0, 30, 0);
      c.points[static_cast<std::size_t>(i % 3)].n = 4.9;
      c.index = i;
      set.push_back(c);
    }
    auto set2 = set;
    const auto r1 = evaluate_set(set, track, gg, params);
    const auto r2 = evaluate_set(set2, track, gg, params);
    CHECK(r1.feasible == r2.feasible);
    CHECK(r1.soft_fallback == r2.soft_fallback);
  }
}

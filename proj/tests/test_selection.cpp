#include <doctest.h>

#include <cmath>
#include <random>

#include "raceplan/selection.hpp"

using namespace raceplan;

namespace {

TrajectoryCandidate straight_candidate(double n, double v, int n_points = 30, double T = 3.0) {
  TrajectoryCandidate c;
  c.index = 0;
  c.points.resize(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) {
    auto& pt = c.points[static_cast<std::size_t>(k)];
    pt.t = T * k / (n_points - 1);
    pt.s = v * pt.t;
    pt.n = n;
    pt.v = v;
  }
  return c;
}

std::vector<TrajectoryPoint> reference_line(double v, int n_points = 30, double T = 3.0) {
  std::vector<TrajectoryPoint> pts(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) {
    auto& pt = pts[static_cast<std::size_t>(k)];
    pt.t = T * k / (n_points - 1);
    pt.s = v * pt.t;
    pt.n = 0.0;
    pt.v = v;
  }
  return pts;
}

}  // namespace

TEST_CASE("prediction term values") {
  const TrajectoryCandidate c = straight_candidate(0.0, 30.0);
  SUBCASE("no opponents gives zero") {
    const auto d = prediction_term(c, {}, 0.015, 0.5);
    for (double v : d) CHECK(v == 0.0);
  }
  SUBCASE("coincident opponent gives exactly one") {
    OpponentPrediction opp;
    for (const auto& pt : c.points) {
      opp.s.push_back(pt.s);
      opp.n.push_back(pt.n);
    }
    const auto d = prediction_term(c, {opp}, 0.015, 0.5);
    for (double v : d) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("pure longitudinal offset of 10 m") {
    OpponentPrediction opp;
    for (const auto& pt : c.points) {
      opp.s.push_back(pt.s + 10.0);
      opp.n.push_back(0.0);
    }
    const auto d = prediction_term(c, {opp}, 0.015, 0.5);
    for (double v : d) CHECK(v == doctest::Approx(std::exp(-1.5)));
  }
  SUBCASE("strictly decreasing in each offset separately") {
    double prev = 2.0;
    for (double ds : {0.0, 2.0, 5.0, 9.0, 14.0}) {
      OpponentPrediction opp;
      for (const auto& pt : c.points) {
        opp.s.push_back(pt.s + ds);
        opp.n.push_back(0.0);
      }
      const double v = prediction_term(c, {opp}, 0.015, 0.5)[0];
      CHECK(v < prev);
      prev = v;
    }
    prev = 2.0;
    for (double dn : {0.0, 0.5, 1.0, 2.0, 3.5}) {
      OpponentPrediction opp;
      for (const auto& pt : c.points) {
        opp.s.push_back(pt.s);
        opp.n.push_back(pt.n + dn);
      }
      const double v = prediction_term(c, {opp}, 0.015, 0.5)[0];
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("total cost") {
  CostWeights weights;
  weights.w_n = 0.1;
  weights.w_v = 100.0;
  weights.w_pr = 5000.0;
  const auto rl = reference_line(30.0);

  SUBCASE("candidate identical to the line costs zero") {
    const TrajectoryCandidate c = straight_candidate(0.0, 30.0);
    CHECK(total_cost(c, rl, {}, weights, 3.0) == doctest::Approx(0.0));
  }
  SUBCASE("constant lateral deviation integrates by the rectangle rule") {
    const TrajectoryCandidate c = straight_candidate(1.0, 30.0);
    // w_n * dn^2 * T = 0.1 * 1 * 3
    CHECK(total_cost(c, rl, {}, weights, 3.0) == doctest::Approx(0.3));
  }
  SUBCASE("doubling w_pr doubles only the prediction share") {
    const TrajectoryCandidate c = straight_candidate(1.0, 28.0);
    OpponentPrediction opp;
    for (const auto& pt : c.points) {
      opp.s.push_back(pt.s + 15.0);
      opp.n.push_back(0.0);
    }
    const double base = total_cost(c, rl, {opp}, weights, 3.0);
    const double without = total_cost(c, rl, {}, weights, 3.0);
    CostWeights heavy = weights;
    heavy.w_pr *= 2.0;
    const double doubled = total_cost(c, rl, {opp}, heavy, 3.0);
    CHECK(doubled - without == doctest::Approx(2.0 * (base - without)));
  }
  SUBCASE("zero reference speed is an error") {
    auto rl_zero = rl;
    rl_zero[4].v = 0.0;
    const TrajectoryCandidate c = straight_candidate(0.0, 30.0);
    CHECK_THROWS(total_cost(c, rl_zero, {}, weights, 3.0));
  }
}

TEST_CASE("argmin selection with ties and fallback") {
  std::vector<TrajectoryCandidate> candidates(3);
  for (int i = 0; i < 3; ++i) candidates[static_cast<std::size_t>(i)].index = i;

  SUBCASE("single feasible candidate is returned") {
    candidates[1].cost = 7.0;
    const auto r = select(candidates, {1}, -1);
    CHECK(r.index == 1);
    CHECK_FALSE(r.used_soft_fallback);
  }
  SUBCASE("lowest cost wins") {
    candidates[0].cost = 2.0;
    candidates[1].cost = 1.0;
    candidates[2].cost = 3.0;
    CHECK(select(candidates, {0, 1, 2}, -1).index == 1);
  }
  SUBCASE("ties break to the lowest index") {
    candidates[0].cost = 1.0;
    candidates[1].cost = 1.0;
    candidates[2].cost = 1.0 + 1e-13;
    CHECK(select(candidates, {0, 1, 2}, -1).index == 0);
  }
  SUBCASE("soft fallback flagged when nothing is feasible") {
    const auto r = select(candidates, {}, 2);
    CHECK(r.index == 2);
    CHECK(r.used_soft_fallback);
  }
  SUBCASE("both empty is an error") { CHECK_THROWS(select(candidates, {}, -1)); }
}

TEST_CASE("common weight scaling keeps the argmin") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> n_d(-3.0, 3.0), v_d(20.0, 35.0), scale_d(0.1, 50.0);
  const auto rl = reference_line(30.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<TrajectoryCandidate> candidates;
    OpponentPrediction opp;
    for (int k = 0; k < 30; ++k) {
      opp.s.push_back(30.0 * 3.0 * k / 29.0 + 40.0);
      opp.n.push_back(1.0);
    }
    CostWeights weights;
    for (int i = 0; i < 8; ++i) {
      TrajectoryCandidate c = straight_candidate(n_d(rng), v_d(rng));
      c.index = i;
      c.cost = total_cost(c, rl, {opp}, weights, 3.0);
      candidates.push_back(c);
    }
    std::vector<int> all{0, 1, 2, 3, 4, 5, 6, 7};
    const int base_pick = select(candidates, all, -1).index;

    const double scale = scale_d(rng);
    CostWeights scaled = weights;
    scaled.w_n *= scale;
    scaled.w_v *= scale;
    scaled.w_pr *= scale;
    for (auto& c : candidates) c.cost = total_cost(c, rl, {opp}, scaled, 3.0);
    CHECK(select(candidates, all, -1).index == base_pick);
  }
}

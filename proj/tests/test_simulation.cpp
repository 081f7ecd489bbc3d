#include <doctest.h>

#include <cmath>

#include "raceplan/simulation.hpp"
#include "raceplan/track_presets.hpp"

using namespace raceplan;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return out;
}

GgLookup scenario_gg() {
  return GgLookup::synth(1.05, 1.05, 4.5, 1.8, linspace(0.0, 62.0, 14), linspace(5.0, 25.0, 11));
}

ScenarioConfig base_config() {
  ScenarioConfig config;
  config.laps = 1;
  return config;
}

}  // namespace

TEST_CASE("static opponents predict their fixed position") {
  ScenarioConfig config = base_config();
  config.duration = 1.0;
  OpponentSpec opp;
  opp.type = OpponentSpec::Type::static_obj;
  opp.s = 120.0;
  opp.n = 1.0;
  config.opponents.push_back(opp);
  Simulator sim(config, make_oval_banked(), scenario_gg());
  const auto predictions = sim.predict_opponents(3.0, 30);
  REQUIRE(predictions.size() == 1);
  for (int k = 0; k < 30; ++k) {
    CHECK(predictions[0].s[static_cast<std::size_t>(k)] == doctest::Approx(120.0));
    CHECK(predictions[0].n[static_cast<std::size_t>(k)] == doctest::Approx(1.0));
  }
}

TEST_CASE("follower prediction equals its replayed future motion") {
  ScenarioConfig config = base_config();
  config.duration = 1.0;
  OpponentSpec opp;
  opp.type = OpponentSpec::Type::path_follower;
  opp.s = 90.0;
  opp.speed_fraction = 0.7;
  config.opponents.push_back(opp);
  Simulator sim(config, make_oval_banked(), scenario_gg());

  const auto predictions = sim.predict_opponents(3.0, 31);
  REQUIRE(predictions.size() == 1);
  // replay: the opponent track is a pure function of the clock, and the
  // prediction must sample exactly that function
  const auto& track = sim.opponents().front();
  const auto [prog0, n0] = track.at(sim.clock());
  for (int k = 0; k < 31; ++k) {
    const double tau = 3.0 * k / 30.0;
    const auto [prog, n] = track.at(sim.clock() + tau);
    const double expect_s = predictions[0].s[0] + (prog - prog0);
    CHECK(predictions[0].s[static_cast<std::size_t>(k)] == doctest::Approx(expect_s).epsilon(1e-12));
    CHECK(predictions[0].n[static_cast<std::size_t>(k)] == doctest::Approx(n).epsilon(1e-12));
  }
}

TEST_CASE("sensor range filters far opponents") {
  ScenarioConfig config = base_config();
  config.duration = 1.0;
  OpponentSpec near_opp;
  near_opp.type = OpponentSpec::Type::static_obj;
  near_opp.s = 150.0;
  near_opp.n = 0.0;
  OpponentSpec far_opp = near_opp;
  far_opp.s = 800.0;  // beyond d_snr = 200 on a 1751 m lap
  config.opponents.push_back(near_opp);
  config.opponents.push_back(far_opp);
  Simulator sim(config, make_oval_banked(), scenario_gg());
  CHECK(sim.predict_opponents(3.0, 30).size() == 1);
}

TEST_CASE("step moves the ego to the chosen trajectory at dt_sim") {
  ScenarioConfig config = base_config();
  config.duration = 1.0;
  Simulator sim(config, make_oval_banked(), scenario_gg());
  const auto outcome = sim.plan_cycle();
  const LonState want_lon = outcome.chosen.lon->eval(0.1);
  const LatState want_lat = outcome.chosen.lat->eval(0.1);
  sim.step(outcome.chosen, 0.1);
  CHECK(sim.ego().s_dot == doctest::Approx(want_lon.s_dot).epsilon(1e-12));
  CHECK(sim.ego().n == doctest::Approx(want_lat.n).epsilon(1e-12));
  CHECK(sim.clock() == doctest::Approx(0.1));
}

TEST_CASE("solo ego on the racing line keeps choosing the line candidate") {
  ScenarioConfig config = base_config();
  config.duration = 2.0;
  Simulator sim(config, make_oval_banked(), scenario_gg());
  for (int cycle = 0; cycle < 5; ++cycle) {
    const auto outcome = sim.plan_cycle();
    CHECK_FALSE(outcome.log.soft_fallback);
    CHECK(outcome.log.chosen_cost == doctest::Approx(0.0).epsilon(1e-6));
    // the winning candidate tracks the racing line state exactly
    const RacingLinePoint rl_like = sim.offline_line().state_at_s(
        sim.offline_line().s_start() + sim.ego().s);
    CHECK(std::abs(sim.ego().n - rl_like.n) < 1e-5);
    sim.step(outcome.chosen, 0.1);
  }
}

TEST_CASE("two runs of the same scenario are identical") {
  ScenarioConfig config = base_config();
  config.duration = 3.0;
  OpponentSpec opp;
  opp.type = OpponentSpec::Type::path_follower;
  opp.s = 60.0;
  opp.speed_fraction = 0.7;
  config.opponents.push_back(opp);

  const ScenarioResult a = Simulator(config, make_oval_banked(), scenario_gg()).run();
  const ScenarioResult b = Simulator(config, make_oval_banked(), scenario_gg()).run();
  REQUIRE(a.cycles.size() == b.cycles.size());
  for (std::size_t i = 0; i < a.cycles.size(); ++i) {
    CHECK(a.cycles[i].ego.s == b.cycles[i].ego.s);
    CHECK(a.cycles[i].ego.n == b.cycles[i].ego.n);
    CHECK(a.cycles[i].ego.v == b.cycles[i].ego.v);
    CHECK(a.cycles[i].chosen_index == b.cycles[i].chosen_index);
    CHECK(a.cycles[i].chosen_cost == b.cycles[i].chosen_cost);
  }
}

TEST_CASE("replanning extends the previous trajectory when unobstructed") {
  ScenarioConfig config = base_config();
  config.duration = 2.0;
  Simulator sim(config, make_oval_banked(), scenario_gg());
  auto outcome = sim.plan_cycle();
  for (int cycle = 0; cycle < 6; ++cycle) {
    // evaluate the previous plan at dt + t and compare with the new plan
    std::vector<std::pair<double, double>> previous;  // (s, n) at overlap times
    for (double t = 0.0; t <= 2.0; t += 0.25) {
      previous.emplace_back(outcome.chosen.lon->eval(0.1 + t).s,
                            outcome.chosen.lat->eval(0.1 + t).n);
    }
    sim.step(outcome.chosen, 0.1);
    outcome = sim.plan_cycle();
    std::size_t idx = 0;
    for (double t = 0.0; t <= 2.0; t += 0.25, ++idx) {
      const double s_new = outcome.chosen.lon->eval(t).s;
      const double n_new = outcome.chosen.lat->eval(t).n;
      CHECK(std::abs(s_new - previous[idx].first) < 1e-5);
      CHECK(std::abs(n_new - previous[idx].second) < 1e-5);
    }
  }
}

TEST_CASE("lap crossing bookkeeping with sub-step interpolation") {
  ScenarioConfig config = base_config();
  config.laps = 1;
  // tiny ring so a lap completes quickly
  Simulator sim(config, make_flat_circle(60.0, 10.0, 0.5), scenario_gg());
  const ScenarioResult result = sim.run();
  CHECK_FALSE(result.aborted);
  REQUIRE(result.lap_times.size() == 1);
  CHECK(result.lap_times[0] == doctest::Approx(result.racing_line_lap_time).epsilon(5e-3));
  REQUIRE(result.crossing_times.size() == 2);
  CHECK(result.crossing_times[0] == 0.0);
  // crossing interpolated inside a step, not snapped to the grid
  const double frac = result.crossing_times[1] / 0.1;
  CHECK(std::abs(frac - std::round(frac)) > 1e-6);
}

TEST_CASE("scenario abort on persistent soft fallback") {
  ScenarioConfig config = base_config();
  config.duration = 5.0;
  config.params.soft_abort_cycles = 3;
  config.params.d_s = 4.2;  // margined interval empty on a 10 m wide track
  Simulator sim(config, make_flat_circle(200.0, 10.0, 1.0), scenario_gg());
  const ScenarioResult result = sim.run();
  CHECK(result.aborted);
  CHECK(!result.abort_reason.empty());
}

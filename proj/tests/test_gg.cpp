#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "raceplan/gg_diagram.hpp"
#include "raceplan/track_presets.hpp"

using namespace raceplan;

namespace {
std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("minimal 2x2 grid loads") {
  const std::string path = temp_path("gg_2x2.csv");
  {
    std::ofstream f(path);
    f << "v,g_tilde,ax_min,ax_max,ay_max,p\n";
    f << "0,9.81,-10,4,10,1.5\n";
    f << "50,9.81,-9,4,9,1.5\n";
    f << "0,12,-12,4,12,1.5\n";
    f << "50,12,-11,4,11,1.5\n";
  }
  const GgLookup gg = GgLookup::load(path);
  CHECK(gg.v_grid().size() == 2);
  CHECK(gg.g_grid().size() == 2);
  const GgShape shape = gg.query(0.0, 9.81);
  CHECK(shape.ax_min == -10.0);
  CHECK(shape.ay_max == 10.0);
}

TEST_CASE("invalid tables rejected") {
  SUBCASE("p out of range") {
    const std::string path = temp_path("gg_bad_p.csv");
    {
      std::ofstream f(path);
      f << "v,g_tilde,ax_min,ax_max,ay_max,p\n";
      f << "0,9.81,-10,4,10,2.5\n";
      f << "50,9.81,-9,4,9,1.5\n";
      f << "0,12,-12,4,12,1.5\n";
      f << "50,12,-11,4,11,1.5\n";
    }
    CHECK_THROWS(GgLookup::load(path));
  }
  SUBCASE("missing cell") {
    const std::string path = temp_path("gg_missing.csv");
    {
      std::ofstream f(path);
      f << "v,g_tilde,ax_min,ax_max,ay_max,p\n";
      f << "0,9.81,-10,4,10,1.5\n";
      f << "50,9.81,-9,4,9,1.5\n";
      f << "0,12,-12,4,12,1.5\n";
    }
    CHECK_THROWS(GgLookup::load(path));
  }
}

TEST_CASE("synthetic table values") {
  const GgLookup gg = GgLookup::synth(1.0, 1.0, 5.0, 1.5, {0.0, 50.0}, {9.81, 12.0});
  const GgShape at_g = gg.query(25.0, 9.81);
  CHECK(at_g.ax_min == doctest::Approx(-9.81));
  CHECK(at_g.ay_max == doctest::Approx(9.81));
  CHECK(at_g.ax_max == doctest::Approx(5.0));  // drive cap active: 1.0*9.81 > 5

  const double g_banked = 9.81 * std::cos(20.0 * M_PI / 180.0);
  const GgLookup gg2 = GgLookup::synth(1.0, 1.0, 50.0, 1.5, {0.0, 50.0}, {g_banked, 12.0});
  CHECK(gg2.query(0.0, g_banked).ay_max == doctest::Approx(g_banked));
}

TEST_CASE("synth round trips through save/load bit exactly") {
  const GgLookup gg = GgLookup::synth(1.07, 1.13, 4.53, 1.73, {0.0, 17.3, 50.0},
                                      {7.77, 9.81, 14.3});
  const std::string path = temp_path("gg_roundtrip.csv");
  gg.save(path);
  const GgLookup loaded = GgLookup::load(path);
  for (double v : {0.0, 17.3, 50.0}) {
    for (double g : {7.77, 9.81, 14.3}) {
      const GgShape a = gg.query(v, g);
      const GgShape b = loaded.query(v, g);
      CHECK(a.ax_min == b.ax_min);
      CHECK(a.ax_max == b.ax_max);
      CHECK(a.ay_max == b.ay_max);
      CHECK(a.p == b.p);
    }
  }
  // second save is byte-identical
  const std::string path2 = temp_path("gg_roundtrip2.csv");
  loaded.save(path2);
  std::ifstream f1(path), f2(path2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
}

TEST_CASE("query interpolation") {
  const GgLookup gg = GgLookup::from_tables({0.0, 10.0}, {8.0, 12.0}, {-10, -10, -10, -10},
                                            {4, 4, 4, 4}, {8, 10, 8, 10}, {1.5, 1.5, 1.5, 1.5});
  SUBCASE("grid node returns stored values") {
    CHECK(gg.query(0.0, 8.0).ay_max == 8.0);
    CHECK(gg.query(10.0, 12.0).ay_max == 10.0);
  }
  SUBCASE("midpoint along g is the average") {
    CHECK(gg.query(5.0, 10.0).ay_max == doctest::Approx(9.0));
  }
  SUBCASE("clamped below the grid") {
    CHECK(gg.query(-5.0, 8.0).ay_max == 8.0);
    CHECK(gg.query(0.0, 1.0).ay_max == 8.0);
    CHECK(gg.query(1e6, 1e6).ay_max == 10.0);
  }
}

TEST_CASE("query is monotone when tables are monotone") {
  std::vector<double> v_grid{0, 20, 40, 60}, g_grid{6, 9, 12};
  std::vector<double> ax_min, ax_max, ay_max, p;
  for (std::size_t iv = 0; iv < v_grid.size(); ++iv) {
    for (std::size_t ig = 0; ig < g_grid.size(); ++ig) {
      ax_min.push_back(-1.0 * g_grid[ig] - 0.05 * v_grid[iv]);
      ax_max.push_back(2.0 + 0.01 * v_grid[iv]);
      ay_max.push_back(1.1 * g_grid[ig] + 0.02 * v_grid[iv]);
      p.push_back(1.5);
    }
  }
  const GgLookup gg = GgLookup::from_tables(v_grid, g_grid, ax_min, ax_max, ay_max, p);
  double prev = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const double g = 5.0 + 8.0 * i / 50.0;
    const double value = gg.query(30.0, g).ay_max;
    CHECK(value >= prev);
    prev = value;
  }
}

TEST_CASE("check_accel cases") {
  SUBCASE("zero lateral reduces to the ax_min bound") {
    const GgShape shape{-10, 4, 10, 1.5};
    CHECK(check_accel(shape, {-10.0, 0.0, 9.81}).ok);
    CHECK_FALSE(check_accel(shape, {-10.01, 0.0, 9.81}).ok);
  }
  SUBCASE("lateral vertex is feasible") {
    const GgShape shape{-10, 4, 10, 1.5};
    CHECK(check_accel(shape, {0.0, 10.0, 9.81}).ok);
    CHECK_FALSE(check_accel(shape, {0.0, 10.5, 9.81}).ok);
  }
  SUBCASE("p=2 ellipse arithmetic") {
    const GgShape shape{-10, 10, 10, 2.0};
    // |ax| <= 10*sqrt(1-0.36) = 8 at ay = 6
    CHECK(check_accel(shape, {-8.0, 6.0, 9.81}).ok);
    CHECK(check_accel(shape, {8.0, 6.0, 9.81}).slack_combined == doctest::Approx(0.0));
    CHECK_FALSE(check_accel(shape, {-8.01, 6.0, 9.81}).ok);
  }
  SUBCASE("drive limit is one sided") {
    const GgShape shape{-10, 4, 10, 1.5};
    CHECK_FALSE(check_accel(shape, {4.5, 0.0, 9.81}).ok);
    CHECK(check_accel(shape, {-4.5, 0.0, 9.81}).ok);
  }
}

TEST_CASE("racing line margins shrink the envelope") {
  const GgShape shape{-10, 4, 10, 1.5};
  const GgShape scaled = scale_for_racing_line(shape, 0.1, 0.8);
  CHECK(scaled.ay_max == doctest::Approx(8.2));
  CHECK(scaled.ax_min == doctest::Approx(-8.2));
  CHECK(scaled.ax_max == doctest::Approx(2.8));
  CHECK(scaled.p == shape.p);

  const GgShape identity = scale_for_racing_line(shape, 0.0, 0.0);
  CHECK(identity.ay_max == shape.ay_max);
  CHECK(identity.ax_min == shape.ax_min);

  const GgShape tiny{-0.5, 0.5, 0.5, 1.0};
  const GgShape floored = scale_for_racing_line(tiny, 0.1, 0.8);
  CHECK(floored.ay_max == doctest::Approx(0.1));

  // never enlarges
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> mgn(0.0, 0.5), abs_mgn(0.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double a = mgn(rng), b = abs_mgn(rng);
    const GgShape out = scale_for_racing_line(shape, a, b);
    CHECK(out.ay_max <= shape.ay_max);
    CHECK(std::abs(out.ax_min) <= std::abs(shape.ax_min));
    CHECK(out.ax_max <= shape.ax_max);
  }
}

TEST_CASE("apparent accelerations") {
  const TrackGeometry flat = make_straight(100.0, 10.0, 1.0);
  SUBCASE("flat track is the identity") {
    const RoadFrame f = flat.frame_at(50.0);
    const ApparentAccel a = apparent_accels(1.5, -2.0, 30.0, 0.1, f, 30.0, 0.0);
    CHECK(a.ax_tilde == doctest::Approx(1.5));
    CHECK(a.ay_tilde == doctest::Approx(-2.0));
    CHECK(a.g_tilde == doctest::Approx(9.81));
  }
  SUBCASE("banked road shifts lateral gravity") {
    std::vector<TrackSample> samples;
    const double phi = -20.0 * M_PI / 180.0;
    for (int k = 0; k <= 4; ++k) {
      TrackSample sm;
      sm.s = 10.0 * k;
      sm.position = Vec3(10.0 * k, 0, 0);
      sm.phi = phi;
      sm.n_l = 5;
      sm.n_r = -5;
      samples.push_back(sm);
    }
    const TrackGeometry banked = TrackGeometry::from_samples(std::move(samples), false);
    const RoadFrame f = banked.frame_at(20.0);
    const ApparentAccel a = apparent_accels(0.0, 0.0, 20.0, 0.0, f, 20.0, 0.0);
    CHECK(a.ax_tilde == doctest::Approx(0.0));
    CHECK(a.ay_tilde == doctest::Approx(9.81 * std::sin(phi)));
    CHECK(a.g_tilde == doctest::Approx(9.81 * std::cos(phi)));
  }
  SUBCASE("sloped road rotated by chi") {
    std::vector<TrackSample> samples;
    const double mu = 0.1;
    for (int k = 0; k <= 4; ++k) {
      TrackSample sm;
      sm.s = 10.0 * k;
      sm.position = Vec3(std::cos(mu) * 10.0 * k, 0, -std::sin(mu) * 10.0 * k);
      sm.mu = mu;
      sm.n_l = 5;
      sm.n_r = -5;
      samples.push_back(sm);
    }
    const TrackGeometry sloped = TrackGeometry::from_samples(std::move(samples), false);
    const RoadFrame f = sloped.frame_at(20.0);
    const ApparentAccel a = apparent_accels(0.0, 0.0, 20.0, M_PI / 2.0, f, 20.0, 0.0);
    CHECK(a.ax_tilde == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(a.ay_tilde == doctest::Approx(9.81 * std::sin(mu)));
  }
}

TEST_CASE("check agrees with direct scalar evaluation on random shapes") {
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> ax_min_d(-14.0, -2.0), ax_max_d(1.0, 8.0),
      ay_max_d(2.0, 14.0), p_d(1.0, 2.0), a_d(-16.0, 16.0);
  int checked = 0;
  for (int i = 0; i < 20000; ++i) {
    const GgShape shape{ax_min_d(rng), ax_max_d(rng), ay_max_d(rng), p_d(rng)};
    const ApparentAccel accel{a_d(rng), a_d(rng), 9.81};
    const AccelCheck result = check_accel(shape, accel);
    // direct reading of the three inequalities
    const bool i1 = accel.ax_tilde <= shape.ax_max;
    const bool i2 = std::abs(accel.ay_tilde) <= shape.ay_max;
    const double inner = 1.0 - std::pow(std::abs(accel.ay_tilde) / shape.ay_max, shape.p);
    const bool i3 = inner >= 0.0 &&
                    std::abs(accel.ax_tilde) <= std::abs(shape.ax_min) * std::pow(inner, 1.0 / shape.p);
    CHECK(result.ok == (i1 && i2 && i3));
    ++checked;
  }
  CHECK(checked == 20000);
}

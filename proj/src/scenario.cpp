#include "raceplan/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace raceplan {

namespace {

using nlohmann::json;

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

void parse_params(const json& j, PlannerParams& p) {
  p.horizon_T = j.value("horizon_T", p.horizon_T);
  p.n_points = j.value("n_points", p.n_points);
  p.n_sdot = j.value("n_sdot", p.n_sdot);
  p.k_sdot = j.value("k_sdot", p.k_sdot);
  p.n_n = j.value("n_n", p.n_n);
  p.s0_thr = j.value("s0_thr", p.s0_thr);
  p.d_w = j.value("d_w", p.d_w);
  p.d_s = j.value("d_s", p.d_s);
  p.kappa_max = j.value("kappa_max", p.kappa_max);
  p.d_s_rl = j.value("d_s_rl", p.d_s_rl);
  p.a_mgn = j.value("a_mgn", p.a_mgn);
  p.a_abs_mgn = j.value("a_abs_mgn", p.a_abs_mgn);
  p.w_n = j.value("w_n", p.w_n);
  p.w_v = j.value("w_v", p.w_v);
  p.w_pr = j.value("w_pr", p.w_pr);
  p.k_s = j.value("k_s", p.k_s);
  p.k_n = j.value("k_n", p.k_n);
  p.d_snr = j.value("d_snr", p.d_snr);
  p.h_rl = j.value("h_rl", p.h_rl);
  p.dt_sim = j.value("dt_sim", p.dt_sim);
  p.replan_dt = j.value("replan_dt", p.replan_dt);
  p.soft_abort_cycles = j.value("soft_abort_cycles", p.soft_abort_cycles);
  p.profiler_ds = j.value("profiler_ds", p.profiler_ds);
  p.corner_cut_gain = j.value("corner_cut_gain", p.corner_cut_gain);
  p.corner_cut_smooth = j.value("corner_cut_smooth", p.corner_cut_smooth);
}

ScenarioConfig parse(const json& j, const std::string& base_dir) {
  ScenarioConfig cfg;
  if (!j.contains("track")) throw std::runtime_error("scenario: missing 'track'");
  cfg.track_file = resolve(base_dir, j.at("track").get<std::string>());

  if (j.contains("gg")) {
    const json& gg = j.at("gg");
    if (gg.contains("file")) {
      cfg.gg_file = resolve(base_dir, gg.at("file").get<std::string>());
    } else if (gg.contains("synth")) {
      const json& s = gg.at("synth");
      auto& sp = cfg.gg_synth;
      sp.mu_x = s.value("mu_x", sp.mu_x);
      sp.mu_y = s.value("mu_y", sp.mu_y);
      sp.ax_drive_max = s.value("ax_drive_max", sp.ax_drive_max);
      sp.p = s.value("p", sp.p);
      sp.v_min = s.value("v_min", sp.v_min);
      sp.v_max = s.value("v_max", sp.v_max);
      sp.nv = s.value("nv", sp.nv);
      sp.g_min = s.value("g_min", sp.g_min);
      sp.g_max = s.value("g_max", sp.g_max);
      sp.ng = s.value("ng", sp.ng);
    } else {
      throw std::runtime_error("scenario: gg must contain 'file' or 'synth'");
    }
  }

  if (j.contains("racing_line")) {
    const json& rl = j.at("racing_line");
    const std::string mode = rl.value("mode", "offline");
    if (mode == "offline") {
      cfg.rl_mode = RacingLineMode::offline;
    } else if (mode == "online") {
      cfg.rl_mode = RacingLineMode::online;
    } else {
      throw std::runtime_error("scenario: racing_line.mode must be offline|online");
    }
    const std::string path = rl.value("path", "centerline");
    if (path == "centerline") {
      cfg.path_kind = PathKind::centerline;
    } else if (path == "corner_cut") {
      cfg.path_kind = PathKind::corner_cut;
    } else {
      throw std::runtime_error("scenario: racing_line.path must be centerline|corner_cut");
    }
    if (rl.contains("file") && !rl.at("file").is_null())
      cfg.racing_line_file = resolve(base_dir, rl.at("file").get<std::string>());
  }

  const std::string traj = j.value("trajectory_mode", "relative");
  if (traj == "relative") {
    cfg.traj_mode = TrajectoryMode::relative;
  } else if (traj == "jerk_optimal") {
    cfg.traj_mode = TrajectoryMode::jerk_optimal;
  } else {
    throw std::runtime_error("scenario: trajectory_mode must be relative|jerk_optimal");
  }

  const std::string dyn = j.value("dynamics_mode", "3d");
  if (dyn == "3d") {
    cfg.dyn_mode = DynamicsMode::full_3d;
  } else if (dyn == "2d") {
    cfg.dyn_mode = DynamicsMode::planar_2d;
  } else {
    throw std::runtime_error("scenario: dynamics_mode must be 3d|2d");
  }

  if (j.contains("params")) parse_params(j.at("params"), cfg.params);

  if (j.contains("opponents")) {
    for (const json& o : j.at("opponents")) {
      OpponentSpec spec;
      const std::string type = o.at("type").get<std::string>();
      if (type == "static") {
        spec.type = OpponentSpec::Type::static_obj;
        spec.s = o.at("s").get<double>();
        if (o.contains("n") && !o.at("n").is_null()) spec.n = o.at("n").get<double>();
      } else if (type == "path_follower") {
        spec.type = OpponentSpec::Type::path_follower;
        spec.s = o.at("start_s").get<double>();
        spec.speed_fraction = o.value("speed_fraction", spec.speed_fraction);
        if (spec.speed_fraction <= 0.0 || spec.speed_fraction >= 1.5)
          throw std::runtime_error("scenario: speed_fraction out of range");
      } else {
        throw std::runtime_error("scenario: opponent type must be static|path_follower");
      }
      cfg.opponents.push_back(spec);
    }
  }

  cfg.laps = j.value("laps", cfg.laps);
  cfg.duration = j.value("duration", cfg.duration);
  cfg.start_s = j.value("start_s", cfg.start_s);
  cfg.seed = j.value("seed", cfg.seed);

  if (cfg.laps < 1 && cfg.duration <= 0.0)
    throw std::runtime_error("scenario: need laps >= 1 or duration > 0");
  if (cfg.params.dt_sim <= 0.0) throw std::runtime_error("scenario: dt_sim must be positive");
  if (cfg.params.replan_dt < 0.0) throw std::runtime_error("scenario: replan_dt must be >= 0");
  if (cfg.gg_synth.nv < 2 || cfg.gg_synth.ng < 2)
    throw std::runtime_error("scenario: gg synth grids need at least 2 points");
  return cfg;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_string(buffer.str(), std::filesystem::path(path).parent_path().string());
}

ScenarioConfig ScenarioConfig::from_json_string(const std::string& text,
                                                const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("scenario: invalid JSON: ") + e.what());
  }
  return parse(j, base_dir);
}

}  // namespace raceplan

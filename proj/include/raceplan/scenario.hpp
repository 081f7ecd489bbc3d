#pragma once

#include <optional>
#include <string>
#include <vector>

namespace raceplan {

enum class RacingLineMode { offline, online };
enum class TrajectoryMode { jerk_optimal, relative };
enum class DynamicsMode { planar_2d, full_3d };
enum class PathKind { centerline, corner_cut };

struct GgSynthParams {
  double mu_x = 1.0;
  double mu_y = 1.0;
  double ax_drive_max = 4.5;
  double p = 1.8;
  double v_min = 0.0;
  double v_max = 60.0;
  int nv = 13;
  double g_min = 5.0;
  double g_max = 25.0;
  int ng = 11;
};

struct OpponentSpec {
  enum class Type { static_obj, path_follower };
  Type type = Type::static_obj;
  double s = 0.0;            // static: position; follower: start position on the path
  std::optional<double> n;   // static only; defaults to the racing line path offset
  double speed_fraction = 0.7;  // follower only
};

struct PlannerParams {
  double horizon_T = 3.0;
  int n_points = 30;
  int n_sdot = 40;
  double k_sdot = 1.2;
  int n_n = 15;
  double s0_thr = 0.3;
  double d_w = 1.93;
  double d_s = 0.2;
  double kappa_max = 0.1;
  double d_s_rl = 0.5;
  double a_mgn = 0.1;
  double a_abs_mgn = 0.8;
  double w_n = 0.1;
  double w_v = 100.0;
  double w_pr = 5000.0;
  double k_s = 0.015;
  double k_n = 0.5;
  double d_snr = 200.0;
  double h_rl = 500.0;
  double dt_sim = 0.1;
  double replan_dt = 0.0;  // 0 -> replan every dt_sim
  int soft_abort_cycles = 100;
  double profiler_ds = 1.0;
  double corner_cut_gain = 400.0;
  double corner_cut_smooth = 30.0;
};

struct ScenarioConfig {
  std::string track_file;
  std::string gg_file;  // empty -> synthetic table from gg_synth
  GgSynthParams gg_synth;
  std::string racing_line_file;  // optional externally computed closed line
  RacingLineMode rl_mode = RacingLineMode::offline;
  TrajectoryMode traj_mode = TrajectoryMode::relative;
  DynamicsMode dyn_mode = DynamicsMode::full_3d;
  PathKind path_kind = PathKind::centerline;
  PlannerParams params;
  std::vector<OpponentSpec> opponents;
  int laps = 1;
  double duration = 0.0;  // seconds; 0 -> run by lap count
  double start_s = 0.0;
  unsigned seed = 0;  // reserved, unused by the deterministic core

  /// Parses the JSON scenario format; file paths inside the config are
  /// resolved relative to the config file directory.
  static ScenarioConfig from_json_file(const std::string& path);
  static ScenarioConfig from_json_string(const std::string& text,
                                         const std::string& base_dir = "");
};

}  // namespace raceplan

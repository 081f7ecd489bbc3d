#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "raceplan/feasibility.hpp"
#include "raceplan/gg_diagram.hpp"
#include "raceplan/racing_line.hpp"
#include "raceplan/scenario.hpp"
#include "raceplan/selection.hpp"
#include "raceplan/track.hpp"
#include "raceplan/trajectory.hpp"

namespace raceplan {

/// Per-cycle planning record kept in the scenario result.
struct CycleLog {
  int cycle = 0;
  double t = 0.0;
  double ego_s_total = 0.0;  // unwrapped progress
  TrajectoryPoint ego;       // first point of the chosen candidate
  int chosen_index = -1;
  double chosen_cost = 0.0;
  int n_candidates = 0;
  int n_feasible = 0;
  bool soft_fallback = false;
  bool lon_jerk_switch = false;  // relative mode fell back to jerk-optimal
  bool online_clamped = false;
  double flat_ay_excess = 0.0;  // |ay_hat| minus the flat-track lateral limit
  std::vector<double> opp_rel_s;  // per opponent, signed wrapped distance to ego
  std::vector<double> opp_n;
};

struct ScenarioResult {
  std::vector<double> lap_times;
  std::vector<double> crossing_times;  // start-line crossings, including t=0
  std::vector<CycleLog> cycles;
  int soft_fallback_cycles = 0;
  bool aborted = false;
  std::string abort_reason;
  double racing_line_lap_time = 0.0;
  double sim_time = 0.0;
};

/// Deterministic opponent motion: pure function of the simulation clock.
class OpponentTrack {
 public:
  static OpponentTrack make_static(double s, double n);
  static OpponentTrack make_follower(const RacingLine& closed_line, double track_length,
                                     double start_s, double speed_fraction);

  /// (s wrapped-free progress since t=0 in its own chart, n) at clock time.
  std::pair<double, double> at(double clock) const;
  double start_s() const { return start_s_; }
  bool is_static() const { return static_; }

 private:
  bool static_ = true;
  double start_s_ = 0.0;
  double n_static_ = 0.0;
  // follower: one scaled lap starting at start_s
  std::vector<double> t_grid_;
  std::vector<double> s_grid_;  // progress from start_s over one lap
  std::vector<double> n_grid_;
  double period_ = 0.0;
  double lap_progress_ = 0.0;
};

class Simulator {
 public:
  explicit Simulator(const ScenarioConfig& config);
  Simulator(ScenarioConfig config, TrackGeometry track, GgLookup gg);

  ScenarioResult run();

  const TrackGeometry& track() const { return track_; }
  const GgLookup& gg() const { return gg_; }
  const RacingLine& offline_line() const { return *offline_line_; }
  double racing_line_lap_time() const { return offline_line_->horizon(); }
  const LateralPathFn& path() const { return path_; }

  struct PlanOutcome {
    TrajectoryCandidate chosen;
    CycleLog log;
  };

  /// One planning cycle from the current world state.
  PlanOutcome plan_cycle();

  /// Exact opponent predictions on the candidate time grid, in the chart of
  /// the current planning cycle (opponents outside d_snr filtered out).
  std::vector<OpponentPrediction> predict_opponents(double T, int n_points) const;

  /// Advances the world along the chosen trajectory by dt.
  void step(const TrajectoryCandidate& chosen, double dt);

  const VehicleState& ego() const { return ego_state_; }
  double ego_progress() const { return ego_su_; }
  double clock() const { return clock_; }
  const std::vector<OpponentTrack>& opponents() const { return opponents_; }

 private:
  void init_world();
  RacingLine build_cycle_line(bool* clamped);

  ScenarioConfig config_;
  TrackGeometry track_;
  GgLookup gg_;
  LateralPathFn path_;
  RacingLineMargins margins_;
  ProfilerConfig profiler_;
  std::shared_ptr<const RacingLine> offline_line_;
  std::vector<OpponentTrack> opponents_;

  VehicleState ego_state_;  // s wrapped into [0, s_f)
  double ego_su_ = 0.0;     // unwrapped progress
  double clock_ = 0.0;
  double exec_tau_ = 0.0;   // execution time along the current trajectory
  int cycle_ = 0;
  std::vector<double> crossings_;
};

ScenarioResult run_scenario(const ScenarioConfig& config);

/// Writes summary.json, trace.csv, opponents.csv, the plot series CSVs and
/// manifest.json into out_dir.
void write_result_files(const ScenarioResult& result, const ScenarioConfig& config,
                        const std::string& config_path, const std::string& out_dir);

}  // namespace raceplan

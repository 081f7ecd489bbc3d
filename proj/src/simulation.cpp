#include "raceplan/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "csv_util.hpp"

namespace raceplan {

namespace {

double wrapped_signed_distance(double ds, double s_f) {
  double d = std::fmod(ds, s_f);
  if (d < -s_f / 2.0) d += s_f;
  if (d >= s_f / 2.0) d -= s_f;
  return d;
}

// travel time of the closed line from s0 over the given arc length
double time_to_cover(const RacingLine& closed_line, double s0, double arc, double s_f) {
  const double T_lap = closed_line.horizon();
  const double s_base = closed_line.points().front().s;
  const double t0 = closed_line.time_at_s(s_base + s0);
  const double target = s0 + arc;
  const double laps = std::floor(target / s_f);
  const double rem = target - laps * s_f;
  const double t1 = closed_line.time_at_s(s_base + rem) + laps * T_lap;
  return t1 - t0;
}

}  // namespace

OpponentTrack OpponentTrack::make_static(double s, double n) {
  OpponentTrack o;
  o.static_ = true;
  o.start_s_ = s;
  o.n_static_ = n;
  return o;
}

OpponentTrack OpponentTrack::make_follower(const RacingLine& closed_line, double track_length,
                                           double start_s, double speed_fraction) {
  OpponentTrack o;
  o.static_ = false;
  o.start_s_ = start_s;
  const RacingLine lap = anchor_closed_line(closed_line, start_s, closed_line.horizon() + 1.0,
                                            track_length);
  // keep one lap of points, closing exactly at track_length, and dilate
  // time by 1/speed_fraction
  for (const auto& p : lap.points()) {
    const double progress = p.s - start_s;
    if (progress >= track_length) {
      const double prev_prog = o.s_grid_.back();
      const double prev_t = o.t_grid_.back() * speed_fraction;
      const double prev_n = o.n_grid_.back();
      const double alpha = (track_length - prev_prog) / (progress - prev_prog);
      o.t_grid_.push_back((prev_t + alpha * (p.t - prev_t)) / speed_fraction);
      o.s_grid_.push_back(track_length);
      o.n_grid_.push_back(prev_n + alpha * (p.n - prev_n));
      break;
    }
    o.t_grid_.push_back(p.t / speed_fraction);
    o.s_grid_.push_back(progress);
    o.n_grid_.push_back(p.n);
  }
  if (o.s_grid_.size() < 2 || o.s_grid_.back() != track_length) {
    throw std::runtime_error("opponent: follower lap construction incomplete");
  }
  o.lap_progress_ = track_length;
  o.period_ = o.t_grid_.back();
  return o;
}

std::pair<double, double> OpponentTrack::at(double clock) const {
  if (static_) return {0.0, n_static_};
  const double laps = std::floor(clock / period_);
  const double rem = clock - laps * period_;
  auto it = std::upper_bound(t_grid_.begin(), t_grid_.end(), rem);
  std::size_t hi = static_cast<std::size_t>(std::distance(t_grid_.begin(), it));
  if (hi == 0) hi = 1;
  if (hi >= t_grid_.size()) hi = t_grid_.size() - 1;
  const std::size_t lo = hi - 1;
  const double alpha = (rem - t_grid_[lo]) / (t_grid_[hi] - t_grid_[lo]);
  const double s = s_grid_[lo] + alpha * (s_grid_[hi] - s_grid_[lo]);
  const double n = n_grid_[lo] + alpha * (n_grid_[hi] - n_grid_[lo]);
  return {laps * lap_progress_ + s, n};
}

Simulator::Simulator(const ScenarioConfig& config)
    : Simulator(config, TrackGeometry::load(config.track_file),
                config.gg_file.empty()
                    ? GgLookup::synth(config.gg_synth.mu_x, config.gg_synth.mu_y,
                                      config.gg_synth.ax_drive_max, config.gg_synth.p,
                                      [&] {
                                        std::vector<double> v(static_cast<std::size_t>(config.gg_synth.nv));
                                        for (std::size_t i = 0; i < v.size(); ++i)
                                          v[i] = config.gg_synth.v_min +
                                                 (config.gg_synth.v_max - config.gg_synth.v_min) *
                                                     static_cast<double>(i) /
                                                     static_cast<double>(v.size() - 1);
                                        return v;
                                      }(),
                                      [&] {
                                        std::vector<double> g(static_cast<std::size_t>(config.gg_synth.ng));
                                        for (std::size_t i = 0; i < g.size(); ++i)
                                          g[i] = config.gg_synth.g_min +
                                                 (config.gg_synth.g_max - config.gg_synth.g_min) *
                                                     static_cast<double>(i) /
                                                     static_cast<double>(g.size() - 1);
                                        return g;
                                      }())
                    : GgLookup::load(config.gg_file)) {}

Simulator::Simulator(ScenarioConfig config, TrackGeometry track, GgLookup gg)
    : config_(std::move(config)), track_(std::move(track)), gg_(std::move(gg)) {
  if (!track_.closed()) throw std::runtime_error("simulation: requires a closed track");

  margins_.d_s_rl = config_.params.d_s_rl;
  margins_.d_w = config_.params.d_w;
  margins_.a_mgn = config_.params.a_mgn;
  margins_.a_abs_mgn = config_.params.a_abs_mgn;
  profiler_.ds = config_.params.profiler_ds;
  profiler_.kappa_max = config_.params.kappa_max;

  if (config_.path_kind == PathKind::corner_cut) {
    path_ = corner_cut_path(track_, config_.params.corner_cut_gain,
                            config_.params.corner_cut_smooth,
                            config_.params.d_w / 2.0 + config_.params.d_s_rl + 0.2);
  } else {
    path_ = centerline_path(track_);
  }

  if (!config_.racing_line_file.empty()) {
    RacingLine imported = RacingLine::load(config_.racing_line_file);
    if (std::abs(imported.s_end() - imported.s_start() - track_.length()) > 1e-3)
      throw std::runtime_error("simulation: imported racing line must cover one closed lap");
    offline_line_ = std::make_shared<RacingLine>(std::move(imported));
  } else {
    offline_line_ = std::make_shared<RacingLine>(
        offline_racing_line(track_, gg_, path_, margins_, profiler_));
  }

  for (const auto& spec : config_.opponents) {
    if (spec.type == OpponentSpec::Type::static_obj) {
      const double s = track_.wrap_s(spec.s);
      const double n = spec.n ? *spec.n : path_(s);
      opponents_.push_back(OpponentTrack::make_static(s, n));
    } else {
      opponents_.push_back(OpponentTrack::make_follower(*offline_line_, track_.length(),
                                                        track_.wrap_s(spec.s),
                                                        spec.speed_fraction));
    }
  }

  init_world();
}

void Simulator::init_world() {
  const double s0 = track_.wrap_s(config_.start_s);
  const RacingLinePoint p = offline_line_->state_at_s(offline_line_->s_start() + s0);
  ego_su_ = config_.start_s;
  ego_state_ = {s0, p.s_dot, p.s_ddot, p.n, p.n_dot, p.n_ddot};
  clock_ = 0.0;
  cycle_ = 0;
  crossings_.clear();
  if (s0 == 0.0) crossings_.push_back(0.0);
}

RacingLine Simulator::build_cycle_line(bool* clamped) {
  const auto& p = config_.params;
  if (config_.rl_mode == RacingLineMode::online) {
    OnlineRacingLineResult res =
        online_racing_line(track_, gg_, path_, ego_state_, p.h_rl, margins_, profiler_);
    if (clamped != nullptr) *clamped = res.start_speed_clamped;
    return std::move(res.line);
  }
  if (clamped != nullptr) *clamped = false;
  const double arc_needed = gg_.v_max() * p.k_sdot * p.horizon_T + 50.0;
  const double duration =
      std::max(1.5 * p.horizon_T,
               time_to_cover(*offline_line_, ego_state_.s, arc_needed, track_.length()));
  return anchor_closed_line(*offline_line_, ego_state_.s, duration, track_.length());
}

std::vector<OpponentPrediction> Simulator::predict_opponents(double T, int n_points) const {
  std::vector<OpponentPrediction> predictions;
  const double s_f = track_.length();
  for (const auto& opp : opponents_) {
    const auto [prog_now, n_now] = opp.at(clock_);
    const double s_now = track_.wrap_s(opp.start_s() + prog_now);
    const double rel = wrapped_signed_distance(s_now - ego_state_.s, s_f);
    if (std::abs(rel) > config_.params.d_snr) continue;
    OpponentPrediction pred;
    pred.s.resize(static_cast<std::size_t>(n_points));
    pred.n.resize(static_cast<std::size_t>(n_points));
    for (int k = 0; k < n_points; ++k) {
      const double tau = T * static_cast<double>(k) / static_cast<double>(n_points - 1);
      const auto [prog, n] = opp.at(clock_ + tau);
      pred.s[static_cast<std::size_t>(k)] = ego_state_.s + rel + (prog - prog_now);
      pred.n[static_cast<std::size_t>(k)] = n;
    }
    predictions.push_back(std::move(pred));
  }
  return predictions;
}

Simulator::PlanOutcome Simulator::plan_cycle() {
  exec_tau_ = 0.0;  // planning starts a new execution segment
  const auto& p = config_.params;
  bool clamped = false;
  auto rl = std::make_shared<const RacingLine>(build_cycle_line(&clamped));

  const bool relative_mode = config_.traj_mode == TrajectoryMode::relative;
  const RacingLinePoint rl0 = rl->state_at(0.0);
  const bool lon_jerk_switch =
      relative_mode && std::abs(ego_state_.s_dot - rl0.s_dot) / rl0.s_dot > p.s0_thr;

  const std::vector<LongitudinalSample> lon_samples =
      sample_longitudinal(ego_state_, *rl, p.horizon_T, p.n_sdot, p.k_sdot, p.s0_thr);

  std::vector<TrajectoryCandidate> candidates =
      generate_candidates(ego_state_, rl, lon_samples, p.horizon_T, p.s0_thr, track_, p.n_n, p.d_w,
                          p.n_points, relative_mode);

  for (auto& candidate : candidates) to_cartesian(candidate, track_);

  FeasibilityParams fp;
  fp.d_w = p.d_w;
  fp.d_s = p.d_s;
  fp.kappa_max = p.kappa_max;
  fp.flat_2d = config_.dyn_mode == DynamicsMode::planar_2d;
  const EvaluateSetResult eval = evaluate_set(candidates, track_, gg_, fp);

  // racing line reference through the same transform as the candidates
  std::vector<TrajectoryPoint> rl_reference(static_cast<std::size_t>(p.n_points));
  for (int k = 0; k < p.n_points; ++k) {
    const double t = p.horizon_T * static_cast<double>(k) / static_cast<double>(p.n_points - 1);
    const RacingLinePoint rp = rl->state_at(t);
    rl_reference[static_cast<std::size_t>(k)] =
        transform_state(track_, t, {rp.s, rp.s_dot, rp.s_ddot}, {rp.n, rp.n_dot, rp.n_ddot});
  }

  const std::vector<OpponentPrediction> predictions = predict_opponents(p.horizon_T, p.n_points);

  CostWeights weights;
  weights.w_n = p.w_n;
  weights.w_v = p.w_v;
  weights.w_pr = p.w_pr;
  weights.k_s = p.k_s;
  weights.k_n = p.k_n;
  weights.d_snr = p.d_snr;

  for (const int idx : eval.feasible) {
    auto& candidate = candidates[static_cast<std::size_t>(idx)];
    candidate.cost = total_cost(candidate, rl_reference, predictions, weights, p.horizon_T);
  }
  if (eval.feasible.empty() && eval.soft_fallback >= 0) {
    auto& fallback = candidates[static_cast<std::size_t>(eval.soft_fallback)];
    fallback.cost = total_cost(fallback, rl_reference, predictions, weights, p.horizon_T);
  }

  const SelectionResult sel = select(candidates, eval.feasible, eval.soft_fallback);
  TrajectoryCandidate chosen = candidates[static_cast<std::size_t>(sel.index)];

  CycleLog log;
  log.cycle = cycle_;
  log.t = clock_;
  log.ego_s_total = ego_su_;
  log.ego = chosen.points.front();
  log.chosen_index = sel.index;
  log.chosen_cost = chosen.cost;
  log.n_candidates = static_cast<int>(candidates.size());
  log.n_feasible = static_cast<int>(eval.feasible.size());
  log.soft_fallback = sel.used_soft_fallback;
  log.lon_jerk_switch = lon_jerk_switch;
  log.online_clamped = clamped;
  log.flat_ay_excess =
      std::abs(log.ego.ay_hat) - gg_.query(log.ego.v, kGravity).ay_max;
  const double s_f = track_.length();
  for (const auto& opp : opponents_) {
    const auto [prog, n] = opp.at(clock_);
    const double s_now = track_.wrap_s(opp.start_s() + prog);
    log.opp_rel_s.push_back(wrapped_signed_distance(s_now - ego_state_.s, s_f));
    log.opp_n.push_back(n);
  }

  return {std::move(chosen), std::move(log)};
}

void Simulator::step(const TrajectoryCandidate& chosen, double dt) {
  const double tau_prev = exec_tau_;
  exec_tau_ += dt;
  const LonState lon = chosen.lon->eval(exec_tau_);
  const LatState lat = chosen.lat->eval(exec_tau_);
  const double ds = lon.s - chosen.lon->eval(tau_prev).s;

  const double su_prev = ego_su_;
  ego_su_ += ds;
  ego_state_.s = track_.wrap_s(ego_state_.s + ds);
  ego_state_.s_dot = lon.s_dot;
  ego_state_.s_ddot = lon.s_ddot;
  ego_state_.n = lat.n;
  ego_state_.n_dot = lat.n_dot;
  ego_state_.n_ddot = lat.n_ddot;

  // start-line crossings with sub-step interpolation
  const double s_f = track_.length();
  const double k_prev = std::floor(su_prev / s_f);
  const double k_now = std::floor(ego_su_ / s_f);
  for (double k = k_prev + 1.0; k <= k_now; k += 1.0) {
    const double alpha = (k * s_f - su_prev) / (ego_su_ - su_prev);
    crossings_.push_back(clock_ + alpha * dt);
  }
  clock_ += dt;
  ++cycle_;
}

ScenarioResult Simulator::run() {
  ScenarioResult result;
  result.racing_line_lap_time = offline_line_->horizon();

  const auto& p = config_.params;
  const double replan_dt = p.replan_dt > 0.0 ? p.replan_dt : p.dt_sim;
  const int steps_per_plan = std::max(1, static_cast<int>(std::round(replan_dt / p.dt_sim)));

  const double time_cap = config_.duration > 0.0
                              ? config_.duration
                              : 6.0 * offline_line_->horizon() * static_cast<double>(config_.laps) +
                                    120.0;

  int consecutive_soft = 0;
  while (true) {
    if (config_.duration > 0.0 && clock_ >= config_.duration) break;
    if (config_.duration <= 0.0 &&
        crossings_.size() >= static_cast<std::size_t>(config_.laps) + 1)
      break;
    if (clock_ > time_cap) {
      result.aborted = true;
      result.abort_reason = "simulation time cap exceeded";
      break;
    }

    PlanOutcome outcome;
    try {
      outcome = plan_cycle();
    } catch (const std::exception& e) {
      result.aborted = true;
      result.abort_reason = e.what();
      break;
    }

    if (outcome.log.soft_fallback) {
      ++result.soft_fallback_cycles;
      ++consecutive_soft;
      if (consecutive_soft > p.soft_abort_cycles) {
        result.cycles.push_back(outcome.log);
        result.aborted = true;
        result.abort_reason = "persistent soft fallback over " +
                              std::to_string(p.soft_abort_cycles) + " cycles";
        break;
      }
    } else {
      consecutive_soft = 0;
    }
    result.cycles.push_back(outcome.log);

    for (int i = 0; i < steps_per_plan; ++i) {
      step(outcome.chosen, p.dt_sim);
    }
  }

  result.crossing_times = crossings_;
  for (std::size_t i = 1; i < crossings_.size(); ++i) {
    result.lap_times.push_back(crossings_[i] - crossings_[i - 1]);
  }
  result.sim_time = clock_;
  return result;
}

ScenarioResult run_scenario(const ScenarioConfig& config) { return Simulator(config).run(); }

namespace {

uint64_t fnv1a(const std::string& data) {
  uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "0";
  std::stringstream ss;
  ss << in.rdbuf();
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(ss.str())));
  return buf;
}

}  // namespace

void write_result_files(const ScenarioResult& result, const ScenarioConfig& config,
                        const std::string& config_path, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  std::vector<std::string> artifacts;

  {
    nlohmann::json summary;
    summary["lap_times"] = result.lap_times;
    summary["crossing_times"] = result.crossing_times;
    summary["racing_line_lap_time"] = result.racing_line_lap_time;
    summary["soft_fallback_cycles"] = result.soft_fallback_cycles;
    summary["cycles"] = result.cycles.size();
    summary["sim_time"] = result.sim_time;
    summary["aborted"] = result.aborted;
    summary["abort_reason"] = result.abort_reason;
    std::ofstream f(out / "summary.json");
    f << summary.dump(2) << "\n";
    artifacts.push_back("summary.json");
  }

  {
    std::ofstream f(out / "trace.csv");
    f << "cycle,t,s_total,s,n,s_dot,n_dot,v,chi_hat,ax_hat,ay_hat,kappa_hat,ax_tilde,ay_tilde,"
         "g_tilde,chosen_index,cost,n_candidates,n_feasible,soft_fallback,lon_jerk_switch,"
         "online_clamped,flat_ay_excess\n";
    using detail::fmt_double;
    for (const auto& c : result.cycles) {
      f << c.cycle << ',' << fmt_double(c.t) << ',' << fmt_double(c.ego_s_total) << ','
        << fmt_double(c.ego.s) << ',' << fmt_double(c.ego.n) << ',' << fmt_double(c.ego.s_dot)
        << ',' << fmt_double(c.ego.n_dot) << ',' << fmt_double(c.ego.v) << ','
        << fmt_double(c.ego.chi_hat) << ',' << fmt_double(c.ego.ax_hat) << ','
        << fmt_double(c.ego.ay_hat) << ',' << fmt_double(c.ego.kappa_hat) << ','
        << fmt_double(c.ego.ax_tilde) << ',' << fmt_double(c.ego.ay_tilde) << ','
        << fmt_double(c.ego.g_tilde) << ',' << c.chosen_index << ',' << fmt_double(c.chosen_cost)
        << ',' << c.n_candidates << ',' << c.n_feasible << ',' << (c.soft_fallback ? 1 : 0) << ','
        << (c.lon_jerk_switch ? 1 : 0) << ',' << (c.online_clamped ? 1 : 0) << ','
        << fmt_double(c.flat_ay_excess) << '\n';
    }
    artifacts.push_back("trace.csv");
  }

  {
    std::ofstream f(out / "opponents.csv");
    f << "cycle,t,opponent,rel_s,n\n";
    using detail::fmt_double;
    for (const auto& c : result.cycles) {
      for (std::size_t m = 0; m < c.opp_rel_s.size(); ++m) {
        f << c.cycle << ',' << fmt_double(c.t) << ',' << m << ',' << fmt_double(c.opp_rel_s[m])
          << ',' << fmt_double(c.opp_n[m]) << '\n';
      }
    }
    artifacts.push_back("opponents.csv");
  }

  {
    std::ofstream f(out / "plot_s_t.csv");
    f << "t,s_total\n";
    for (const auto& c : result.cycles)
      f << detail::fmt_double(c.t) << ',' << detail::fmt_double(c.ego_s_total) << '\n';
    artifacts.push_back("plot_s_t.csv");
  }
  {
    std::ofstream f(out / "plot_n_s.csv");
    f << "s,n\n";
    for (const auto& c : result.cycles)
      f << detail::fmt_double(c.ego.s) << ',' << detail::fmt_double(c.ego.n) << '\n';
    artifacts.push_back("plot_n_s.csv");
  }
  {
    std::ofstream f(out / "plot_v_t.csv");
    f << "t,v\n";
    for (const auto& c : result.cycles)
      f << detail::fmt_double(c.t) << ',' << detail::fmt_double(c.ego.v) << '\n';
    artifacts.push_back("plot_v_t.csv");
  }

  {
    nlohmann::json manifest;
    manifest["config"] = config_path;
    manifest["config_hash"] = file_hash(config_path);
    manifest["track"] = config.track_file;
    manifest["laps"] = config.laps;
    manifest["output_dir"] = out_dir;
    manifest["artifacts"] = artifacts;
    manifest["tool_version"] = "0.1.0";
    manifest["timestamp"] = static_cast<long long>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
    std::ofstream f(out / "manifest.json");
    f << manifest.dump(2) << "\n";
  }
}

}  // namespace raceplan

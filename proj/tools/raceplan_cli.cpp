#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "raceplan/scenario.hpp"
#include "raceplan/simulation.hpp"
#include "raceplan/track_presets.hpp"

namespace {

int log_level() {
  const char* env = std::getenv("RACEPLAN_LOG");
  if (env == nullptr) return 1;
  const std::string v(env);
  if (v == "quiet") return 0;
  if (v == "debug") return 2;
  return 1;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  if (!std::filesystem::exists(config_path)) {
    std::cerr << "error: config file not found: " << config_path << "\n";
    return 2;
  }
  raceplan::ScenarioConfig config;
  try {
    config = raceplan::ScenarioConfig::from_json_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (!std::filesystem::exists(config.track_file)) {
    std::cerr << "error: track file not found: " << config.track_file << "\n";
    return 2;
  }

  raceplan::ScenarioResult result;
  try {
    result = raceplan::run_scenario(config);
    raceplan::write_result_files(result, config, config_path, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  if (log_level() >= 1) {
    std::cout << "cycles: " << result.cycles.size() << ", sim time: " << result.sim_time << " s\n";
    std::cout << "racing line lap time: " << result.racing_line_lap_time << " s\n";
    for (std::size_t i = 0; i < result.lap_times.size(); ++i) {
      std::cout << "lap " << (i + 1) << ": " << result.lap_times[i] << " s\n";
    }
    std::cout << "soft fallback cycles: " << result.soft_fallback_cycles << "\n";
  }
  if (result.aborted) {
    std::cerr << "scenario aborted: " << result.abort_reason << "\n";
    return 3;
  }
  return 0;
}

int cmd_make_track(const std::string& kind, double radius, double length, double banking,
                   double slope, double width, double ds, const std::string& out_file) {
  try {
    raceplan::TrackGeometry track = [&] {
      if (kind == "straight") return raceplan::make_straight(length, width, ds);
      if (kind == "flat_circle") return raceplan::make_flat_circle(radius, width, ds);
      if (kind == "oval_banked") {
        raceplan::OvalParams params;
        params.turn_radius = radius;
        params.straight_length = length;
        params.banking_deg = banking;
        params.width = width;
        params.ds = ds;
        return raceplan::make_oval_banked(params);
      }
      if (kind == "complex_synthetic") {
        raceplan::ComplexParams params;
        params.width = width;
        params.banking_deg = banking;
        params.slope_max_deg = slope;
        params.ds = ds;
        return raceplan::make_complex_synthetic(params);
      }
      throw std::runtime_error("unknown track kind: " + kind);
    }();
    track.save(out_file);
    if (log_level() >= 1) {
      std::cout << "wrote " << out_file << " (length " << track.length() << " m, "
                << track.size() << " samples)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_compare(const std::vector<std::string>& config_paths, const std::string& out_file) {
  if (config_paths.size() < 2) {
    std::cerr << "error: compare needs at least 2 configs\n";
    return 2;
  }
  std::vector<raceplan::ScenarioConfig> configs;
  for (const auto& path : config_paths) {
    if (!std::filesystem::exists(path)) {
      std::cerr << "error: config file not found: " << path << "\n";
      return 2;
    }
    try {
      configs.push_back(raceplan::ScenarioConfig::from_json_file(path));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  for (std::size_t i = 1; i < configs.size(); ++i) {
    if (configs[i].track_file != configs[0].track_file) {
      std::cerr << "error: configs use different tracks\n";
      return 2;
    }
  }

  std::ofstream out(out_file);
  if (!out) {
    std::cerr << "error: cannot write " << out_file << "\n";
    return 1;
  }
  out << "config,lap_time,delta_to_first,soft_fallback_cycles,aborted\n";
  double first_lap = 0.0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    raceplan::ScenarioResult result;
    try {
      result = raceplan::run_scenario(configs[i]);
    } catch (const std::exception& e) {
      std::cerr << "error running " << config_paths[i] << ": " << e.what() << "\n";
      return 1;
    }
    const double lap = result.lap_times.empty() ? -1.0 : result.lap_times.front();
    if (i == 0) first_lap = lap;
    char lap_buf[32], delta_buf[32];
    std::snprintf(lap_buf, sizeof(lap_buf), "%.6f", lap);
    std::snprintf(delta_buf, sizeof(delta_buf), "%.6f", lap - first_lap);
    out << config_paths[i] << ',' << lap_buf << ',' << delta_buf << ','
        << result.soft_fallback_cycles << ',' << (result.aborted ? 1 : 0) << '\n';
    if (log_level() >= 1) {
      std::cout << config_paths[i] << ": lap " << lap << " s (delta " << (lap - first_lap)
                << " s)\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampling-based local trajectory planner for 3D race tracks"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  CLI::App* run = app.add_subcommand("run", "Run a scenario from a JSON config");
  run->add_option("--config", config_path, "scenario config file")->required();
  run->add_option("--out", out_dir, "output directory")->required();

  std::string kind = "oval_banked", out_file;
  double radius = 180.0, length = 250.0, banking = 20.0, slope = 13.0, width = 12.0, ds = 1.0;
  CLI::App* make = app.add_subcommand("make-track", "Generate a synthetic track CSV");
  make->add_option("--kind", kind, "oval_banked|complex_synthetic|flat_circle|straight")
      ->required();
  make->add_option("--radius", radius, "turn/circle radius [m]");
  make->add_option("--length", length, "straight length [m]");
  make->add_option("--banking", banking, "max banking [deg]");
  make->add_option("--slope", slope, "max slope [deg]");
  make->add_option("--width", width, "track width [m]");
  make->add_option("--ds", ds, "sample spacing [m]");
  make->add_option("--out", out_file, "output track file")->required();

  std::string configs_arg, compare_out;
  CLI::App* compare = app.add_subcommand("compare", "Run several configs and tabulate lap times");
  compare->add_option("--configs", configs_arg, "comma-separated config files")->required();
  compare->add_option("--out", compare_out, "output table file")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, out_dir);
  if (make->parsed())
    return cmd_make_track(kind, radius, length, banking, slope, width, ds, out_file);
  if (compare->parsed()) {
    std::vector<std::string> paths;
    std::string::size_type pos = 0;
    while (pos != std::string::npos) {
      const auto comma = configs_arg.find(',', pos);
      paths.push_back(configs_arg.substr(pos, comma == std::string::npos ? comma : comma - pos));
      pos = comma == std::string::npos ? comma : comma + 1;
    }
    return cmd_compare(paths, compare_out);
  }
  return 0;
}

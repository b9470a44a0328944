// Copyright 2026 The tccbf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tccbf/config_io.hpp"
#include "tccbf/metrics.hpp"
#include "tccbf/plots.hpp"
#include "tccbf/sim.hpp"

namespace {

// Stable exit codes (documented in the README).
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitOutput = 4;
constexpr int kExitTimeout = 5;

struct Overrides {
  std::optional<std::string> barrier;
  std::optional<double> alpha;
  std::optional<double> alpha_e;
  std::optional<double> alpha_t;
  std::optional<double> r_max;
  std::optional<double> safety_radius;
  std::optional<double> smoothing;
  std::optional<int> horizon;
  std::optional<double> ts;
  std::optional<double> goal_x;
  std::optional<double> max_time;
  std::optional<double> reference_speed;
  std::optional<std::string> asv_params_path;
};

void add_override_options(CLI::App* cmd, Overrides* o) {
  cmd->add_option("--alpha", o->alpha, "higher-order barrier gain");
  cmd->add_option("--alpha-e", o->alpha_e, "discrete decay of the ed barrier");
  cmd->add_option("--alpha-t", o->alpha_t, "discrete decay of the tc barrier");
  cmd->add_option("--rmax", o->r_max,
                  "max turn rate (also tightens the unicycle turn-rate bound)");
  cmd->add_option("--safety-radius", o->safety_radius, "vehicle safety radius");
  cmd->add_option("--smoothing", o->smoothing, "smooth-max sharpness");
  cmd->add_option("--horizon", o->horizon, "prediction horizon length");
  cmd->add_option("--ts", o->ts, "sampling time [s]");
  cmd->add_option("--goal", o->goal_x, "goal x position [m]");
  cmd->add_option("--max-time", o->max_time, "simulation time limit [s]");
  cmd->add_option("--speed", o->reference_speed, "reference speed [m/s]");
  cmd->add_option("--asv-params", o->asv_params_path,
                  "vessel parameter file (json)");
}

void apply_overrides(const Overrides& o, tccbf::Scenario* scenario) {
  if (o.barrier)
    scenario->barrier.kind = tccbf::barrier_kind_from_string(*o.barrier);
  if (o.alpha) scenario->barrier.alpha = *o.alpha;
  if (o.alpha_e) scenario->barrier.alpha_e = *o.alpha_e;
  if (o.alpha_t) scenario->barrier.alpha_t = *o.alpha_t;
  if (o.r_max) {
    scenario->barrier.r_max = *o.r_max;
    if (scenario->vehicle == tccbf::VehicleKind::kUnicycle) {
      scenario->mpc.input_lower[0] = -*o.r_max;
      scenario->mpc.input_upper[0] = *o.r_max;
    }
  }
  if (o.safety_radius) scenario->barrier.safety_radius = *o.safety_radius;
  if (o.smoothing) scenario->barrier.smoothing = *o.smoothing;
  if (o.horizon) scenario->mpc.horizon = *o.horizon;
  if (o.ts) scenario->mpc.ts = *o.ts;
  if (o.goal_x) scenario->goal_x = *o.goal_x;
  if (o.max_time) scenario->max_time = *o.max_time;
  if (o.reference_speed) scenario->reference_speed = *o.reference_speed;
  if (o.asv_params_path)
    scenario->asv_params = tccbf::load_asv_params(*o.asv_params_path);
  scenario->validate();
}

tccbf::Scenario resolve_scenario(const std::string& name,
                                 const std::string& config_path,
                                 const Overrides& overrides) {
  if (name.empty() == config_path.empty())
    throw std::invalid_argument(
        "exactly one of --scenario and --config must be given");
  tccbf::Scenario scenario = name.empty()
                                 ? tccbf::load_scenario_file(config_path)
                                 : tccbf::find_builtin_scenario(name);
  apply_overrides(overrides, &scenario);
  return scenario;
}

std::string default_output_dir() {
  const char* env = std::getenv("TCCBF_OUT");
  return env != nullptr && *env != '\0' ? env : ".";
}

void prepare_output_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw std::system_error(ec, "cannot create output directory '" + dir + "'");
}

std::string run_stem(const tccbf::Scenario& scenario) {
  return scenario.name + "_" + tccbf::to_string(scenario.barrier.kind);
}

void write_run_outputs(const tccbf::TrajectoryLog& log, const std::string& dir,
                       const std::string& stem, bool plots) {
  tccbf::write_file(dir + "/" + stem + ".csv", tccbf::trajectory_csv(log));
  tccbf::write_scenario_file(log.scenario, dir + "/" + stem + ".config.json");
  tccbf::write_file(dir + "/" + stem + ".metrics.csv",
                    tccbf::metrics_csv(tccbf::compute_metrics(log)));
  if (plots) tccbf::emit_plots(log, dir, stem);
}

int cmd_run(const std::string& name, const std::string& config_path,
            const Overrides& overrides, const std::string& out_dir, bool plots) {
  const tccbf::Scenario scenario = resolve_scenario(name, config_path, overrides);
  prepare_output_dir(out_dir);
  const tccbf::TrajectoryLog log = tccbf::run_scenario(scenario);
  write_run_outputs(log, out_dir, run_stem(scenario), plots);
  const tccbf::Metrics metrics = tccbf::compute_metrics(log);
  if (metrics.reached) {
    std::cout << scenario.name << " ["
              << tccbf::to_string(scenario.barrier.kind)
              << "]: t_a=" << tccbf::format_double(metrics.arrival_time)
              << " e_speed=" << tccbf::format_double(metrics.speed_error)
              << " e_cte=" << tccbf::format_double(metrics.cross_track_error)
              << " d_min=" << tccbf::format_double(metrics.min_clearance)
              << "\n";
    return kExitOk;
  }
  std::cerr << scenario.name << ": goal not reached before max_time\n";
  return kExitTimeout;
}

int cmd_compare(const std::string& name, const std::string& config_path,
                const Overrides& overrides, const std::string& barriers_csv,
                const std::string& out_dir, bool plots) {
  std::vector<std::string> kinds;
  std::stringstream splitter(barriers_csv);
  std::string token;
  while (std::getline(splitter, token, ','))
    if (!token.empty()) kinds.push_back(token);
  if (kinds.empty())
    throw std::invalid_argument("compare: no barrier kinds given");

  prepare_output_dir(out_dir);
  std::vector<tccbf::TrajectoryLog> logs;
  for (const std::string& kind : kinds) {
    Overrides per_run = overrides;
    per_run.barrier = kind;
    const tccbf::Scenario scenario =
        resolve_scenario(name, config_path, per_run);
    logs.push_back(tccbf::run_scenario(scenario));
    write_run_outputs(logs.back(), out_dir, run_stem(scenario), plots);
  }

  std::vector<std::pair<std::string, const tccbf::TrajectoryLog*>> runs;
  for (std::size_t i = 0; i < kinds.size(); ++i)
    runs.emplace_back("mpc-" + kinds[i] + "cbf", &logs[i]);
  const tccbf::ComparisonTable table = tccbf::compare(runs);
  const std::string text = tccbf::comparison_text(table);
  std::cout << text;
  const std::string base = logs.front().scenario.name;
  tccbf::write_file(out_dir + "/" + base + "_comparison.txt", text);
  tccbf::write_file(out_dir + "/" + base + "_comparison.csv",
                    tccbf::comparison_csv(table));
  return kExitOk;
}

std::vector<double> parse_grid(const std::string& csv, const char* what) {
  std::vector<double> values;
  std::stringstream splitter(csv);
  std::string token;
  while (std::getline(splitter, token, ','))
    if (!token.empty()) values.push_back(std::stod(token));
  if (values.empty())
    throw std::invalid_argument(std::string(what) + ": empty grid");
  return values;
}

int cmd_sweep(const std::string& name, const std::string& config_path,
              const Overrides& overrides, const std::string& alphas_csv,
              const std::string& decays_csv, const std::string& out_dir) {
  const tccbf::Scenario scenario = resolve_scenario(name, config_path, overrides);
  const std::vector<double> alphas = parse_grid(alphas_csv, "--alphas");
  const std::vector<double> decays = parse_grid(decays_csv, "--decays");
  prepare_output_dir(out_dir);

  const auto results = tccbf::run_parameter_sweep(scenario, alphas, decays);
  for (const tccbf::SweepResult& entry : results) {
    if (entry.failed) continue;
    std::ostringstream stem;
    stem << run_stem(scenario) << "_a" << tccbf::format_double(entry.alpha)
         << "_g" << tccbf::format_double(entry.decay);
    tccbf::write_file(out_dir + "/" + stem.str() + ".csv",
                      tccbf::trajectory_csv(entry.log));
  }
  tccbf::write_file(out_dir + "/" + run_stem(scenario) + "_sweep.csv",
                    tccbf::sweep_csv(results));
  std::cout << "sweep: " << results.size() << " runs written to " << out_dir
            << "\n";
  return kExitOk;
}

int cmd_levelset(const std::string& kinds_arg, double speed, double course,
                 double alpha, double r_max, double safety_radius,
                 double smoothing, const std::vector<double>& obstacle_spec,
                 double halfwidth, double halfheight, double resolution,
                 const std::string& out_dir) {
  tccbf::BarrierConfig cfg;
  cfg.alpha = alpha;
  cfg.r_max = r_max;
  cfg.safety_radius = safety_radius;
  cfg.smoothing = smoothing;
  cfg.validate();
  if (obstacle_spec.size() != 3)
    throw std::invalid_argument("--obstacle expects x,y,radius");
  tccbf::Obstacle obs{obstacle_spec[0], obstacle_spec[1], obstacle_spec[2], 0.0,
                      0.0};
  if (!(obs.radius > 0.0))
    throw std::invalid_argument("obstacle radius must be positive");

  std::vector<tccbf::BarrierKind> kinds;
  if (kinds_arg == "both")
    kinds = {tccbf::BarrierKind::kEuclidean, tccbf::BarrierKind::kTurningCircle};
  else
    kinds = {tccbf::barrier_kind_from_string(kinds_arg)};

  tccbf::GridSpec spec;
  spec.x_min = obs.x - halfwidth;
  spec.x_max = obs.x + halfwidth;
  spec.y_min = obs.y - halfheight;
  spec.y_max = obs.y + halfheight;
  spec.resolution = resolution;

  prepare_output_dir(out_dir);
  for (tccbf::BarrierKind kind : kinds) {
    cfg.kind = kind;
    const tccbf::LevelSetGrid grid =
        tccbf::level_set_grid(kind, cfg, obs, course, speed, spec);
    const std::string stem = out_dir + "/levelset_" + tccbf::to_string(kind);
    tccbf::write_file(stem + ".csv", tccbf::levelset_csv(grid));
    tccbf::emit_levelset_plot(grid, stem + ".svg");
    std::cout << "levelset " << tccbf::to_string(kind)
              << ": perpendicular extent of restricted region = "
              << tccbf::format_double(grid.restricted_extent_perpendicular())
              << " m\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"turning-circle and euclidean-distance CBF collision avoidance "
               "inside a nonlinear MPC"};
  app.require_subcommand(1);

  std::string scenario_name, config_path;
  std::string out_dir = default_output_dir();
  bool plots = false;
  Overrides overrides;

  CLI::App* run = app.add_subcommand("run", "run one closed-loop scenario");
  run->add_option("--scenario", scenario_name, "builtin scenario name");
  run->add_option("--config", config_path, "scenario config file (json)");
  run->add_option("--barrier", overrides.barrier, "barrier kind: ed, tc, dc");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--plots", plots, "emit svg figures");
  add_override_options(run, &overrides);

  std::string barriers_csv = "ed,tc";
  CLI::App* cmp = app.add_subcommand(
      "compare", "run one scenario under several barrier kinds");
  cmp->add_option("--scenario", scenario_name, "builtin scenario name");
  cmp->add_option("--config", config_path, "scenario config file (json)");
  cmp->add_option("--barriers", barriers_csv, "comma list of kinds (ed,tc,dc)");
  cmp->add_option("--out", out_dir, "output directory");
  cmp->add_flag("--plots", plots, "emit svg figures");
  add_override_options(cmp, &overrides);

  std::string alphas_csv = "0.25,0.5,1.0";
  std::string decays_csv = "0.03,0.05,0.07";
  CLI::App* sweep =
      app.add_subcommand("sweep", "grid over alpha and the discrete decay");
  sweep->add_option("--scenario", scenario_name, "builtin scenario name");
  sweep->add_option("--config", config_path, "scenario config file (json)");
  sweep->add_option("--barrier", overrides.barrier, "barrier kind: ed or tc");
  sweep->add_option("--alphas", alphas_csv, "comma list of alpha values");
  sweep->add_option("--decays", decays_csv, "comma list of decay values");
  sweep->add_option("--out", out_dir, "output directory");
  add_override_options(sweep, &overrides);

  std::string ls_kind = "both";
  double ls_speed = 1.5, ls_course = 0.0, ls_alpha = 0.5, ls_rmax = 0.3;
  double ls_safety = 0.5, ls_smoothing = 5.0;
  std::vector<double> ls_obstacle{15.0, 0.0, 2.0};
  double ls_halfwidth = 12.0, ls_halfheight = 10.0, ls_resolution = 0.1;
  CLI::App* levelset =
      app.add_subcommand("levelset", "emit barrier level-set grids");
  levelset->add_option("--kind", ls_kind, "ed, tc, or both");
  levelset->add_option("--speed", ls_speed, "vehicle speed [m/s]");
  levelset->add_option("--course", ls_course, "vehicle course [rad]");
  levelset->add_option("--alpha", ls_alpha, "higher-order barrier gain");
  levelset->add_option("--rmax", ls_rmax, "max turn rate [rad/s]");
  levelset->add_option("--safety-radius", ls_safety, "vehicle safety radius");
  levelset->add_option("--smoothing", ls_smoothing, "smooth-max sharpness");
  levelset->add_option("--obstacle", ls_obstacle, "obstacle as x y radius")
      ->expected(3);
  levelset->add_option("--halfwidth", ls_halfwidth, "grid half width [m]");
  levelset->add_option("--halfheight", ls_halfheight, "grid half height [m]");
  levelset->add_option("--resolution", ls_resolution, "grid spacing [m]");
  levelset->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed())
      return cmd_run(scenario_name, config_path, overrides, out_dir, plots);
    if (cmp->parsed())
      return cmd_compare(scenario_name, config_path, overrides, barriers_csv,
                         out_dir, plots);
    if (sweep->parsed())
      return cmd_sweep(scenario_name, config_path, overrides, alphas_csv,
                       decays_csv, out_dir);
    if (levelset->parsed())
      return cmd_levelset(ls_kind, ls_speed, ls_course, ls_alpha, ls_rmax,
                          ls_safety, ls_smoothing, ls_obstacle, ls_halfwidth,
                          ls_halfheight, ls_resolution, out_dir);
  } catch (const tccbf::SimulationError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::system_error& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kExitOutput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

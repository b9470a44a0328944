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

#include "tccbf/config_io.hpp"

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "tccbf/metrics.hpp"

namespace tccbf {

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buffer, end);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream content;
  content << in.rdbuf();
  return content.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

namespace {

using nlohmann::json;

void require_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                  const std::string& context) {
  if (!obj.is_object())
    throw std::invalid_argument(context + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (std::string_view candidate : allowed)
      if (key == candidate) {
        known = true;
        break;
      }
    if (!known)
      throw std::invalid_argument(context + ": unknown key '" + key + "'");
  }
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& context) {
  if (!j.is_array())
    throw std::invalid_argument(context + ": expected an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Obstacle obstacle_from_json(const json& j) {
  require_keys(j, {"x", "y", "radius", "vx", "vy"}, "obstacle");
  Obstacle obs;
  obs.x = j.at("x").get<double>();
  obs.y = j.at("y").get<double>();
  obs.radius = j.at("radius").get<double>();
  obs.vx = j.value("vx", 0.0);
  obs.vy = j.value("vy", 0.0);
  return obs;
}

json obstacle_to_json(const Obstacle& obs) {
  return json{{"x", obs.x},
              {"y", obs.y},
              {"radius", obs.radius},
              {"vx", obs.vx},
              {"vy", obs.vy}};
}

BarrierConfig barrier_from_json(const json& j) {
  require_keys(j,
               {"kind", "alpha", "alpha_e", "alpha_t", "r_max", "safety_radius",
                "smoothing"},
               "barrier");
  BarrierConfig cfg;
  cfg.kind = barrier_kind_from_string(j.at("kind").get<std::string>());
  cfg.alpha = j.at("alpha").get<double>();
  cfg.alpha_e = j.at("alpha_e").get<double>();
  cfg.alpha_t = j.at("alpha_t").get<double>();
  cfg.r_max = j.at("r_max").get<double>();
  cfg.safety_radius = j.at("safety_radius").get<double>();
  cfg.smoothing = j.at("smoothing").get<double>();
  return cfg;
}

json barrier_to_json(const BarrierConfig& cfg) {
  return json{{"kind", to_string(cfg.kind)},
              {"alpha", cfg.alpha},
              {"alpha_e", cfg.alpha_e},
              {"alpha_t", cfg.alpha_t},
              {"r_max", cfg.r_max},
              {"safety_radius", cfg.safety_radius},
              {"smoothing", cfg.smoothing}};
}

MpcConfig mpc_from_json(const json& j) {
  require_keys(j,
               {"horizon", "ts", "q", "r", "rd", "p", "input_lower",
                "input_upper", "solver"},
               "mpc");
  MpcConfig mpc;
  mpc.horizon = j.at("horizon").get<int>();
  mpc.ts = j.at("ts").get<double>();
  mpc.state_weights = vector_from_json(j.at("q"), "mpc.q");
  mpc.input_weights = vector_from_json(j.at("r"), "mpc.r");
  mpc.input_rate_weights = vector_from_json(j.at("rd"), "mpc.rd");
  mpc.terminal_weights = vector_from_json(j.at("p"), "mpc.p");
  mpc.input_lower = vector_from_json(j.at("input_lower"), "mpc.input_lower");
  mpc.input_upper = vector_from_json(j.at("input_upper"), "mpc.input_upper");
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    require_keys(s,
                 {"max_sqp_iters", "kkt_tol", "slack_penalty",
                  "line_search_shrink", "max_line_search"},
                 "mpc.solver");
    mpc.solver.max_sqp_iters = s.value("max_sqp_iters", mpc.solver.max_sqp_iters);
    mpc.solver.kkt_tol = s.value("kkt_tol", mpc.solver.kkt_tol);
    mpc.solver.slack_penalty = s.value("slack_penalty", mpc.solver.slack_penalty);
    mpc.solver.line_search_shrink =
        s.value("line_search_shrink", mpc.solver.line_search_shrink);
    mpc.solver.max_line_search =
        s.value("max_line_search", mpc.solver.max_line_search);
  }
  return mpc;
}

json mpc_to_json(const MpcConfig& mpc) {
  return json{{"horizon", mpc.horizon},
              {"ts", mpc.ts},
              {"q", vector_to_json(mpc.state_weights)},
              {"r", vector_to_json(mpc.input_weights)},
              {"rd", vector_to_json(mpc.input_rate_weights)},
              {"p", vector_to_json(mpc.terminal_weights)},
              {"input_lower", vector_to_json(mpc.input_lower)},
              {"input_upper", vector_to_json(mpc.input_upper)},
              {"solver",
               json{{"max_sqp_iters", mpc.solver.max_sqp_iters},
                    {"kkt_tol", mpc.solver.kkt_tol},
                    {"slack_penalty", mpc.solver.slack_penalty},
                    {"line_search_shrink", mpc.solver.line_search_shrink},
                    {"max_line_search", mpc.solver.max_line_search}}}};
}

}  // namespace

nlohmann::json asv_params_to_json(const AsvParams& p) {
  return json{{"m11", p.m11},  {"m22", p.m22},   {"m33", p.m33},
              {"X_u", p.X_u},  {"X_uu", p.X_uu}, {"Y_v", p.Y_v},
              {"Y_vv", p.Y_vv}, {"Y_r", p.Y_r},  {"N_v", p.N_v},
              {"N_r", p.N_r},  {"N_rrr", p.N_rrr}, {"l", p.l}};
}

AsvParams asv_params_from_json(const nlohmann::json& j) {
  require_keys(j,
               {"m11", "m22", "m33", "X_u", "X_uu", "Y_v", "Y_vv", "Y_r", "N_v",
                "N_r", "N_rrr", "l"},
               "asv_params");
  AsvParams p;
  p.m11 = j.at("m11").get<double>();
  p.m22 = j.at("m22").get<double>();
  p.m33 = j.at("m33").get<double>();
  p.X_u = j.at("X_u").get<double>();
  p.X_uu = j.at("X_uu").get<double>();
  p.Y_v = j.at("Y_v").get<double>();
  p.Y_vv = j.at("Y_vv").get<double>();
  p.Y_r = j.at("Y_r").get<double>();
  p.N_v = j.at("N_v").get<double>();
  p.N_r = j.at("N_r").get<double>();
  p.N_rrr = j.at("N_rrr").get<double>();
  p.l = j.at("l").get<double>();
  p.validate();
  return p;
}

AsvParams load_asv_params(const std::string& path) {
  return asv_params_from_json(json::parse(read_file(path)));
}

nlohmann::json scenario_to_json(const Scenario& scenario) {
  json j{{"name", scenario.name},
         {"vehicle", to_string(scenario.vehicle)},
         {"path", "straight-x"},
         {"initial_state", vector_to_json(scenario.initial_state)},
         {"previous_input", vector_to_json(scenario.previous_input)},
         {"goal_x", scenario.goal_x},
         {"reference_speed", scenario.reference_speed},
         {"max_time", scenario.max_time},
         {"barrier", barrier_to_json(scenario.barrier)},
         {"mpc", mpc_to_json(scenario.mpc)}};
  json obstacles = json::array();
  for (const Obstacle& obs : scenario.obstacles)
    obstacles.push_back(obstacle_to_json(obs));
  j["obstacles"] = obstacles;
  if (scenario.vehicle == VehicleKind::kAsv)
    j["asv_params"] = asv_params_to_json(scenario.asv_params);
  return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  require_keys(j,
               {"name", "vehicle", "path", "initial_state", "previous_input",
                "goal_x", "reference_speed", "max_time", "obstacles", "barrier",
                "mpc", "asv_params"},
               "scenario");
  Scenario s;
  s.name = j.at("name").get<std::string>();
  s.vehicle = vehicle_kind_from_string(j.at("vehicle").get<std::string>());
  const std::string path = j.value("path", std::string("straight-x"));
  if (path != "straight-x")
    throw std::invalid_argument(
        "scenario: only the straight-x reference path is supported");
  s.initial_state = vector_from_json(j.at("initial_state"), "initial_state");
  s.previous_input = vector_from_json(j.at("previous_input"), "previous_input");
  s.goal_x = j.at("goal_x").get<double>();
  s.reference_speed = j.at("reference_speed").get<double>();
  s.max_time = j.at("max_time").get<double>();
  if (j.contains("obstacles"))
    for (const json& obs : j.at("obstacles"))
      s.obstacles.push_back(obstacle_from_json(obs));
  s.barrier = barrier_from_json(j.at("barrier"));
  s.mpc = mpc_from_json(j.at("mpc"));
  if (s.vehicle == VehicleKind::kAsv) {
    if (!j.contains("asv_params"))
      throw std::invalid_argument("scenario: asv vehicle requires asv_params");
    s.asv_params = asv_params_from_json(j.at("asv_params"));
  } else if (j.contains("asv_params")) {
    throw std::invalid_argument("scenario: asv_params given for a unicycle");
  }
  s.validate();
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  return scenario_from_json(json::parse(read_file(path)));
}

void write_scenario_file(const Scenario& scenario, const std::string& path) {
  write_file(path, scenario_to_json(scenario).dump(2) + "\n");
}

std::string trajectory_csv(const TrajectoryLog& log) {
  std::ostringstream out;
  const bool asv = log.scenario.vehicle == VehicleKind::kAsv;
  if (asv)
    out << "t,x,y,psi,u,v,r,cmd_thrust_left,cmd_thrust_right,";
  else
    out << "t,x,y,psi,u,cmd_turn_rate,cmd_accel,";
  out << "h_ed,h_tc,h_dc,obstacle_clearance,solver_status,sqp_iterations,"
         "kkt_residual,max_slack\n";
  for (const StepRecord& rec : log.steps) {
    out << format_double(rec.t);
    for (Eigen::Index i = 0; i < rec.state.size(); ++i)
      out << ',' << format_double(rec.state[i]);
    for (Eigen::Index i = 0; i < rec.input.size(); ++i)
      out << ',' << format_double(rec.input[i]);
    out << ',' << format_double(rec.h_ed) << ',' << format_double(rec.h_tc)
        << ',' << format_double(rec.h_dc) << ','
        << format_double(rec.obstacle_clearance) << ',' << to_string(rec.status)
        << ',' << rec.sqp_iterations << ',' << format_double(rec.kkt_residual)
        << ',' << format_double(rec.max_slack) << "\n";
  }
  return out.str();
}

std::string sweep_csv(const std::vector<SweepResult>& results) {
  std::ostringstream out;
  out << "alpha,decay,failed,reached,arrival_time,speed_error,"
         "cross_track_error,min_clearance,worst_slack\n";
  for (const SweepResult& entry : results) {
    double worst_slack = 0.0;
    for (const StepRecord& rec : entry.log.steps)
      worst_slack = std::max(worst_slack, rec.max_slack);
    out << format_double(entry.alpha) << ',' << format_double(entry.decay) << ','
        << (entry.failed ? 1 : 0) << ',';
    if (!entry.failed && !entry.log.steps.empty()) {
      const Metrics m = compute_metrics(entry.log);
      out << (m.reached ? 1 : 0) << ',' << format_double(m.arrival_time) << ','
          << format_double(m.speed_error) << ','
          << format_double(m.cross_track_error) << ','
          << format_double(m.min_clearance) << ',' << format_double(worst_slack);
    } else {
      out << "0,nan,nan,nan,nan," << format_double(worst_slack);
    }
    out << "\n";
  }
  return out.str();
}

std::string levelset_csv(const LevelSetGrid& grid) {
  std::ostringstream out;
  out << "# kind=" << to_string(grid.kind)
      << " course=" << format_double(grid.course)
      << " speed=" << format_double(grid.speed)
      << " alpha=" << format_double(grid.config.alpha)
      << " r_max=" << format_double(grid.config.r_max)
      << " safety_radius=" << format_double(grid.config.safety_radius)
      << " smoothing=" << format_double(grid.config.smoothing)
      << " obstacle=" << format_double(grid.obstacle.x) << ','
      << format_double(grid.obstacle.y) << ','
      << format_double(grid.obstacle.radius) << "\n";
  out << "x,y,value\n";
  for (std::size_t i = 0; i < grid.ys.size(); ++i)
    for (std::size_t j = 0; j < grid.xs.size(); ++j)
      out << format_double(grid.xs[j]) << ',' << format_double(grid.ys[i]) << ','
          << format_double(grid.values(static_cast<Eigen::Index>(i),
                                       static_cast<Eigen::Index>(j)))
          << "\n";
  return out.str();
}

}  // namespace tccbf

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

#ifndef TCCBF_SIM_HPP
#define TCCBF_SIM_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "tccbf/nmpc.hpp"

namespace tccbf {

enum class VehicleKind { kUnicycle, kAsv };

std::string to_string(VehicleKind kind);
VehicleKind vehicle_kind_from_string(const std::string& name);

/// A closed-loop run: straight reference path along the x axis, termination
/// at the goal x position or at the time limit.
struct Scenario {
  std::string name;
  VehicleKind vehicle = VehicleKind::kUnicycle;
  Eigen::VectorXd initial_state;
  Eigen::VectorXd previous_input;
  double goal_x = 40.0;
  double reference_speed = 2.0;
  double max_time = 60.0;
  std::vector<Obstacle> obstacles;
  BarrierConfig barrier;
  MpcConfig mpc;
  AsvParams asv_params;  ///< used when vehicle == kAsv

  void validate() const;
};

/// One logged control step. The final record of a run carries the terminal
/// state with zero input and no solver diagnostics (iterations 0).
struct StepRecord {
  double t = 0.0;
  Eigen::VectorXd state;
  Eigen::VectorXd input;
  double h_ed = 0.0;  ///< min over obstacles, +inf when there are none
  double h_tc = 0.0;
  double h_dc = 0.0;
  double obstacle_clearance = 0.0;  ///< min distance to an obstacle boundary
  SolveStatus status = SolveStatus::kConverged;
  int sqp_iterations = 0;
  double kkt_residual = 0.0;
  double max_slack = 0.0;
};

struct TrajectoryLog {
  Scenario scenario;
  std::vector<StepRecord> steps;
  bool reached_goal = false;
  bool timed_out = false;
};

/// Thrown when a solve fails mid-run; carries the partial log.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, TrajectoryLog partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const TrajectoryLog& partial_log() const { return partial_; }

 private:
  TrajectoryLog partial_;
};

std::unique_ptr<DynamicsModel> make_model(const Scenario& scenario);

/// The stock scenario catalog: unicycle-{static,headon,overtaking} and
/// asv-{static,headon,overtaking}.
std::vector<Scenario> builtin_scenarios();

/// Looks a scenario up by name; throws std::invalid_argument when unknown.
Scenario find_builtin_scenario(const std::string& name);

/// Obstacle positions advanced to time t along their constant velocities.
std::vector<Obstacle> propagate_obstacles(const std::vector<Obstacle>& obstacles,
                                          double t);

/// Receding-horizon closed loop: solve, apply the first input, integrate one
/// step, repeat. The plant uses the same discretized dynamics as the
/// controller.
TrajectoryLog run_scenario(const Scenario& scenario);

struct SweepResult {
  double alpha = 0.0;
  double decay = 0.0;
  bool failed = false;
  std::string error;
  TrajectoryLog log;
};

/// Independent runs over the (alpha, decay) grid in deterministic row-major
/// order. The decay value lands on alpha_e or alpha_t according to the
/// scenario's barrier kind. Individual failures are recorded and the sweep
/// continues.
std::vector<SweepResult> run_parameter_sweep(const Scenario& scenario,
                                             const std::vector<double>& alphas,
                                             const std::vector<double>& decays);

}  // namespace tccbf

#endif  // TCCBF_SIM_HPP

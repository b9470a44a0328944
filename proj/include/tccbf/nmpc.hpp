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

#ifndef TCCBF_NMPC_HPP
#define TCCBF_NMPC_HPP

#include <Eigen/Dense>
#include <vector>

#include "tccbf/barrier.hpp"
#include "tccbf/models.hpp"

namespace tccbf {

struct SolverSettings {
  int max_sqp_iters = 50;
  double kkt_tol = 1e-6;
  double slack_penalty = 1e4;      ///< L1 penalty on constraint slacks
  double line_search_shrink = 0.5;
  int max_line_search = 25;
};

/// Finite-horizon tracking problem weights and limits. All weight vectors are
/// diagonals; the input-rate weight applies to (u_i - u_{i-1}) / ts.
struct MpcConfig {
  int horizon = 10;  ///< N
  double ts = 0.1;   ///< sampling time [s]
  Eigen::VectorXd state_weights;           ///< Q, length = state dim
  Eigen::VectorXd input_weights;           ///< R, length = input dim
  Eigen::VectorXd input_rate_weights;      ///< Rd, length = input dim
  Eigen::VectorXd terminal_weights;        ///< P, length = state dim
  Eigen::VectorXd input_lower;
  Eigen::VectorXd input_upper;
  SolverSettings solver;

  void validate(int state_dim, int input_dim) const;
};

/// One shooting problem instance: initial condition, the previously applied
/// input (anchors the first input-rate term), reference and obstacle
/// snapshots per prediction step, and the barrier mode.
struct OcpProblem {
  Eigen::VectorXd initial_state;
  Eigen::VectorXd previous_input;
  std::vector<Eigen::VectorXd> reference;           ///< N+1 entries
  std::vector<std::vector<Obstacle>> obstacles;     ///< N+1 snapshots
  BarrierConfig barrier;
  const DynamicsModel* model = nullptr;
};

enum class SolveStatus {
  kConverged,
  kMaxIterations,
  kDegradedFeasibility,  ///< finished with constraint slack above 1e-6
};

std::string to_string(SolveStatus status);

/// Per-iteration trace of the accepted step (merit is the L1 exact-penalty
/// function under the penalty weight current at that iteration).
struct SqpIterate {
  double merit_before = 0.0;
  double merit_after = 0.0;
  double step_length = 0.0;
};

struct SolverResult {
  std::vector<Eigen::VectorXd> states;  ///< N+1, rolled out under `inputs`
  std::vector<Eigen::VectorXd> inputs;  ///< N
  SolveStatus status = SolveStatus::kMaxIterations;
  double kkt_residual = 0.0;
  int sqp_iterations = 0;
  double max_slack = 0.0;
  std::vector<SqpIterate> iterates;
};

struct WarmStart {
  std::vector<Eigen::VectorXd> states;  ///< N+1
  std::vector<Eigen::VectorXd> inputs;  ///< N
};

/// Constant straight-line reference (y = 0, heading = 0, speed = u_r, all
/// other components zero) repeated over the horizon. The along-track position
/// entry is meant to carry zero weight. Supports the 4-state unicycle and the
/// 6-state vessel layouts only.
std::vector<Eigen::VectorXd> build_reference(int state_dim,
                                             double reference_speed,
                                             int horizon);

/// Stage-summed tracking cost of a candidate trajectory (no slack penalty).
double evaluate_cost(const OcpProblem& problem, const MpcConfig& config,
                     const std::vector<Eigen::VectorXd>& states,
                     const std::vector<Eigen::VectorXd>& inputs);

/// Analytic gradient of evaluate_cost w.r.t. every state and input.
void cost_gradient(const OcpProblem& problem, const MpcConfig& config,
                   const std::vector<Eigen::VectorXd>& states,
                   const std::vector<Eigen::VectorXd>& inputs,
                   std::vector<Eigen::VectorXd>* grad_states,
                   std::vector<Eigen::VectorXd>* grad_inputs);

/// Dimensions of the transcribed NLP.
struct TranscriptionInfo {
  int decision_variables = 0;  ///< states + inputs + slacks
  int equality_rows = 0;       ///< initial condition + shooting gaps
  int barrier_rows = 0;        ///< one slack each
};

TranscriptionInfo transcription_info(const OcpProblem& problem,
                                     const MpcConfig& config);

/// Zero inputs with states forward-simulated from the initial condition.
WarmStart cold_start(const OcpProblem& problem, const MpcConfig& config);

/// Receding-horizon shift: drop the first stage, duplicate the last input,
/// and integrate the terminal state once.
WarmStart shift_warm_start(const SolverResult& previous,
                           const DynamicsModel& model, double ts);

/// Direct multiple-shooting transcription solved by Gauss-Newton SQP with an
/// L1 merit line search; barrier rows are softened by L1-penalized slacks.
/// Deterministic: identical problem and warm start give identical results.
class NmpcSolver {
 public:
  explicit NmpcSolver(MpcConfig config);

  SolverResult solve(const OcpProblem& problem) const;
  SolverResult solve(const OcpProblem& problem, const WarmStart& warm) const;

  const MpcConfig& config() const { return config_; }

 private:
  MpcConfig config_;
};

}  // namespace tccbf

#endif  // TCCBF_NMPC_HPP

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

#include "tccbf/nmpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tccbf/qp.hpp"

namespace tccbf {

namespace {

constexpr int kHeadingIndex = 2;  // heading component in both state layouts
constexpr double kSlackSnap = 1e-12;
constexpr double kBaseRegularization = 1e-8;

// State error with the heading difference wrapped to (-pi, pi].
Eigen::VectorXd state_error(const Eigen::VectorXd& state,
                            const Eigen::VectorXd& reference) {
  Eigen::VectorXd e = state - reference;
  e[kHeadingIndex] = wrap_angle(e[kHeadingIndex]);
  return e;
}

void ensure_finite(const Eigen::VectorXd& v, const char* what, int stage) {
  if (v.allFinite()) return;
  std::ostringstream msg;
  msg << "numerical failure: non-finite " << what << " at stage " << stage
      << "; iterate dump:";
  for (int i = 0; i < v.size(); ++i) msg << ' ' << v[i];
  throw std::runtime_error(msg.str());
}

// One linearized barrier row: residual value (without slack) and its
// gradients w.r.t. the stage state(s) it touches.
struct BarrierRow {
  int stage = 0;
  bool coupled = false;  // involves x_{stage+1} as well
  double value = 0.0;
  Eigen::VectorXd grad_now;
  Eigen::VectorXd grad_next;
};

struct Iterate {
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> inputs;
  Eigen::VectorXd slacks;
};

struct Linearization {
  double cost = 0.0;
  std::vector<Eigen::MatrixXd> a;        // N discrete state Jacobians
  std::vector<Eigen::MatrixXd> b;        // N discrete input Jacobians
  std::vector<Eigen::VectorXd> defects;  // N shooting gaps f_d(x_i,u_i) - x_{i+1}
  Eigen::VectorXd init_defect;
  std::vector<Eigen::VectorXd> grad_x;   // N+1
  std::vector<Eigen::VectorXd> grad_u;   // N
  std::vector<BarrierRow> rows;
};

struct Multipliers {
  Eigen::VectorXd rows;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd slack_nonneg;
};

int barrier_row_count(const OcpProblem& problem, int horizon) {
  std::size_t per_step = 0;
  for (const auto& snapshot : problem.obstacles) {
    per_step = snapshot.size();
    break;
  }
  if (problem.obstacles.empty()) return 0;
  const int num_obstacles = static_cast<int>(per_step);
  if (num_obstacles == 0) return 0;
  const int stages = problem.barrier.kind == BarrierKind::kDistance
                         ? horizon + 1
                         : horizon;
  return stages * num_obstacles;
}

// Residual of every barrier row at a candidate trajectory (values only).
Eigen::VectorXd row_values(const OcpProblem& problem, int horizon,
                           const std::vector<Eigen::VectorXd>& states) {
  const int count = barrier_row_count(problem, horizon);
  Eigen::VectorXd values(count);
  if (count == 0) return values;
  const BarrierConfig& cfg = problem.barrier;
  const int num_obstacles = static_cast<int>(problem.obstacles.front().size());
  int idx = 0;
  if (cfg.kind == BarrierKind::kDistance) {
    for (int i = 0; i <= horizon; ++i) {
      const PlanarKinematicPose pose = problem.model->pose_of(states[i]);
      for (int o = 0; o < num_obstacles; ++o)
        values[idx++] = euclid_h(pose, problem.obstacles[i][o], cfg);
    }
  } else {
    const double keep = 1.0 - cfg.decay();
    for (int i = 0; i < horizon; ++i) {
      const PlanarKinematicPose pose_now = problem.model->pose_of(states[i]);
      const PlanarKinematicPose pose_next = problem.model->pose_of(states[i + 1]);
      for (int o = 0; o < num_obstacles; ++o) {
        const double h_now = barrier_value_clamped(cfg.kind, pose_now,
                                                   problem.obstacles[i][o], cfg);
        const double h_next = barrier_value_clamped(
            cfg.kind, pose_next, problem.obstacles[i + 1][o], cfg);
        values[idx++] = h_next - keep * h_now;
      }
    }
  }
  return values;
}

void validate_problem(const OcpProblem& problem, const MpcConfig& config) {
  if (problem.model == nullptr)
    throw std::invalid_argument("ocp: model must be set");
  const int nx = problem.model->state_dim();
  const int nu = problem.model->input_dim();
  config.validate(nx, nu);
  problem.barrier.validate();
  if (problem.initial_state.size() != nx)
    throw std::invalid_argument("ocp: initial state has wrong dimension");
  if (problem.previous_input.size() != nu)
    throw std::invalid_argument("ocp: previous input has wrong dimension");
  if (static_cast<int>(problem.reference.size()) != config.horizon + 1)
    throw std::invalid_argument("ocp: reference must have horizon+1 entries");
  for (const auto& r : problem.reference)
    if (r.size() != nx)
      throw std::invalid_argument("ocp: reference entry has wrong dimension");
  if (!problem.obstacles.empty()) {
    if (static_cast<int>(problem.obstacles.size()) != config.horizon + 1)
      throw std::invalid_argument(
          "ocp: obstacle extrapolation must have horizon+1 snapshots");
    const std::size_t count = problem.obstacles.front().size();
    for (const auto& snapshot : problem.obstacles)
      if (snapshot.size() != count)
        throw std::invalid_argument("ocp: obstacle snapshots differ in size");
  }
}

}  // namespace

void MpcConfig::validate(int state_dim, int input_dim) const {
  if (horizon < 1) throw std::invalid_argument("mpc: horizon must be >= 1");
  if (!(ts > 0.0)) throw std::invalid_argument("mpc: ts must be > 0");
  const auto check_weights = [&](const Eigen::VectorXd& w, int dim,
                                 const char* name) {
    if (w.size() != dim)
      throw std::invalid_argument(std::string("mpc: ") + name +
                                  " has wrong dimension");
    if (w.size() > 0 && w.minCoeff() < 0.0)
      throw std::invalid_argument(std::string("mpc: ") + name +
                                  " must be non-negative");
  };
  check_weights(state_weights, state_dim, "state_weights");
  check_weights(input_weights, input_dim, "input_weights");
  check_weights(input_rate_weights, input_dim, "input_rate_weights");
  check_weights(terminal_weights, state_dim, "terminal_weights");
  if (input_lower.size() != input_dim || input_upper.size() != input_dim)
    throw std::invalid_argument("mpc: input bounds have wrong dimension");
  if (((input_upper - input_lower).array() < 0.0).any())
    throw std::invalid_argument("mpc: input bounds are not well ordered");
  if (!(solver.slack_penalty > 0.0))
    throw std::invalid_argument("mpc: slack_penalty must be > 0");
  if (!(solver.line_search_shrink > 0.0 && solver.line_search_shrink < 1.0))
    throw std::invalid_argument("mpc: line_search_shrink must be in (0,1)");
  if (solver.max_line_search < 1 || solver.max_sqp_iters < 1)
    throw std::invalid_argument("mpc: iteration limits must be >= 1");
  if (!(solver.kkt_tol > 0.0))
    throw std::invalid_argument("mpc: kkt_tol must be > 0");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kMaxIterations:
      return "max_iters";
    case SolveStatus::kDegradedFeasibility:
      return "degraded_feasibility";
  }
  return "unknown";
}

std::vector<Eigen::VectorXd> build_reference(int state_dim,
                                             double reference_speed,
                                             int horizon) {
  if (state_dim != 4 && state_dim != 6)
    throw std::invalid_argument("reference: unsupported state layout");
  Eigen::VectorXd r = Eigen::VectorXd::Zero(state_dim);
  r[3] = reference_speed;  // forward speed channel in both layouts
  return std::vector<Eigen::VectorXd>(static_cast<std::size_t>(horizon + 1), r);
}

double evaluate_cost(const OcpProblem& problem, const MpcConfig& config,
                     const std::vector<Eigen::VectorXd>& states,
                     const std::vector<Eigen::VectorXd>& inputs) {
  const int n = config.horizon;
  const double inv_ts = 1.0 / config.ts;
  double cost = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd e = state_error(states[i], problem.reference[i]);
    cost += (config.state_weights.array() * e.array().square()).sum();
    cost += (config.input_weights.array() * inputs[i].array().square()).sum();
    const Eigen::VectorXd prev = i == 0 ? problem.previous_input : inputs[i - 1];
    const Eigen::VectorXd du = (inputs[i] - prev) * inv_ts;
    cost += (config.input_rate_weights.array() * du.array().square()).sum();
  }
  const Eigen::VectorXd e_n = state_error(states[n], problem.reference[n]);
  cost += (config.terminal_weights.array() * e_n.array().square()).sum();
  return cost;
}

void cost_gradient(const OcpProblem& problem, const MpcConfig& config,
                   const std::vector<Eigen::VectorXd>& states,
                   const std::vector<Eigen::VectorXd>& inputs,
                   std::vector<Eigen::VectorXd>* grad_states,
                   std::vector<Eigen::VectorXd>* grad_inputs) {
  const int n = config.horizon;
  const double inv_ts2 = 1.0 / (config.ts * config.ts);
  grad_states->assign(static_cast<std::size_t>(n + 1), Eigen::VectorXd());
  grad_inputs->assign(static_cast<std::size_t>(n), Eigen::VectorXd());
  for (int i = 0; i <= n; ++i) {
    const Eigen::VectorXd& w =
        i == n ? config.terminal_weights : config.state_weights;
    const Eigen::VectorXd e = state_error(states[i], problem.reference[i]);
    (*grad_states)[i] = (2.0 * w.array() * e.array()).matrix();
  }
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd g =
        (2.0 * config.input_weights.array() * inputs[i].array()).matrix();
    const Eigen::VectorXd prev = i == 0 ? problem.previous_input : inputs[i - 1];
    g += ((2.0 * inv_ts2) * config.input_rate_weights.array() *
          (inputs[i] - prev).array())
             .matrix();
    if (i + 1 < n)
      g -= ((2.0 * inv_ts2) * config.input_rate_weights.array() *
            (inputs[i + 1] - inputs[i]).array())
               .matrix();
    (*grad_inputs)[i] = g;
  }
}

TranscriptionInfo transcription_info(const OcpProblem& problem,
                                     const MpcConfig& config) {
  validate_problem(problem, config);
  const int nx = problem.model->state_dim();
  const int nu = problem.model->input_dim();
  TranscriptionInfo info;
  info.barrier_rows = barrier_row_count(problem, config.horizon);
  info.decision_variables =
      nx * (config.horizon + 1) + nu * config.horizon + info.barrier_rows;
  info.equality_rows = nx * (config.horizon + 1);
  return info;
}

WarmStart cold_start(const OcpProblem& problem, const MpcConfig& config) {
  validate_problem(problem, config);
  const int nu = problem.model->input_dim();
  const Eigen::VectorXd idle = Eigen::VectorXd::Zero(nu)
                                   .cwiseMax(config.input_lower)
                                   .cwiseMin(config.input_upper);
  WarmStart warm;
  warm.inputs.assign(static_cast<std::size_t>(config.horizon), idle);
  warm.states.resize(static_cast<std::size_t>(config.horizon + 1));
  warm.states[0] = problem.initial_state;
  for (int i = 0; i < config.horizon; ++i)
    warm.states[i + 1] = rk4_step(*problem.model, warm.states[i], idle, config.ts);
  return warm;
}

WarmStart shift_warm_start(const SolverResult& previous,
                           const DynamicsModel& model, double ts) {
  if (previous.inputs.empty())
    throw std::invalid_argument("warm start shift requires a full horizon");
  WarmStart warm;
  warm.states.assign(previous.states.begin() + 1, previous.states.end());
  warm.inputs.assign(previous.inputs.begin() + 1, previous.inputs.end());
  warm.inputs.push_back(previous.inputs.back());
  warm.states.push_back(
      rk4_step(model, previous.states.back(), previous.inputs.back(), ts));
  return warm;
}

NmpcSolver::NmpcSolver(MpcConfig config) : config_(std::move(config)) {}

SolverResult NmpcSolver::solve(const OcpProblem& problem) const {
  return solve(problem, cold_start(problem, config_));
}

SolverResult NmpcSolver::solve(const OcpProblem& problem,
                               const WarmStart& warm) const {
  validate_problem(problem, config_);
  const MpcConfig& cfg = config_;
  const DynamicsModel& model = *problem.model;
  const int n = cfg.horizon;
  const int nx = model.state_dim();
  const int nu = model.input_dim();
  const int nu_total = n * nu;
  const double penalty = cfg.solver.slack_penalty;

  if (static_cast<int>(warm.states.size()) != n + 1 ||
      static_cast<int>(warm.inputs.size()) != n)
    throw std::invalid_argument("warm start has wrong horizon");

  Iterate z;
  z.states = warm.states;
  z.inputs = warm.inputs;
  for (auto& u : z.inputs)
    u = u.cwiseMax(cfg.input_lower).cwiseMin(cfg.input_upper);
  z.slacks = (-row_values(problem, n, z.states)).cwiseMax(0.0);
  const int num_rows = static_cast<int>(z.slacks.size());

  const Eigen::ArrayXd w_stage = 2.0 * cfg.state_weights.array();
  const Eigen::ArrayXd w_terminal = 2.0 * cfg.terminal_weights.array();

  const auto linearize = [&](const Iterate& it) {
    Linearization lin;
    lin.a.resize(static_cast<std::size_t>(n));
    lin.b.resize(static_cast<std::size_t>(n));
    lin.defects.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd next;
      rk4_step_with_jacobians(model, it.states[i], it.inputs[i], cfg.ts, &next,
                              &lin.a[i], &lin.b[i]);
      ensure_finite(next, "dynamics", i);
      lin.defects[i] = next - it.states[i + 1];
    }
    lin.init_defect = problem.initial_state - it.states[0];
    lin.cost = evaluate_cost(problem, cfg, it.states, it.inputs);
    cost_gradient(problem, cfg, it.states, it.inputs, &lin.grad_x, &lin.grad_u);

    if (num_rows > 0) {
      const BarrierConfig& bc = problem.barrier;
      const int num_obstacles =
          static_cast<int>(problem.obstacles.front().size());
      lin.rows.reserve(static_cast<std::size_t>(num_rows));
      if (bc.kind == BarrierKind::kDistance) {
        for (int i = 0; i <= n; ++i) {
          const PlanarKinematicPose pose = model.pose_of(it.states[i]);
          const Eigen::MatrixXd jac = model.pose_jacobian(it.states[i]);
          for (int o = 0; o < num_obstacles; ++o) {
            BarrierRow row;
            row.stage = i;
            row.coupled = false;
            row.value = euclid_h(pose, problem.obstacles[i][o], bc);
            row.grad_now =
                jac.transpose() *
                barrier_gradient(bc.kind, pose, problem.obstacles[i][o], bc);
            lin.rows.push_back(std::move(row));
          }
        }
      } else {
        const double keep = 1.0 - bc.decay();
        for (int i = 0; i < n; ++i) {
          const PlanarKinematicPose pose_now = model.pose_of(it.states[i]);
          const PlanarKinematicPose pose_next = model.pose_of(it.states[i + 1]);
          const Eigen::MatrixXd jac_now = model.pose_jacobian(it.states[i]);
          const Eigen::MatrixXd jac_next = model.pose_jacobian(it.states[i + 1]);
          for (int o = 0; o < num_obstacles; ++o) {
            const Obstacle& obs_now = problem.obstacles[i][o];
            const Obstacle& obs_next = problem.obstacles[i + 1][o];
            BarrierRow row;
            row.stage = i;
            row.coupled = true;
            row.value =
                barrier_value_clamped(bc.kind, pose_next, obs_next, bc) -
                keep * barrier_value_clamped(bc.kind, pose_now, obs_now, bc);
            row.grad_now = -keep * (jac_now.transpose() *
                                    barrier_gradient(bc.kind, pose_now, obs_now, bc));
            row.grad_next = jac_next.transpose() *
                            barrier_gradient(bc.kind, pose_next, obs_next, bc);
            lin.rows.push_back(std::move(row));
          }
        }
      }
      for (const auto& row : lin.rows) {
        ensure_finite(row.grad_now, "barrier gradient", row.stage);
        if (row.coupled) ensure_finite(row.grad_next, "barrier gradient", row.stage);
      }
    }
    return lin;
  };

  // L1 exact-penalty pieces at a candidate iterate.
  const auto objective = [&](const Iterate& it) {
    return evaluate_cost(problem, cfg, it.states, it.inputs) +
           penalty * it.slacks.sum();
  };
  const auto infeasibility = [&](const Iterate& it) {
    double phi = (problem.initial_state - it.states[0]).cwiseAbs().sum();
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd next =
          rk4_step(model, it.states[i], it.inputs[i], cfg.ts);
      ensure_finite(next, "dynamics", i);
      phi += (next - it.states[i + 1]).cwiseAbs().sum();
    }
    const Eigen::VectorXd values = row_values(problem, n, it.states);
    for (int j = 0; j < values.size(); ++j)
      phi += std::max(0.0, -(values[j] + it.slacks[j]));
    return phi;
  };

  SolverResult result;
  Multipliers mults;
  bool have_mults = false;
  double mu = 10.0;
  double regularization = kBaseRegularization;
  double kkt = std::numeric_limits<double>::infinity();

  // Stationarity/feasibility/complementarity residual of the transcribed NLP
  // at the current iterate, using the most recent QP multipliers. Equality
  // multipliers are reconstructed by the costate recursion, which zeroes the
  // state stationarity rows exactly; the informative components are the
  // reduced-space input and slack rows.
  const auto kkt_residual = [&](const Linearization& lin, const Iterate& it) {
    std::vector<Eigen::VectorXd> ghat(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) ghat[i] = lin.grad_x[i];
    for (int j = 0; j < num_rows; ++j) {
      const BarrierRow& row = lin.rows[j];
      ghat[row.stage] -= mults.rows[j] * row.grad_now;
      if (row.coupled) ghat[row.stage + 1] -= mults.rows[j] * row.grad_next;
    }
    std::vector<Eigen::VectorXd> costate(static_cast<std::size_t>(n));
    costate[n - 1] = ghat[n];
    for (int i = n - 1; i >= 1; --i)
      costate[i - 1] = ghat[i] + lin.a[i].transpose() * costate[i];

    double stationarity = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd r_u =
          lin.grad_u[i] + lin.b[i].transpose() * costate[i] -
          mults.lower.segment(i * nu, nu) + mults.upper.segment(i * nu, nu);
      stationarity = std::max(stationarity, r_u.cwiseAbs().maxCoeff());
    }
    for (int j = 0; j < num_rows; ++j)
      stationarity = std::max(
          stationarity,
          std::abs(penalty - mults.rows[j] - mults.slack_nonneg[j]));

    double primal = lin.init_defect.cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i)
      primal = std::max(primal, lin.defects[i].cwiseAbs().maxCoeff());
    for (int j = 0; j < num_rows; ++j)
      primal = std::max(primal, -(lin.rows[j].value + it.slacks[j]));
    for (int i = 0; i < n; ++i) {
      primal = std::max(primal,
                        (cfg.input_lower - it.inputs[i]).maxCoeff());
      primal = std::max(primal,
                        (it.inputs[i] - cfg.input_upper).maxCoeff());
    }
    if (num_rows > 0) primal = std::max(primal, (-it.slacks).maxCoeff());
    primal = std::max(primal, 0.0);

    double compl_viol = 0.0;
    for (int j = 0; j < num_rows; ++j) {
      compl_viol = std::max(compl_viol, std::abs(mults.rows[j] *
                                                 (lin.rows[j].value + it.slacks[j])));
      compl_viol = std::max(compl_viol,
                            std::abs(mults.slack_nonneg[j] * it.slacks[j]));
    }
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < nu; ++c) {
        compl_viol = std::max(
            compl_viol, std::abs(mults.lower[i * nu + c] *
                                 (it.inputs[i][c] - cfg.input_lower[c])));
        compl_viol = std::max(
            compl_viol, std::abs(mults.upper[i * nu + c] *
                                 (cfg.input_upper[c] - it.inputs[i][c])));
      }
    }
    return std::max({stationarity, primal, compl_viol});
  };

  Linearization lin = linearize(z);
  int iterations = 0;

  while (true) {
    if (have_mults) {
      kkt = kkt_residual(lin, z);
      if (kkt <= cfg.solver.kkt_tol) break;
    }
    if (iterations >= cfg.solver.max_sqp_iters) break;
    ++iterations;

    // Forward sensitivities of the linearized shooting system: the state
    // perturbation at stage i is E[i] + T[i] * du.
    std::vector<Eigen::VectorXd> e_sens(static_cast<std::size_t>(n + 1));
    std::vector<Eigen::MatrixXd> t_sens(static_cast<std::size_t>(n + 1));
    e_sens[0] = lin.init_defect;
    t_sens[0] = Eigen::MatrixXd::Zero(nx, nu_total);
    for (int i = 0; i < n; ++i) {
      e_sens[i + 1] = lin.a[i] * e_sens[i] + lin.defects[i];
      t_sens[i + 1] = lin.a[i] * t_sens[i];
      t_sens[i + 1].middleCols(i * nu, nu) += lin.b[i];
    }

    const int nv = nu_total + num_rows;
    Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(nv, nv);
    Eigen::VectorXd gradient = Eigen::VectorXd::Zero(nv);

    for (int i = 0; i <= n; ++i) {
      const Eigen::ArrayXd& w = i == n ? w_terminal : w_stage;
      hessian.topLeftCorner(nu_total, nu_total) +=
          t_sens[i].transpose() * w.matrix().asDiagonal() * t_sens[i];
      gradient.head(nu_total) +=
          t_sens[i].transpose() *
          (lin.grad_x[i] + (w * e_sens[i].array()).matrix());
    }
    const Eigen::ArrayXd r2 = 2.0 * cfg.input_weights.array();
    const Eigen::ArrayXd rd2 =
        2.0 * cfg.input_rate_weights.array() / (cfg.ts * cfg.ts);
    for (int i = 0; i < n; ++i) {
      hessian.block(i * nu, i * nu, nu, nu) += r2.matrix().asDiagonal();
      gradient.segment(i * nu, nu) += lin.grad_u[i];
    }
    hessian.block(0, 0, nu, nu) += rd2.matrix().asDiagonal();
    for (int i = 1; i < n; ++i) {
      hessian.block(i * nu, i * nu, nu, nu) += rd2.matrix().asDiagonal();
      hessian.block((i - 1) * nu, (i - 1) * nu, nu, nu) +=
          rd2.matrix().asDiagonal();
      hessian.block(i * nu, (i - 1) * nu, nu, nu) -= rd2.matrix().asDiagonal();
      hessian.block((i - 1) * nu, i * nu, nu, nu) -= rd2.matrix().asDiagonal();
    }
    gradient.tail(num_rows).setConstant(penalty);
    // Keep the slack block well conditioned; the L1 term still dominates near
    // zero, so slacks stay exactly zero whenever the rows are satisfiable.
    hessian.bottomRightCorner(num_rows, num_rows).diagonal().array() +=
        1e-4 * penalty;

    const int num_qp_rows = num_rows + 2 * nu_total + num_rows;
    Eigen::MatrixXd qp_a = Eigen::MatrixXd::Zero(num_qp_rows, nv);
    Eigen::VectorXd qp_b(num_qp_rows);
    for (int j = 0; j < num_rows; ++j) {
      const BarrierRow& row = lin.rows[j];
      Eigen::RowVectorXd a_du = row.grad_now.transpose() * t_sens[row.stage];
      double constant = row.value + z.slacks[j] +
                        row.grad_now.dot(e_sens[row.stage]);
      if (row.coupled) {
        a_du += row.grad_next.transpose() * t_sens[row.stage + 1];
        constant += row.grad_next.dot(e_sens[row.stage + 1]);
      }
      qp_a.row(j).head(nu_total) = a_du;
      qp_a(j, nu_total + j) = 1.0;
      qp_b[j] = -constant;
    }
    for (int k = 0; k < nu_total; ++k) {
      const int i = k / nu;
      const int c = k % nu;
      qp_a(num_rows + k, k) = 1.0;
      qp_b[num_rows + k] = cfg.input_lower[c] - z.inputs[i][c];
      qp_a(num_rows + nu_total + k, k) = -1.0;
      qp_b[num_rows + nu_total + k] = z.inputs[i][c] - cfg.input_upper[c];
    }
    for (int j = 0; j < num_rows; ++j) {
      qp_a(num_rows + 2 * nu_total + j, nu_total + j) = 1.0;
      qp_b[num_rows + 2 * nu_total + j] = -z.slacks[j];
    }

    Eigen::VectorXd start = Eigen::VectorXd::Zero(nv);
    for (int j = 0; j < num_rows; ++j)
      start[nu_total + j] = std::max(qp_b[j], -z.slacks[j]);

    QpSolution qp_solution;
    double reg = regularization;
    for (int attempt = 0;; ++attempt) {
      QpProblem qp;
      qp.hessian = hessian + reg * Eigen::MatrixXd::Identity(nv, nv);
      qp.gradient = gradient;
      qp.constraints = qp_a;
      qp.lower_bounds = qp_b;
      try {
        qp_solution = solve_qp(qp, start);
        break;
      } catch (const std::runtime_error&) {
        if (attempt >= 8) throw;
        reg *= 10.0;  // grow the regularization and retry
      }
    }

    const Eigen::VectorXd du = qp_solution.x.head(nu_total);
    const Eigen::VectorXd ds = qp_solution.x.tail(num_rows);
    mults.rows = qp_solution.multipliers.head(num_rows);
    mults.lower = qp_solution.multipliers.segment(num_rows, nu_total);
    mults.upper = qp_solution.multipliers.segment(num_rows + nu_total, nu_total);
    mults.slack_nonneg = qp_solution.multipliers.tail(num_rows);
    have_mults = true;

    std::vector<Eigen::VectorXd> dx(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) dx[i] = e_sens[i] + t_sens[i] * du;

    // Exact-penalty weight must dominate the multipliers; reconstruct the
    // equality multipliers of this QP by the costate recursion.
    {
      std::vector<Eigen::VectorXd> ghat(static_cast<std::size_t>(n + 1));
      for (int i = 0; i <= n; ++i) {
        const Eigen::ArrayXd& w = i == n ? w_terminal : w_stage;
        ghat[i] = lin.grad_x[i] + (w * dx[i].array()).matrix();
      }
      for (int j = 0; j < num_rows; ++j) {
        const BarrierRow& row = lin.rows[j];
        ghat[row.stage] -= mults.rows[j] * row.grad_now;
        if (row.coupled) ghat[row.stage + 1] -= mults.rows[j] * row.grad_next;
      }
      double need = std::max(mults.rows.size() > 0 ? mults.rows.maxCoeff() : 0.0,
                             std::max(mults.lower.maxCoeff(), mults.upper.maxCoeff()));
      Eigen::VectorXd costate = ghat[n];
      need = std::max(need, costate.cwiseAbs().maxCoeff());
      for (int i = n - 1; i >= 1; --i) {
        costate = ghat[i] + lin.a[i].transpose() * costate;
        need = std::max(need, costate.cwiseAbs().maxCoeff());
      }
      if (mu < 1.1 * need) mu = 2.0 * need;
    }

    const double phi0 = infeasibility(z);
    const double merit0 = objective(z) + mu * phi0;
    double directional = penalty * ds.sum() - mu * phi0;
    for (int i = 0; i <= n; ++i) directional += lin.grad_x[i].dot(dx[i]);
    for (int i = 0; i < n; ++i)
      directional += lin.grad_u[i].dot(du.segment(i * nu, nu));

    const auto apply_step = [&](double alpha) {
      Iterate trial;
      trial.states.resize(static_cast<std::size_t>(n + 1));
      trial.inputs.resize(static_cast<std::size_t>(n));
      for (int i = 0; i <= n; ++i) trial.states[i] = z.states[i] + alpha * dx[i];
      for (int i = 0; i < n; ++i) {
        trial.inputs[i] = z.inputs[i] + alpha * du.segment(i * nu, nu);
        trial.inputs[i] =
            trial.inputs[i].cwiseMax(cfg.input_lower).cwiseMin(cfg.input_upper);
      }
      trial.slacks = (z.slacks + alpha * ds).cwiseMax(0.0);
      for (int j = 0; j < trial.slacks.size(); ++j)
        if (trial.slacks[j] < kSlackSnap) trial.slacks[j] = 0.0;
      return trial;
    };

    double alpha = 1.0;
    bool accepted = false;
    double best_alpha = 0.0;
    double best_merit = merit0;
    Iterate best_iterate;
    const double slope = std::min(directional, 0.0);
    for (int attempt = 0; attempt < cfg.solver.max_line_search; ++attempt) {
      Iterate trial = apply_step(alpha);
      const double merit = objective(trial) + mu * infeasibility(trial);
      if (merit < best_merit) {
        best_merit = merit;
        best_alpha = alpha;
        best_iterate = trial;
      }
      if (merit <= merit0 + 1e-4 * alpha * slope + 1e-12 * (1.0 + std::abs(merit0))) {
        z = std::move(trial);
        result.iterates.push_back({merit0, merit, alpha});
        accepted = true;
        break;
      }
      alpha *= cfg.solver.line_search_shrink;
    }
    if (!accepted) {
      if (best_alpha > 0.0) {
        z = std::move(best_iterate);
        result.iterates.push_back({merit0, best_merit, best_alpha});
      } else {
        // No merit progress along this direction; stop at the current point.
        kkt = kkt_residual(lin, z);
        break;
      }
    }
    lin = linearize(z);
  }

  result.sqp_iterations = iterations;
  result.kkt_residual = kkt;
  result.max_slack = z.slacks.size() > 0 ? z.slacks.maxCoeff() : 0.0;
  if (result.max_slack > 1e-6)
    result.status = SolveStatus::kDegradedFeasibility;
  else if (kkt <= cfg.solver.kkt_tol)
    result.status = SolveStatus::kConverged;
  else
    result.status = SolveStatus::kMaxIterations;

  // Return a dynamically consistent trajectory: the states are the forward
  // rollout of the returned inputs from the true initial condition.
  result.inputs = z.inputs;
  result.states.resize(static_cast<std::size_t>(n + 1));
  result.states[0] = problem.initial_state;
  for (int i = 0; i < n; ++i)
    result.states[i + 1] =
        rk4_step(model, result.states[i], result.inputs[i], cfg.ts);
  return result;
}

}  // namespace tccbf

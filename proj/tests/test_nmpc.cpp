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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tccbf/nmpc.hpp"

using namespace tccbf;
namespace oracle = tccbf::testing;

namespace {

MpcConfig unicycle_config() {
  MpcConfig mpc;
  mpc.horizon = 10;
  mpc.ts = 0.1;
  mpc.state_weights = Eigen::Vector4d{0.0, 2.0, 25.0, 100.0};
  mpc.input_weights = Eigen::Vector2d{50.0, 50.0};
  mpc.input_rate_weights = Eigen::Vector2d{0.05, 0.05};
  mpc.terminal_weights = Eigen::Vector4d{0.0, 2.0, 25.0, 100.0};
  mpc.input_lower = Eigen::Vector2d{-0.3, -1.0};
  mpc.input_upper = Eigen::Vector2d{0.3, 1.0};
  return mpc;
}

BarrierConfig tc_barrier() {
  BarrierConfig cfg;
  cfg.kind = BarrierKind::kTurningCircle;
  cfg.alpha = 0.5;
  cfg.alpha_e = 0.05;
  cfg.alpha_t = 0.05;
  cfg.r_max = 0.3;
  cfg.safety_radius = 0.5;
  cfg.smoothing = 5.0;
  return cfg;
}

OcpProblem make_problem(const UnicycleModel& model, const MpcConfig& mpc,
                        const Eigen::Vector4d& initial,
                        const std::vector<Obstacle>& obstacles) {
  OcpProblem problem;
  problem.model = &model;
  problem.initial_state = initial;
  problem.previous_input = Eigen::Vector2d::Zero();
  problem.reference = build_reference(4, 2.0, mpc.horizon);
  problem.barrier = tc_barrier();
  if (!obstacles.empty()) {
    problem.obstacles.assign(static_cast<std::size_t>(mpc.horizon + 1),
                             obstacles);
    for (int i = 0; i <= mpc.horizon; ++i)
      for (std::size_t o = 0; o < obstacles.size(); ++o) {
        problem.obstacles[i][o].x += obstacles[o].vx * i * mpc.ts;
        problem.obstacles[i][o].y += obstacles[o].vy * i * mpc.ts;
      }
  }
  return problem;
}

}  // namespace

TEST_CASE("reference construction") {
  const auto unicycle_ref = build_reference(4, 2.0, 10);
  REQUIRE(unicycle_ref.size() == 11);
  for (const auto& r : unicycle_ref)
    CHECK(r.isApprox(Eigen::Vector4d{0, 0, 0, 2.0}, 1e-15));

  const auto asv_ref = build_reference(6, 0.9, 20);
  REQUIRE(asv_ref.size() == 21);
  Eigen::VectorXd expected(6);
  expected << 0, 0, 0, 0.9, 0, 0;
  for (const auto& r : asv_ref) CHECK(r.isApprox(expected, 1e-15));

  CHECK_THROWS_AS((void)build_reference(5, 1.0, 10), std::invalid_argument);
}

TEST_CASE("transcription dimensions") {
  const UnicycleModel model;
  const MpcConfig mpc = unicycle_config();

  SUBCASE("one obstacle, turning-circle rows") {
    const auto problem = make_problem(model, mpc, {0, 0, 0, 2}, {{15, 0, 2, 0, 0}});
    const auto info = transcription_info(problem, mpc);
    CHECK(info.barrier_rows == 10);
    CHECK(info.decision_variables == 4 * 11 + 2 * 10 + 10);
    CHECK(info.equality_rows == 4 * 11);
  }
  SUBCASE("distance baseline constrains every stage") {
    auto problem = make_problem(model, mpc, {0, 0, 0, 2}, {{15, 0, 2, 0, 0}});
    problem.barrier.kind = BarrierKind::kDistance;
    CHECK(transcription_info(problem, mpc).barrier_rows == 11);
  }
  SUBCASE("no obstacles, no rows, no slacks") {
    const auto problem = make_problem(model, mpc, {0, 0, 0, 2}, {});
    const auto info = transcription_info(problem, mpc);
    CHECK(info.barrier_rows == 0);
    CHECK(info.decision_variables == 4 * 11 + 2 * 10);
  }
}

TEST_CASE("cost evaluation") {
  const UnicycleModel model;
  const MpcConfig mpc = unicycle_config();
  const auto problem = make_problem(model, mpc, {0, 0, 0, 2}, {});

  SUBCASE("reference trajectory and idle inputs cost nothing") {
    std::vector<Eigen::VectorXd> states(11), inputs(10, Eigen::Vector2d::Zero());
    for (int i = 0; i <= 10; ++i)
      states[i] = Eigen::Vector4d{0.2 * i, 0, 0, 2.0};
    CHECK(evaluate_cost(problem, mpc, states, inputs) ==
          doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("single-stage lateral deviation") {
    std::vector<Eigen::VectorXd> states(11), inputs(10, Eigen::Vector2d::Zero());
    for (int i = 0; i <= 10; ++i)
      states[i] = Eigen::Vector4d{0.2 * i, 0, 0, 2.0};
    const double delta = 0.37;
    states[4][1] += delta;
    CHECK(evaluate_cost(problem, mpc, states, inputs) ==
          doctest::Approx(2.0 * delta * delta));
  }
}

TEST_CASE("cost gradient matches finite differences") {
  const UnicycleModel model;
  const MpcConfig mpc = unicycle_config();
  const auto problem = make_problem(model, mpc, {0, 0, 0, 2}, {});
  const int n = mpc.horizon;

  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Eigen::VectorXd> states(n + 1), inputs(n);
    for (int i = 0; i <= n; ++i) {
      states[i] = Eigen::Vector4d{oracle::uniform(-5, 5), oracle::uniform(-5, 5),
                                  oracle::uniform(-2, 2), oracle::uniform(-1, 3)};
    }
    for (int i = 0; i < n; ++i)
      inputs[i] = Eigen::Vector2d{oracle::uniform(-0.3, 0.3),
                                  oracle::uniform(-1, 1)};

    std::vector<Eigen::VectorXd> grad_x, grad_u;
    cost_gradient(problem, mpc, states, inputs, &grad_x, &grad_u);

    Eigen::VectorXd packed(4 * (n + 1) + 2 * n);
    for (int i = 0; i <= n; ++i) packed.segment(4 * i, 4) = states[i];
    for (int i = 0; i < n; ++i)
      packed.segment(4 * (n + 1) + 2 * i, 2) = inputs[i];

    const auto unpack_eval = [&](const Eigen::VectorXd& z) {
      std::vector<Eigen::VectorXd> xs(n + 1), us(n);
      for (int i = 0; i <= n; ++i) xs[i] = z.segment(4 * i, 4);
      for (int i = 0; i < n; ++i) us[i] = z.segment(4 * (n + 1) + 2 * i, 2);
      return evaluate_cost(problem, mpc, xs, us);
    };

    const Eigen::VectorXd fd = oracle::fd_gradient(unpack_eval, packed);
    Eigen::VectorXd analytic(packed.size());
    for (int i = 0; i <= n; ++i) analytic.segment(4 * i, 4) = grad_x[i];
    for (int i = 0; i < n; ++i)
      analytic.segment(4 * (n + 1) + 2 * i, 2) = grad_u[i];
    CHECK(oracle::relative_error(analytic, fd) <= 1e-4);
  }
}

TEST_CASE("equilibrium tracking returns idle inputs") {
  const UnicycleModel model;
  const MpcConfig mpc = unicycle_config();
  const NmpcSolver solver(mpc);
  const auto problem = make_problem(model, mpc, {3.0, 0, 0, 2.0}, {});
  const auto result = solver.solve(problem);

  CHECK(result.status == SolveStatus::kConverged);
  CHECK(result.max_slack == 0.0);
  for (const auto& u : result.inputs) CHECK(u.cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(result.kkt_residual <= mpc.solver.kkt_tol);
}

TEST_CASE("far obstacle leaves the solution untouched") {
  const UnicycleModel model;
  const MpcConfig mpc = unicycle_config();
  const NmpcSolver solver(mpc);

  const auto free_problem = make_problem(model, mpc, {0, 0.5, 0.1, 1.8}, {});
  const auto constrained =
      make_problem(model, mpc, {0, 0.5, 0.1, 1.8}, {{200, 0, 2, 0, 0}});

  const auto base = solver.solve(free_problem);
  const auto with_obstacle = solver.solve(constrained);
  REQUIRE(base.inputs.size() == with_obstacle.inputs.size());
  for (std::size_t i = 0; i < base.inputs.size(); ++i)
    CHECK((base.inputs[i] - with_obstacle.inputs[i]).cwiseAbs().maxCoeff() <=
          1e-6);
  CHECK(with_obstacle.max_slack == 0.0);
}

TEST_CASE("overlapping obstacle degrades feasibility through slack") {
  const UnicycleModel model;
  const MpcConfig mpc = unicycle_config();
  const NmpcSolver solver(mpc);
  auto problem = make_problem(model, mpc, {0, 0, 0, 2}, {{0.5, 0, 2, 0, 0}});
  problem.barrier.kind = BarrierKind::kDistance;
  const auto result = solver.solve(problem);
  CHECK(result.status == SolveStatus::kDegradedFeasibility);
  CHECK(result.max_slack > 1e-6);
}

TEST_CASE("predicted states satisfy the shooting constraints") {
  const UnicycleModel model;
  const MpcConfig mpc = unicycle_config();
  const NmpcSolver solver(mpc);
  const auto problem =
      make_problem(model, mpc, {10, 0.5, 0.05, 2.0}, {{15, 0, 2, 0, 0}});
  const auto result = solver.solve(problem);

  for (int i = 0; i < mpc.horizon; ++i) {
    const Eigen::VectorXd defect =
        rk4_step(model, result.states[i], result.inputs[i], mpc.ts) -
        result.states[i + 1];
    CHECK(defect.cwiseAbs().maxCoeff() <= 1e-8);
  }
  CHECK((result.states[0] - problem.initial_state).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("converged solves honor the barrier rows") {
  const UnicycleModel model;
  const MpcConfig mpc = unicycle_config();
  const NmpcSolver solver(mpc);
  // Close enough for the turning-circle rows to be active.
  const auto problem =
      make_problem(model, mpc, {7.0, 0.3, 0.1, 2.0}, {{15, 0, 2, 0, 0}});
  const auto result = solver.solve(problem);
  REQUIRE(result.status == SolveStatus::kConverged);
  REQUIRE(result.max_slack <= 1e-6);

  const double keep = 1.0 - problem.barrier.decay();
  for (int i = 0; i < mpc.horizon; ++i) {
    const double h_now = tc_cbf(model.pose_of(result.states[i]),
                                problem.obstacles[i][0], problem.barrier);
    const double h_next = tc_cbf(model.pose_of(result.states[i + 1]),
                                 problem.obstacles[i + 1][0], problem.barrier);
    CHECK(h_next - keep * h_now >= -1e-6);
  }
}

TEST_CASE("input bounds hold at the solution") {
  const UnicycleModel model;
  MpcConfig mpc = unicycle_config();
  const NmpcSolver solver(mpc);
  const auto problem =
      make_problem(model, mpc, {9.0, 0.4, 0.0, 2.0}, {{15, 0, 2, 0, 0}});
  const auto result = solver.solve(problem);
  for (const auto& u : result.inputs) {
    CHECK(u[0] >= mpc.input_lower[0] - 1e-12);
    CHECK(u[0] <= mpc.input_upper[0] + 1e-12);
    CHECK(u[1] >= mpc.input_lower[1] - 1e-12);
    CHECK(u[1] <= mpc.input_upper[1] + 1e-12);
  }
}

TEST_CASE("warm-start shift") {
  const UnicycleModel model;
  const MpcConfig mpc = unicycle_config();
  const NmpcSolver solver(mpc);

  SUBCASE("shift of a constant-input solution") {
    SolverResult previous;
    previous.inputs.assign(10, Eigen::Vector2d{0.1, 0.0});
    previous.states.resize(11);
    previous.states[0] = Eigen::Vector4d{0, 0, 0, 2};
    for (int i = 0; i < 10; ++i)
      previous.states[i + 1] =
          rk4_step(model, previous.states[i], previous.inputs[i], mpc.ts);
    const auto warm = shift_warm_start(previous, model, mpc.ts);
    REQUIRE(warm.states.size() == 11);
    REQUIRE(warm.inputs.size() == 10);
    for (int i = 0; i < 10; ++i)
      CHECK(warm.states[i].isApprox(previous.states[i + 1], 1e-15));
    CHECK(warm.inputs.back().isApprox(previous.inputs.back(), 1e-15));
    CHECK(warm.states.back().isApprox(
        rk4_step(model, previous.states.back(), previous.inputs.back(), mpc.ts),
        1e-15));
  }
  SUBCASE("degenerate single-step horizon") {
    SolverResult previous;
    previous.inputs.assign(1, Eigen::Vector2d{0.05, 0.2});
    previous.states.resize(2);
    previous.states[0] = Eigen::Vector4d{0, 0, 0, 2};
    previous.states[1] =
        rk4_step(model, previous.states[0], previous.inputs[0], mpc.ts);
    const auto warm = shift_warm_start(previous, model, mpc.ts);
    CHECK(warm.inputs[0].isApprox(previous.inputs[0], 1e-15));
    CHECK(warm.states[0].isApprox(previous.states[1], 1e-15));
  }
  SUBCASE("shifted equilibrium re-converges within two iterations") {
    const auto problem = make_problem(model, mpc, {3.0, 0, 0, 2.0}, {});
    const auto first = solver.solve(problem);
    REQUIRE(first.status == SolveStatus::kConverged);

    auto next_problem = problem;
    next_problem.initial_state =
        rk4_step(model, problem.initial_state, first.inputs[0], mpc.ts);
    const auto warm = shift_warm_start(first, model, mpc.ts);
    const auto second = solver.solve(next_problem, warm);
    CHECK(second.status == SolveStatus::kConverged);
    CHECK(second.sqp_iterations <= 2);
  }
}

TEST_CASE("merit is non-increasing across accepted iterates") {
  const UnicycleModel model;
  const MpcConfig mpc = unicycle_config();
  const NmpcSolver solver(mpc);
  const auto problem =
      make_problem(model, mpc, {8.0, 0.2, 0.0, 2.0}, {{15, 0, 2, 0, 0}});
  const auto result = solver.solve(problem);
  REQUIRE(!result.iterates.empty());
  for (const auto& it : result.iterates)
    CHECK(it.merit_after <= it.merit_before + 1e-9 * (1.0 + std::abs(it.merit_before)));
}

TEST_CASE("solver is deterministic") {
  const UnicycleModel model;
  const MpcConfig mpc = unicycle_config();
  const NmpcSolver solver(mpc);
  const auto problem =
      make_problem(model, mpc, {7.5, 0.3, 0.05, 2.0}, {{15, 0, 2, 0, 0}});
  const auto warm = cold_start(problem, mpc);
  const auto a = solver.solve(problem, warm);
  const auto b = solver.solve(problem, warm);
  REQUIRE(a.inputs.size() == b.inputs.size());
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    CHECK(a.inputs[i][0] == b.inputs[i][0]);
    CHECK(a.inputs[i][1] == b.inputs[i][1]);
  }
  CHECK(a.kkt_residual == b.kkt_residual);
  CHECK(a.sqp_iterations == b.sqp_iterations);
}

TEST_CASE("problem validation") {
  const UnicycleModel model;
  const MpcConfig mpc = unicycle_config();
  auto problem = make_problem(model, mpc, {0, 0, 0, 2}, {{15, 0, 2, 0, 0}});

  SUBCASE("short reference is rejected") {
    problem.reference.pop_back();
    CHECK_THROWS_AS((void)transcription_info(problem, mpc), std::invalid_argument);
  }
  SUBCASE("short obstacle extrapolation is rejected") {
    problem.obstacles.pop_back();
    CHECK_THROWS_AS((void)transcription_info(problem, mpc), std::invalid_argument);
  }
  SUBCASE("bad bounds are rejected") {
    MpcConfig bad = mpc;
    bad.input_lower[0] = 1.0;
    CHECK_THROWS_AS(bad.validate(4, 2), std::invalid_argument);
  }
}

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

#include "oracles.hpp"
#include "tccbf/qp.hpp"

using namespace tccbf;
namespace oracle = tccbf::testing;

namespace {

// Random strictly convex QP with a known feasible point at the origin.
QpProblem random_qp(int n, int m) {
  QpProblem qp;
  Eigen::MatrixXd root(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) root(i, j) = oracle::uniform(-1, 1);
  qp.hessian = root.transpose() * root +
               0.3 * Eigen::MatrixXd::Identity(n, n);
  qp.gradient.resize(n);
  for (int i = 0; i < n; ++i) qp.gradient[i] = oracle::uniform(-2, 2);
  qp.constraints.resize(m, n);
  qp.lower_bounds.resize(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) qp.constraints(i, j) = oracle::uniform(-1, 1);
    qp.lower_bounds[i] = -oracle::uniform(0.05, 2.0);  // origin stays feasible
  }
  return qp;
}

}  // namespace

TEST_CASE("unconstrained newton step") {
  QpProblem qp;
  qp.hessian = Eigen::MatrixXd::Identity(3, 3);
  qp.gradient = Eigen::Vector3d{1.0, -2.0, 0.5};
  qp.constraints.resize(0, 3);
  qp.lower_bounds.resize(0);
  const auto solution = solve_qp(qp, Eigen::Vector3d::Zero());
  CHECK(solution.x.isApprox(-qp.gradient, 1e-12));
}

TEST_CASE("single active bound") {
  // minimize 0.5 x^2 + g x subject to x >= 0 with g > 0: clipped at zero.
  QpProblem qp;
  qp.hessian = Eigen::MatrixXd::Identity(1, 1);
  qp.gradient = Eigen::VectorXd::Constant(1, 3.0);
  qp.constraints = Eigen::MatrixXd::Identity(1, 1);
  qp.lower_bounds = Eigen::VectorXd::Zero(1);
  const auto solution = solve_qp(qp, Eigen::VectorXd::Constant(1, 5.0));
  CHECK(solution.x[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(solution.multipliers[0] == doctest::Approx(3.0));
}

TEST_CASE("infeasible start is rejected") {
  QpProblem qp;
  qp.hessian = Eigen::MatrixXd::Identity(1, 1);
  qp.gradient = Eigen::VectorXd::Zero(1);
  qp.constraints = Eigen::MatrixXd::Identity(1, 1);
  qp.lower_bounds = Eigen::VectorXd::Constant(1, 1.0);
  CHECK_THROWS_AS((void)solve_qp(qp, Eigen::VectorXd::Zero(1)),
                  std::invalid_argument);
}

TEST_CASE("matches the exhaustive active-set oracle on random instances") {
  int solved = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(oracle::uniform(0, 9));   // up to 10
    const int m = 1 + static_cast<int>(oracle::uniform(0, 8));   // up to 9
    const QpProblem qp = random_qp(n, m);

    Eigen::VectorXd expected_x;
    double expected_value = 0.0;
    REQUIRE(oracle::brute_force_qp(qp, &expected_x, &expected_value));

    const auto solution = solve_qp(qp, Eigen::VectorXd::Zero(n));
    const double value = 0.5 * solution.x.dot(qp.hessian * solution.x) +
                         qp.gradient.dot(solution.x);
    CHECK(std::abs(value - expected_value) <= 1e-6 * (1.0 + std::abs(expected_value)));
    CHECK((solution.x - expected_x).cwiseAbs().maxCoeff() <=
          1e-6 * (1.0 + expected_x.cwiseAbs().maxCoeff()));
    CHECK(oracle::qp_kkt_residual(qp, solution.x, solution.multipliers) <= 1e-8);
    ++solved;
  }
  CHECK(solved == 200);
}

TEST_CASE("larger instances keep clean kkt conditions") {
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 15 + static_cast<int>(oracle::uniform(0, 25));
    const int m = 10 + static_cast<int>(oracle::uniform(0, 40));
    const QpProblem qp = random_qp(n, m);
    const auto solution = solve_qp(qp, Eigen::VectorXd::Zero(n));
    CHECK(oracle::qp_kkt_residual(qp, solution.x, solution.multipliers) <= 1e-8);
  }
}

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

#ifndef TCCBF_QP_HPP
#define TCCBF_QP_HPP

#include <Eigen/Dense>

namespace tccbf {

/// Dense convex quadratic program
///   minimize    0.5 x' H x + g' x
///   subject to  A x >= b
/// with H symmetric positive definite.
struct QpProblem {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd constraints;      ///< one row per inequality
  Eigen::VectorXd lower_bounds;     ///< right-hand sides b
};

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;  ///< one per inequality row, >= 0
  int iterations = 0;
};

/// Primal active-set method. `feasible_start` must satisfy A x >= b (to
/// roundoff); the solver maintains feasibility throughout and terminates at
/// the unique optimum. Throws std::invalid_argument on an infeasible start
/// and std::runtime_error when the iteration cap is exceeded.
QpSolution solve_qp(const QpProblem& qp, const Eigen::VectorXd& feasible_start);

}  // namespace tccbf

#endif  // TCCBF_QP_HPP

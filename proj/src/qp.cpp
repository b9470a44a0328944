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

#include "tccbf/qp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tccbf {

namespace {

// Working-set bookkeeping over the Gram matrix A_W H^-1 A_W', which stays
// positive definite exactly while the active rows are independent.
struct WorkingSet {
  std::vector<int> rows;
  std::vector<char> member;

  explicit WorkingSet(int m) : member(static_cast<std::size_t>(m), 0) {}

  bool contains(int i) const { return member[static_cast<std::size_t>(i)] != 0; }
  void add(int i) {
    rows.push_back(i);
    member[static_cast<std::size_t>(i)] = 1;
  }
  void remove_at(std::size_t k) {
    member[static_cast<std::size_t>(rows[k])] = 0;
    rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(k));
  }
};

}  // namespace

QpSolution solve_qp(const QpProblem& qp, const Eigen::VectorXd& feasible_start) {
  const int n = static_cast<int>(qp.hessian.rows());
  const int m = static_cast<int>(qp.constraints.rows());
  if (qp.hessian.cols() != n || qp.gradient.size() != n)
    throw std::invalid_argument("qp: inconsistent objective dimensions");
  if (m > 0 && qp.constraints.cols() != n)
    throw std::invalid_argument("qp: inconsistent constraint dimensions");
  if (qp.lower_bounds.size() != m)
    throw std::invalid_argument("qp: inconsistent bound dimensions");
  if (feasible_start.size() != n)
    throw std::invalid_argument("qp: start point has wrong dimension");

  Eigen::LLT<Eigen::MatrixXd> llt(qp.hessian);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("qp: hessian is not positive definite");

  Eigen::VectorXd x = feasible_start;
  if (m > 0) {
    const Eigen::VectorXd slack = qp.constraints * x - qp.lower_bounds;
    if (slack.minCoeff() < -1e-8 * std::max(1.0, x.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("qp: start point is infeasible");
  }

  WorkingSet ws(m);

  // Solve the equality-constrained subproblem for the current working set:
  // step p with A_W p = 0 and multipliers lambda for the active rows.
  Eigen::VectorXd lambda_w;
  const auto subproblem = [&](Eigen::VectorXd* p) -> bool {
    const Eigen::VectorXd c = qp.gradient + qp.hessian * x;
    const Eigen::VectorXd hc = llt.solve(c);
    const std::size_t k = ws.rows.size();
    if (k == 0) {
      *p = -hc;
      lambda_w.resize(0);
      return true;
    }
    Eigen::MatrixXd at(n, static_cast<int>(k));
    for (std::size_t j = 0; j < k; ++j)
      at.col(static_cast<int>(j)) = qp.constraints.row(ws.rows[j]).transpose();
    const Eigen::MatrixXd y = llt.solve(at);
    const Eigen::MatrixXd gram = at.transpose() * y;
    Eigen::LDLT<Eigen::MatrixXd> gram_ldlt(gram);
    if (gram_ldlt.info() != Eigen::Success) return false;
    const Eigen::VectorXd d = gram_ldlt.vectorD();
    if (d.minCoeff() <= 1e-14 * std::max(1.0, d.maxCoeff())) return false;
    lambda_w = gram_ldlt.solve(at.transpose() * hc);
    *p = y * lambda_w - hc;
    return true;
  };

  // Seed with constraints already tight at the start point; skip any row that
  // would make the working set dependent.
  for (int i = 0; i < m && static_cast<int>(ws.rows.size()) < n; ++i) {
    const double gap = qp.constraints.row(i) * x - qp.lower_bounds[i];
    const double scale =
        std::max(1.0, qp.constraints.row(i).cwiseAbs().maxCoeff());
    if (std::abs(gap) <= 1e-11 * scale) {
      ws.add(i);
      Eigen::VectorXd unused;
      if (!subproblem(&unused)) ws.remove_at(ws.rows.size() - 1);
    }
  }

  const int max_iterations = 100 * (n + m) + 100;
  std::vector<std::pair<char, int>> events;  // debug trail
  QpSolution solution;
  bool at_subproblem_optimum = false;
  for (int iter = 0; iter < max_iterations; ++iter) {
    Eigen::VectorXd p;
    if (!subproblem(&p))
      throw std::runtime_error("qp: degenerate working set");
    if (!p.allFinite())
      throw std::runtime_error("qp: non-finite step, |W|=" +
                               std::to_string(ws.rows.size()));
    solution.iterations = iter + 1;

    // An unblocked full step lands on the working-set optimum; whatever
    // rounding noise the next solve produces, the point is stationary.
    const double step_scale = 1.0 + x.cwiseAbs().maxCoeff();
    if (at_subproblem_optimum || p.cwiseAbs().maxCoeff() <= 1e-12 * step_scale) {
      at_subproblem_optimum = false;
      // Stationary on the working set; check dual feasibility.
      int worst = -1;
      double worst_value = -1e-10;
      for (std::size_t j = 0; j < ws.rows.size(); ++j) {
        if (lambda_w[static_cast<int>(j)] < worst_value) {
          worst_value = lambda_w[static_cast<int>(j)];
          worst = static_cast<int>(j);
        }
      }
      if (worst < 0) {
        solution.x = x;
        solution.multipliers = Eigen::VectorXd::Zero(m);
        for (std::size_t j = 0; j < ws.rows.size(); ++j)
          solution.multipliers[ws.rows[j]] =
              std::max(0.0, lambda_w[static_cast<int>(j)]);
        return solution;
      }
      events.emplace_back('D', ws.rows[static_cast<std::size_t>(worst)]);
      ws.remove_at(static_cast<std::size_t>(worst));
      continue;
    }

    // Ratio test against rows outside the working set.
    double alpha = 1.0;
    int blocker = -1;
    for (int i = 0; i < m; ++i) {
      if (ws.contains(i)) continue;
      const double ap = qp.constraints.row(i) * p;
      if (ap >= -1e-13) continue;
      const double gap = qp.constraints.row(i) * x - qp.lower_bounds[i];
      const double t = std::max(0.0, gap / (-ap));
      if (t < alpha) {
        alpha = t;
        blocker = i;
      }
    }
    x += alpha * p;
    if (blocker >= 0) {
      events.emplace_back('A', blocker);
      ws.add(blocker);
      Eigen::VectorXd unused;
      if (!subproblem(&unused)) {
        // Numerically dependent blocking row; retreat and relax the working
        // set instead.
        events.emplace_back('F', blocker);
        ws.remove_at(ws.rows.size() - 1);
        if (!ws.rows.empty()) ws.remove_at(ws.rows.size() - 1);
      }
    } else {
      at_subproblem_optimum = true;
    }
  }
  {
    std::string msg = "qp: iteration limit exceeded; n=" + std::to_string(n) +
                      " m=" + std::to_string(m) + " |W|=" +
                      std::to_string(ws.rows.size()) + " trail:";
    const std::size_t start_idx = events.size() > 60 ? events.size() - 60 : 0;
    for (std::size_t i = start_idx; i < events.size(); ++i)
      msg += std::string(" ") + events[i].first + std::to_string(events[i].second);
    throw std::runtime_error(msg);
  }
}

}  // namespace tccbf

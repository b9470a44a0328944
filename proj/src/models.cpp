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

#include "tccbf/models.hpp"

#include <cmath>
#include <stdexcept>

namespace tccbf {

void AsvParams::validate() const {
  if (!(m11 > 0.0) || !(m22 > 0.0) || !(m33 > 0.0))
    throw std::invalid_argument("AsvParams: inertia diagonal must be positive");
  if (!(l > 0.0))
    throw std::invalid_argument("AsvParams: thruster moment arm must be positive");
  if (X_u > 0.0 || Y_v > 0.0 || N_r > 0.0)
    throw std::invalid_argument(
        "AsvParams: linear damping diagonal must be non-positive (SNAME sign)");
}

Eigen::Vector4d to_vector(const UnicycleState& s) {
  return {s.x, s.y, s.psi, s.u};
}

UnicycleState unicycle_state_from(const Eigen::Vector4d& v) {
  return {v[0], v[1], v[2], v[3]};
}

Eigen::Matrix<double, 6, 1> to_vector(const AsvState& s) {
  Eigen::Matrix<double, 6, 1> v;
  v << s.x, s.y, s.psi, s.u, s.v, s.r;
  return v;
}

AsvState asv_state_from(const Eigen::Matrix<double, 6, 1>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

Eigen::Vector4d unicycle_deriv(const UnicycleState& s, const UnicycleInput& in) {
  return {s.u * std::cos(s.psi), s.u * std::sin(s.psi), in.r, in.a};
}

Eigen::Matrix<double, 6, 1> asv_deriv(const AsvState& s, const AsvInput& in,
                                      const AsvParams& p) {
  const auto [tau_x, tau_n] = thrust_allocation(in.f_left, in.f_right, p.l);

  // Coriolis-centripetal loads for the diagonal inertia.
  const double c1 = -p.m22 * s.v * s.r;
  const double c2 = p.m11 * s.u * s.r;
  const double c3 = (p.m22 - p.m11) * s.u * s.v;

  // Damping loads D(nu)*nu; the coefficient matrix carries a leading minus.
  const double d1 = -(p.X_u + p.X_uu * std::abs(s.u)) * s.u;
  const double d2 = -((p.Y_v + p.Y_vv * std::abs(s.v)) * s.v + p.Y_r * s.r);
  const double d3 = -(p.N_v * s.v + (p.N_r + p.N_rrr * s.r * s.r) * s.r);

  const double cp = std::cos(s.psi);
  const double sp = std::sin(s.psi);

  Eigen::Matrix<double, 6, 1> deriv;
  deriv[0] = cp * s.u - sp * s.v;
  deriv[1] = sp * s.u + cp * s.v;
  deriv[2] = s.r;
  deriv[3] = (tau_x - c1 - d1) / p.m11;
  deriv[4] = (0.0 - c2 - d2) / p.m22;
  deriv[5] = (tau_n - c3 - d3) / p.m33;
  return deriv;
}

std::pair<double, double> thrust_allocation(double f_left, double f_right,
                                            double arm) {
  return {f_left + f_right, (-f_left + f_right) * arm};
}

std::pair<double, double> sog_cog(const AsvState& s) {
  if (s.u == 0.0 && s.v == 0.0)
    throw std::domain_error("course undefined at zero speed-over-ground");
  return {std::hypot(s.u, s.v), s.psi + std::atan2(s.v, s.u)};
}

Eigen::VectorXd rk4_step(const DerivFn& deriv, const Eigen::VectorXd& state,
                         const Eigen::VectorXd& input, double ts) {
  const Eigen::VectorXd k1 = deriv(state, input);
  const Eigen::VectorXd k2 = deriv(state + 0.5 * ts * k1, input);
  const Eigen::VectorXd k3 = deriv(state + 0.5 * ts * k2, input);
  const Eigen::VectorXd k4 = deriv(state + ts * k3, input);
  return state + (ts / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd rk4_step(const DynamicsModel& model, const Eigen::VectorXd& state,
                         const Eigen::VectorXd& input, double ts) {
  const Eigen::VectorXd k1 = model.deriv(state, input);
  const Eigen::VectorXd k2 = model.deriv(state + 0.5 * ts * k1, input);
  const Eigen::VectorXd k3 = model.deriv(state + 0.5 * ts * k2, input);
  const Eigen::VectorXd k4 = model.deriv(state + ts * k3, input);
  return state + (ts / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void rk4_step_with_jacobians(const DynamicsModel& model,
                             const Eigen::VectorXd& state,
                             const Eigen::VectorXd& input, double ts,
                             Eigen::VectorXd* next, Eigen::MatrixXd* a_d,
                             Eigen::MatrixXd* b_d) {
  const int nx = model.state_dim();
  Eigen::MatrixXd a1, b1, a2, b2, a3, b3, a4, b4;

  const Eigen::VectorXd k1 = model.deriv(state, input);
  model.deriv_jacobians(state, input, &a1, &b1);

  const Eigen::VectorXd x2 = state + 0.5 * ts * k1;
  const Eigen::VectorXd k2 = model.deriv(x2, input);
  model.deriv_jacobians(x2, input, &a2, &b2);
  const Eigen::MatrixXd dk2_dx =
      a2 * (Eigen::MatrixXd::Identity(nx, nx) + 0.5 * ts * a1);
  const Eigen::MatrixXd dk2_du = a2 * (0.5 * ts * b1) + b2;

  const Eigen::VectorXd x3 = state + 0.5 * ts * k2;
  const Eigen::VectorXd k3 = model.deriv(x3, input);
  model.deriv_jacobians(x3, input, &a3, &b3);
  const Eigen::MatrixXd dk3_dx =
      a3 * (Eigen::MatrixXd::Identity(nx, nx) + 0.5 * ts * dk2_dx);
  const Eigen::MatrixXd dk3_du = a3 * (0.5 * ts * dk2_du) + b3;

  const Eigen::VectorXd x4 = state + ts * k3;
  const Eigen::VectorXd k4 = model.deriv(x4, input);
  model.deriv_jacobians(x4, input, &a4, &b4);
  const Eigen::MatrixXd dk4_dx =
      a4 * (Eigen::MatrixXd::Identity(nx, nx) + ts * dk3_dx);
  const Eigen::MatrixXd dk4_du = a4 * (ts * dk3_du) + b4;

  *next = state + (ts / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  *a_d = Eigen::MatrixXd::Identity(nx, nx) +
         (ts / 6.0) * (a1 + 2.0 * dk2_dx + 2.0 * dk3_dx + dk4_dx);
  *b_d = (ts / 6.0) * (b1 + 2.0 * dk2_du + 2.0 * dk3_du + dk4_du);
}

Eigen::VectorXd UnicycleModel::deriv(const Eigen::VectorXd& state,
                                     const Eigen::VectorXd& input) const {
  return unicycle_deriv(unicycle_state_from(state), {input[0], input[1]});
}

void UnicycleModel::deriv_jacobians(const Eigen::VectorXd& state,
                                    const Eigen::VectorXd& input,
                                    Eigen::MatrixXd* a, Eigen::MatrixXd* b) const {
  (void)input;
  const double psi = state[2];
  const double u = state[3];
  *a = Eigen::MatrixXd::Zero(4, 4);
  (*a)(0, 2) = -u * std::sin(psi);
  (*a)(0, 3) = std::cos(psi);
  (*a)(1, 2) = u * std::cos(psi);
  (*a)(1, 3) = std::sin(psi);
  *b = Eigen::MatrixXd::Zero(4, 2);
  (*b)(2, 0) = 1.0;
  (*b)(3, 1) = 1.0;
}

PlanarKinematicPose UnicycleModel::pose_of(const Eigen::VectorXd& state) const {
  return {state[0], state[1], state[2], state[3]};
}

Eigen::MatrixXd UnicycleModel::pose_jacobian(const Eigen::VectorXd& state) const {
  (void)state;
  return Eigen::MatrixXd::Identity(4, 4);
}

AsvModel::AsvModel(const AsvParams& params) : params_(params) {
  params_.validate();
}

Eigen::VectorXd AsvModel::deriv(const Eigen::VectorXd& state,
                                const Eigen::VectorXd& input) const {
  Eigen::Matrix<double, 6, 1> s(state);
  return asv_deriv(asv_state_from(s), {input[0], input[1]}, params_);
}

void AsvModel::deriv_jacobians(const Eigen::VectorXd& state,
                               const Eigen::VectorXd& input, Eigen::MatrixXd* a,
                               Eigen::MatrixXd* b) const {
  (void)input;
  const AsvParams& p = params_;
  const double psi = state[2];
  const double u = state[3];
  const double v = state[4];
  const double r = state[5];
  const double cp = std::cos(psi);
  const double sp = std::sin(psi);

  *a = Eigen::MatrixXd::Zero(6, 6);
  // Kinematics.
  (*a)(0, 2) = -sp * u - cp * v;
  (*a)(0, 3) = cp;
  (*a)(0, 4) = -sp;
  (*a)(1, 2) = cp * u - sp * v;
  (*a)(1, 3) = sp;
  (*a)(1, 4) = cp;
  (*a)(2, 5) = 1.0;
  // Kinetics. d(|u|u)/du = 2|u|.
  (*a)(3, 3) = (p.X_u + 2.0 * p.X_uu * std::abs(u)) / p.m11;
  (*a)(3, 4) = p.m22 * r / p.m11;
  (*a)(3, 5) = p.m22 * v / p.m11;
  (*a)(4, 3) = -p.m11 * r / p.m22;
  (*a)(4, 4) = (p.Y_v + 2.0 * p.Y_vv * std::abs(v)) / p.m22;
  (*a)(4, 5) = (-p.m11 * u + p.Y_r) / p.m22;
  (*a)(5, 3) = -(p.m22 - p.m11) * v / p.m33;
  (*a)(5, 4) = (-(p.m22 - p.m11) * u + p.N_v) / p.m33;
  (*a)(5, 5) = (p.N_r + 3.0 * p.N_rrr * r * r) / p.m33;

  *b = Eigen::MatrixXd::Zero(6, 2);
  (*b)(3, 0) = 1.0 / p.m11;
  (*b)(3, 1) = 1.0 / p.m11;
  (*b)(5, 0) = -p.l / p.m33;
  (*b)(5, 1) = p.l / p.m33;
}

PlanarKinematicPose AsvModel::pose_of(const Eigen::VectorXd& state) const {
  const double u = state[3];
  const double v = state[4];
  return {state[0], state[1], state[2] + std::atan2(v, u), std::hypot(u, v)};
}

Eigen::MatrixXd AsvModel::pose_jacobian(const Eigen::VectorXd& state) const {
  const double u = state[3];
  const double v = state[4];
  const double sq = std::max(u * u + v * v, 1e-12);
  const double speed = std::sqrt(sq);

  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(4, 6);
  j(0, 0) = 1.0;
  j(1, 1) = 1.0;
  j(2, 2) = 1.0;
  j(2, 3) = -v / sq;
  j(2, 4) = u / sq;
  j(3, 3) = u / speed;
  j(3, 4) = v / speed;
  return j;
}

}  // namespace tccbf

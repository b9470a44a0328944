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

#ifndef TCCBF_MODELS_HPP
#define TCCBF_MODELS_HPP

#include <Eigen/Dense>
#include <functional>
#include <utility>

#include "tccbf/pose.hpp"

namespace tccbf {

/// Unicycle state: position, heading (unwrapped), forward speed.
/// Negative speed is representable; input bounds keep it positive in practice.
struct UnicycleState {
  double x = 0.0;    ///< [m]
  double y = 0.0;    ///< [m]
  double psi = 0.0;  ///< heading [rad]
  double u = 0.0;    ///< forward speed [m/s]
};

/// Unicycle input: turn rate and forward acceleration.
struct UnicycleInput {
  double r = 0.0;  ///< turn rate [rad/s]
  double a = 0.0;  ///< forward acceleration [m/s^2]
};

/// 3-DOF surface vessel state: planar pose plus body-fixed velocities
/// (surge u, sway v, yaw rate r).
struct AsvState {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;
  double u = 0.0;  ///< surge speed [m/s]
  double v = 0.0;  ///< sway speed [m/s]
  double r = 0.0;  ///< yaw rate [rad/s]
};

/// Differential thruster pair.
struct AsvInput {
  double f_left = 0.0;   ///< left thrust [N]
  double f_right = 0.0;  ///< right thrust [N]
};

/// Diagonal rigid-body/added-mass inertia and damping coefficients for a
/// port/starboard symmetric vessel. Hydrodynamic coefficients follow the
/// SNAME sign convention (damping coefficients are negative).
struct AsvParams {
  double m11 = 35.0;  ///< surge inertia incl. added mass [kg]
  double m22 = 45.0;  ///< sway inertia incl. added mass [kg]
  double m33 = 6.0;   ///< yaw inertia incl. added mass [kg m^2]
  double X_u = -15.0;
  double X_uu = -10.0;
  double Y_v = -40.0;
  double Y_vv = -40.0;
  double Y_r = -0.3;
  double N_v = -0.2;
  double N_r = -8.0;
  double N_rrr = -3.0;
  double l = 0.3;  ///< thruster moment arm [m]

  /// Throws std::invalid_argument on non-positive inertias/arm or
  /// destabilizing (positive) linear damping diagonal.
  void validate() const;
};

Eigen::Vector4d to_vector(const UnicycleState& s);
UnicycleState unicycle_state_from(const Eigen::Vector4d& v);
Eigen::Matrix<double, 6, 1> to_vector(const AsvState& s);
AsvState asv_state_from(const Eigen::Matrix<double, 6, 1>& v);

/// Continuous-time unicycle dynamics: (u cos psi, u sin psi, r, a).
Eigen::Vector4d unicycle_deriv(const UnicycleState& s, const UnicycleInput& in);

/// Continuous-time 3-DOF vessel dynamics. Kinematics rotate body velocities
/// into the inertial frame; kinetics invert the diagonal inertia against
/// thrust minus Coriolis-centripetal and damping loads.
Eigen::Matrix<double, 6, 1> asv_deriv(const AsvState& s, const AsvInput& in,
                                      const AsvParams& p);

/// Maps the thruster pair to net surge force and yaw moment:
/// tau_X = f_left + f_right, tau_N = (-f_left + f_right) * arm.
std::pair<double, double> thrust_allocation(double f_left, double f_right,
                                            double arm);

/// Speed over ground V = sqrt(u^2 + v^2) and course over ground
/// psi_w = psi + atan2(v, u). Throws std::domain_error at zero speed over
/// ground, where the course is undefined.
std::pair<double, double> sog_cog(const AsvState& s);

using DerivFn =
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

/// One classical 4th-order Runge-Kutta step with the input held constant.
Eigen::VectorXd rk4_step(const DerivFn& deriv, const Eigen::VectorXd& state,
                         const Eigen::VectorXd& input, double ts);

/// Continuous-time vehicle dynamics with analytic Jacobians and the mapping
/// onto the shared planar kinematic pose. Implementations are stateless and
/// safe to share across threads.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;

  virtual int state_dim() const = 0;
  virtual int input_dim() const = 0;

  virtual Eigen::VectorXd deriv(const Eigen::VectorXd& state,
                                const Eigen::VectorXd& input) const = 0;

  /// Analytic Jacobians of deriv() w.r.t. state (a) and input (b).
  virtual void deriv_jacobians(const Eigen::VectorXd& state,
                               const Eigen::VectorXd& input,
                               Eigen::MatrixXd* a, Eigen::MatrixXd* b) const = 0;

  virtual PlanarKinematicPose pose_of(const Eigen::VectorXd& state) const = 0;

  /// Jacobian of (x, y, course, speed) w.r.t. the state vector, 4 x state_dim.
  virtual Eigen::MatrixXd pose_jacobian(const Eigen::VectorXd& state) const = 0;
};

class UnicycleModel final : public DynamicsModel {
 public:
  int state_dim() const override { return 4; }
  int input_dim() const override { return 2; }
  Eigen::VectorXd deriv(const Eigen::VectorXd& state,
                        const Eigen::VectorXd& input) const override;
  void deriv_jacobians(const Eigen::VectorXd& state, const Eigen::VectorXd& input,
                       Eigen::MatrixXd* a, Eigen::MatrixXd* b) const override;
  PlanarKinematicPose pose_of(const Eigen::VectorXd& state) const override;
  Eigen::MatrixXd pose_jacobian(const Eigen::VectorXd& state) const override;
};

class AsvModel final : public DynamicsModel {
 public:
  explicit AsvModel(const AsvParams& params);

  int state_dim() const override { return 6; }
  int input_dim() const override { return 2; }
  Eigen::VectorXd deriv(const Eigen::VectorXd& state,
                        const Eigen::VectorXd& input) const override;
  void deriv_jacobians(const Eigen::VectorXd& state, const Eigen::VectorXd& input,
                       Eigen::MatrixXd* a, Eigen::MatrixXd* b) const override;
  PlanarKinematicPose pose_of(const Eigen::VectorXd& state) const override;
  Eigen::MatrixXd pose_jacobian(const Eigen::VectorXd& state) const override;

  const AsvParams& params() const { return params_; }

 private:
  AsvParams params_;
};

/// Convenience overload dispatching through a model.
Eigen::VectorXd rk4_step(const DynamicsModel& model, const Eigen::VectorXd& state,
                         const Eigen::VectorXd& input, double ts);

/// RK4 step together with the discrete-time Jacobians d(next)/d(state) and
/// d(next)/d(input), chained through the stage derivatives analytically.
void rk4_step_with_jacobians(const DynamicsModel& model,
                             const Eigen::VectorXd& state,
                             const Eigen::VectorXd& input, double ts,
                             Eigen::VectorXd* next, Eigen::MatrixXd* a_d,
                             Eigen::MatrixXd* b_d);

}  // namespace tccbf

#endif  // TCCBF_MODELS_HPP

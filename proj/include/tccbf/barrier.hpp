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

#ifndef TCCBF_BARRIER_HPP
#define TCCBF_BARRIER_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "tccbf/pose.hpp"

namespace tccbf {

/// Circular obstacle drifting at constant planar velocity.
struct Obstacle {
  double x = 0.0;       ///< center east [m]
  double y = 0.0;       ///< center north [m]
  double radius = 1.0;  ///< [m], > 0
  double vx = 0.0;      ///< [m/s]
  double vy = 0.0;      ///< [m/s]
};

/// Which barrier the avoidance constraints are built from.
enum class BarrierKind {
  kEuclidean,      ///< higher-order Euclidean-distance barrier
  kTurningCircle,  ///< smooth max over left/right turning-circle clearances
  kDistance,       ///< plain distance >= 0 at every predicted step (baseline)
};

std::string to_string(BarrierKind kind);
BarrierKind barrier_kind_from_string(const std::string& name);

/// Barrier parameters. The decay used by the discrete constraint depends on
/// the kind: alpha_e for the Euclidean barrier, alpha_t for the
/// turning-circle barrier; the distance baseline has no decay law.
struct BarrierConfig {
  BarrierKind kind = BarrierKind::kTurningCircle;
  double alpha = 0.5;          ///< higher-order gain [1/s], > 0
  double alpha_e = 0.05;       ///< discrete decay for the Euclidean barrier, (0,1]
  double alpha_t = 0.05;       ///< discrete decay for the turning-circle barrier, (0,1]
  double r_max = 0.3;          ///< maximum turn rate [rad/s], > 0
  double safety_radius = 0.5;  ///< vehicle safety radius [m], >= 0
  double smoothing = 5.0;      ///< smooth-max sharpness k, > 0

  /// Decay gamma of the active kind. Throws for the distance baseline.
  double decay() const;

  /// Throws std::invalid_argument when any field is out of range.
  void validate() const;
};

/// Signed clearance to the inflated obstacle disc:
/// dist((x,y), center) - (radius + safety_radius).
double euclid_h(const PlanarKinematicPose& pose, const Obstacle& obs,
                const BarrierConfig& cfg);

/// Time derivative of euclid_h: the velocity projected on the line of sight.
/// With relative_velocity set, the obstacle's drift is subtracted from the
/// vehicle velocity first. Throws std::domain_error within 1e-6 m of the
/// obstacle center.
double euclid_h_dot(const PlanarKinematicPose& pose, const Obstacle& obs,
                    bool relative_velocity);

/// Higher-order Euclidean-distance barrier h_e = h_dot + alpha * h, with the
/// obstacle's drift treated as relative velocity.
double ed_cbf(const PlanarKinematicPose& pose, const Obstacle& obs,
              const BarrierConfig& cfg);

/// Minimum-radius turning circle at the given speed: R = speed / r_max.
double turning_radius(double speed, double r_max);

/// Centers of the right and left turning circles, offset R from the position
/// perpendicular to the course.
std::pair<Eigen::Vector2d, Eigen::Vector2d> turning_centers(
    const PlanarKinematicPose& pose, double radius);

/// Clearances of the right and left turning circles from the obstacle:
/// h = dist(center, obstacle) - (radius + safety_radius + R).
std::pair<double, double> tc_components(const PlanarKinematicPose& pose,
                                        const Obstacle& obs,
                                        const BarrierConfig& cfg);

/// Overflow-safe smooth maximum (1/k) ln((e^{ka} + e^{kb}) / 2). Lies in
/// [max(a,b) - ln(2)/k, max(a,b)].
double smooth_max(double a, double b, double k);

/// Turning-circle barrier: smooth max of the two clearances. Non-negative
/// values certify that at least one turning circle clears the obstacle.
double tc_cbf(const PlanarKinematicPose& pose, const Obstacle& obs,
              const BarrierConfig& cfg);

/// Discrete-time barrier condition residual (h_next - h_now) + decay * h_now.
/// Non-negative iff h_next >= (1 - decay) * h_now.
double discrete_cbf_residual(double h_now, double h_next, double decay);

/// Barrier value of the selected kind at a pose.
double barrier_value(BarrierKind kind, const PlanarKinematicPose& pose,
                     const Obstacle& obs, const BarrierConfig& cfg);

/// As barrier_value, but with the line-of-sight singularity of the Euclidean
/// kind clamped at 1e-6 m instead of throwing. Intended for iterative solvers
/// whose trial points may pass arbitrarily close to an obstacle center.
double barrier_value_clamped(BarrierKind kind, const PlanarKinematicPose& pose,
                             const Obstacle& obs, const BarrierConfig& cfg);

/// Analytic gradient of the selected barrier w.r.t. (x, y, course, speed).
Eigen::Vector4d barrier_gradient(BarrierKind kind,
                                 const PlanarKinematicPose& pose,
                                 const Obstacle& obs, const BarrierConfig& cfg);

/// Regular evaluation grid for level-set rendering.
struct GridSpec {
  double x_min = -10.0;
  double x_max = 10.0;
  double y_min = -10.0;
  double y_max = 10.0;
  double resolution = 0.1;  ///< node spacing [m], > 0
};

struct LevelSetGrid {
  BarrierKind kind;
  double course = 0.0;
  double speed = 0.0;
  Obstacle obstacle;
  BarrierConfig config;
  std::vector<double> xs;
  std::vector<double> ys;
  Eigen::MatrixXd values;  ///< values(i, j) at (xs[j], ys[i])

  /// Extent of the restricted region {value < 0} along y (perpendicular to a
  /// zero course). Returns 0 when the region is empty.
  double restricted_extent_perpendicular() const;
};

/// Evaluates the selected barrier on the grid at fixed course and speed.
/// Throws std::invalid_argument on a non-positive resolution.
LevelSetGrid level_set_grid(BarrierKind kind, const BarrierConfig& cfg,
                            const Obstacle& obs, double course, double speed,
                            const GridSpec& spec);

}  // namespace tccbf

#endif  // TCCBF_BARRIER_HPP

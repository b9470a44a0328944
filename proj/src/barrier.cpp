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

#include "tccbf/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tccbf {

namespace {

constexpr double kLosEpsilon = 1e-6;  // line-of-sight singularity guard [m]

// Distance to the obstacle center, clamped away from the singularity.
double clamped_center_distance(const PlanarKinematicPose& pose,
                               const Obstacle& obs) {
  return std::max(std::hypot(pose.x - obs.x, pose.y - obs.y), kLosEpsilon);
}

}  // namespace

std::string to_string(BarrierKind kind) {
  switch (kind) {
    case BarrierKind::kEuclidean:
      return "ed";
    case BarrierKind::kTurningCircle:
      return "tc";
    case BarrierKind::kDistance:
      return "dc";
  }
  return "unknown";
}

BarrierKind barrier_kind_from_string(const std::string& name) {
  if (name == "ed") return BarrierKind::kEuclidean;
  if (name == "tc") return BarrierKind::kTurningCircle;
  if (name == "dc") return BarrierKind::kDistance;
  throw std::invalid_argument("unknown barrier kind '" + name +
                              "' (expected ed, tc, or dc)");
}

double BarrierConfig::decay() const {
  switch (kind) {
    case BarrierKind::kEuclidean:
      return alpha_e;
    case BarrierKind::kTurningCircle:
      return alpha_t;
    case BarrierKind::kDistance:
      throw std::logic_error("distance baseline has no decay law");
  }
  throw std::logic_error("unreachable");
}

void BarrierConfig::validate() const {
  if (kind == BarrierKind::kDistance) return;  // gains unused by the baseline
  if (!(alpha > 0.0))
    throw std::invalid_argument("BarrierConfig: alpha must be > 0");
  if (!(alpha_e > 0.0 && alpha_e <= 1.0))
    throw std::invalid_argument("BarrierConfig: alpha_e must be in (0, 1]");
  if (!(alpha_t > 0.0 && alpha_t <= 1.0))
    throw std::invalid_argument("BarrierConfig: alpha_t must be in (0, 1]");
  if (!(r_max > 0.0))
    throw std::invalid_argument("BarrierConfig: r_max must be > 0");
  if (!(safety_radius >= 0.0))
    throw std::invalid_argument("BarrierConfig: safety_radius must be >= 0");
  if (!(smoothing > 0.0))
    throw std::invalid_argument("BarrierConfig: smoothing must be > 0");
}

double euclid_h(const PlanarKinematicPose& pose, const Obstacle& obs,
                const BarrierConfig& cfg) {
  return std::hypot(pose.x - obs.x, pose.y - obs.y) -
         (obs.radius + cfg.safety_radius);
}

double euclid_h_dot(const PlanarKinematicPose& pose, const Obstacle& obs,
                    bool relative_velocity) {
  const double px = pose.x - obs.x;
  const double py = pose.y - obs.y;
  const double dist = std::hypot(px, py);
  if (dist < kLosEpsilon)
    throw std::domain_error("line-of-sight direction undefined");

  double wx = pose.speed * std::cos(pose.course);
  double wy = pose.speed * std::sin(pose.course);
  if (relative_velocity) {
    wx -= obs.vx;
    wy -= obs.vy;
  }
  return (px * wx + py * wy) / dist;
}

double ed_cbf(const PlanarKinematicPose& pose, const Obstacle& obs,
              const BarrierConfig& cfg) {
  return euclid_h_dot(pose, obs, /*relative_velocity=*/true) +
         cfg.alpha * euclid_h(pose, obs, cfg);
}

double turning_radius(double speed, double r_max) { return speed / r_max; }

std::pair<Eigen::Vector2d, Eigen::Vector2d> turning_centers(
    const PlanarKinematicPose& pose, double radius) {
  // cos(c - pi/2) = sin c, sin(c - pi/2) = -cos c.
  const double sc = std::sin(pose.course);
  const double cc = std::cos(pose.course);
  Eigen::Vector2d right{pose.x + radius * sc, pose.y - radius * cc};
  Eigen::Vector2d left{pose.x - radius * sc, pose.y + radius * cc};
  return {right, left};
}

std::pair<double, double> tc_components(const PlanarKinematicPose& pose,
                                        const Obstacle& obs,
                                        const BarrierConfig& cfg) {
  const double radius = turning_radius(pose.speed, cfg.r_max);
  const auto [right, left] = turning_centers(pose, radius);
  const double margin = obs.radius + cfg.safety_radius + radius;
  const double h_right = std::hypot(right.x() - obs.x, right.y() - obs.y) - margin;
  const double h_left = std::hypot(left.x() - obs.x, left.y() - obs.y) - margin;
  return {h_right, h_left};
}

double smooth_max(double a, double b, double k) {
  const double hi = std::max(a, b);
  const double gap = hi - std::min(a, b);
  // Shift by the max component; exp argument is then <= 0.
  return hi + (std::log1p(std::exp(-k * gap)) - std::log(2.0)) / k;
}

double tc_cbf(const PlanarKinematicPose& pose, const Obstacle& obs,
              const BarrierConfig& cfg) {
  const auto [h_right, h_left] = tc_components(pose, obs, cfg);
  return smooth_max(h_right, h_left, cfg.smoothing);
}

double discrete_cbf_residual(double h_now, double h_next, double decay) {
  return (h_next - h_now) + decay * h_now;
}

double barrier_value(BarrierKind kind, const PlanarKinematicPose& pose,
                     const Obstacle& obs, const BarrierConfig& cfg) {
  switch (kind) {
    case BarrierKind::kEuclidean:
      return ed_cbf(pose, obs, cfg);
    case BarrierKind::kTurningCircle:
      return tc_cbf(pose, obs, cfg);
    case BarrierKind::kDistance:
      return euclid_h(pose, obs, cfg);
  }
  throw std::logic_error("unreachable");
}

double barrier_value_clamped(BarrierKind kind, const PlanarKinematicPose& pose,
                             const Obstacle& obs, const BarrierConfig& cfg) {
  if (kind != BarrierKind::kEuclidean) return barrier_value(kind, pose, obs, cfg);
  const double dist = clamped_center_distance(pose, obs);
  const double wx = pose.speed * std::cos(pose.course) - obs.vx;
  const double wy = pose.speed * std::sin(pose.course) - obs.vy;
  const double h_dot = ((pose.x - obs.x) * wx + (pose.y - obs.y) * wy) / dist;
  return h_dot + cfg.alpha * euclid_h(pose, obs, cfg);
}

namespace {

// Gradient of euclid_h w.r.t. (x, y, course, speed).
Eigen::Vector4d euclid_h_gradient(const PlanarKinematicPose& pose,
                                  const Obstacle& obs) {
  const double dist = clamped_center_distance(pose, obs);
  Eigen::Vector4d g = Eigen::Vector4d::Zero();
  g[0] = (pose.x - obs.x) / dist;
  g[1] = (pose.y - obs.y) / dist;
  return g;
}

Eigen::Vector4d ed_cbf_gradient(const PlanarKinematicPose& pose,
                                const Obstacle& obs, const BarrierConfig& cfg) {
  const double px = pose.x - obs.x;
  const double py = pose.y - obs.y;
  const double dist = clamped_center_distance(pose, obs);
  const double cc = std::cos(pose.course);
  const double sc = std::sin(pose.course);
  const double wx = pose.speed * cc - obs.vx;
  const double wy = pose.speed * sc - obs.vy;
  const double proj = px * wx + py * wy;

  Eigen::Vector4d g;
  g[0] = wx / dist - proj * px / (dist * dist * dist);
  g[1] = wy / dist - proj * py / (dist * dist * dist);
  g[2] = (px * (-pose.speed * sc) + py * (pose.speed * cc)) / dist;
  g[3] = (px * cc + py * sc) / dist;
  return g + cfg.alpha * euclid_h_gradient(pose, obs);
}

Eigen::Vector4d tc_cbf_gradient(const PlanarKinematicPose& pose,
                                const Obstacle& obs, const BarrierConfig& cfg) {
  const double inv_rmax = 1.0 / cfg.r_max;
  const double radius = pose.speed * inv_rmax;
  const double sc = std::sin(pose.course);
  const double cc = std::cos(pose.course);

  // side = -1 for the right circle, +1 for the left.
  const auto component_gradient = [&](double side) {
    const double cx = pose.x - side * radius * sc;
    const double cy = pose.y + side * radius * cc;
    const double dx = cx - obs.x;
    const double dy = cy - obs.y;
    const double dist = std::max(std::hypot(dx, dy), kLosEpsilon);
    Eigen::Vector4d g;
    g[0] = dx / dist;
    g[1] = dy / dist;
    g[2] = (dx * (-side * radius * cc) + dy * (-side * radius * sc)) / dist;
    g[3] = (dx * (-side * sc) + dy * (side * cc)) * inv_rmax / dist - inv_rmax;
    return g;
  };

  const auto [h_right, h_left] = tc_components(pose, obs, cfg);
  // Softmax weights, shifted by the max component.
  const double hi = std::max(h_right, h_left);
  const double er = std::exp(cfg.smoothing * (h_right - hi));
  const double el = std::exp(cfg.smoothing * (h_left - hi));
  const double wr = er / (er + el);
  const double wl = el / (er + el);
  return wr * component_gradient(-1.0) + wl * component_gradient(+1.0);
}

}  // namespace

Eigen::Vector4d barrier_gradient(BarrierKind kind,
                                 const PlanarKinematicPose& pose,
                                 const Obstacle& obs, const BarrierConfig& cfg) {
  switch (kind) {
    case BarrierKind::kEuclidean:
      return ed_cbf_gradient(pose, obs, cfg);
    case BarrierKind::kTurningCircle:
      return tc_cbf_gradient(pose, obs, cfg);
    case BarrierKind::kDistance:
      return euclid_h_gradient(pose, obs);
  }
  throw std::logic_error("unreachable");
}

double LevelSetGrid::restricted_extent_perpendicular() const {
  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  for (int i = 0; i < values.rows(); ++i) {
    for (int j = 0; j < values.cols(); ++j) {
      if (values(i, j) < 0.0) {
        if (!any) {
          lo = hi = ys[static_cast<std::size_t>(i)];
          any = true;
        } else {
          lo = std::min(lo, ys[static_cast<std::size_t>(i)]);
          hi = std::max(hi, ys[static_cast<std::size_t>(i)]);
        }
      }
    }
  }
  return any ? hi - lo : 0.0;
}

LevelSetGrid level_set_grid(BarrierKind kind, const BarrierConfig& cfg,
                            const Obstacle& obs, double course, double speed,
                            const GridSpec& spec) {
  if (!(spec.resolution > 0.0))
    throw std::invalid_argument("grid resolution must be positive");
  if (!(spec.x_max > spec.x_min) || !(spec.y_max > spec.y_min))
    throw std::invalid_argument("grid extents must be non-empty");

  LevelSetGrid grid;
  grid.kind = kind;
  grid.course = course;
  grid.speed = speed;
  grid.obstacle = obs;
  grid.config = cfg;

  const int nx = static_cast<int>(
                     std::floor((spec.x_max - spec.x_min) / spec.resolution + 1e-9)) +
                 1;
  const int ny = static_cast<int>(
                     std::floor((spec.y_max - spec.y_min) / spec.resolution + 1e-9)) +
                 1;
  grid.xs.resize(static_cast<std::size_t>(nx));
  grid.ys.resize(static_cast<std::size_t>(ny));
  for (int j = 0; j < nx; ++j)
    grid.xs[static_cast<std::size_t>(j)] = spec.x_min + j * spec.resolution;
  for (int i = 0; i < ny; ++i)
    grid.ys[static_cast<std::size_t>(i)] = spec.y_min + i * spec.resolution;

  grid.values.resize(ny, nx);
  for (int i = 0; i < ny; ++i) {
    for (int j = 0; j < nx; ++j) {
      const PlanarKinematicPose pose{grid.xs[static_cast<std::size_t>(j)],
                                     grid.ys[static_cast<std::size_t>(i)], course,
                                     speed};
      grid.values(i, j) = barrier_value_clamped(kind, pose, obs, cfg);
    }
  }
  return grid;
}

}  // namespace tccbf

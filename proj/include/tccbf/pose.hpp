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

#ifndef TCCBF_POSE_HPP
#define TCCBF_POSE_HPP

#include <cmath>
#include <numbers>

namespace tccbf {

/// Planar kinematic pose shared by all vehicle classes: position, direction
/// of travel, and ground speed. For a unicycle this is (x, y, psi, u); for a
/// surface vessel it is (x, y, course-over-ground, speed-over-ground).
struct PlanarKinematicPose {
  double x = 0.0;       ///< position east [m]
  double y = 0.0;       ///< position north [m]
  double course = 0.0;  ///< direction of travel [rad], unwrapped
  double speed = 0.0;   ///< ground speed [m/s]
};

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double angle) {
  const double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(angle, two_pi);
  if (wrapped <= -std::numbers::pi) wrapped += two_pi;
  return wrapped;
}

}  // namespace tccbf

#endif  // TCCBF_POSE_HPP

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

#ifndef TCCBF_METRICS_HPP
#define TCCBF_METRICS_HPP

#include <string>
#include <utility>
#include <vector>

#include "tccbf/sim.hpp"

namespace tccbf {

/// Run summary. Averages are taken over [0, arrival_time]; the minimum
/// clearance spans the whole log. The speed error uses the forward speed for
/// the unicycle and the speed over ground for the vessel.
struct Metrics {
  bool reached = false;
  double arrival_time = 0.0;       ///< [s], valid when reached
  double speed_error = 0.0;        ///< mean |speed - u_r| [m/s]
  double cross_track_error = 0.0;  ///< mean |y| [m]
  double min_clearance = 0.0;      ///< min distance to an obstacle boundary [m]
};

/// Computes the summary of a logged run. Arrival time interpolates the goal
/// crossing between the last two samples.
Metrics compute_metrics(const TrajectoryLog& log);

struct ComparisonEntry {
  std::string label;
  Metrics metrics;
};

struct ComparisonTable {
  std::string scenario_name;
  std::vector<ComparisonEntry> entries;
  // Index of the best entry per column, -1 when no run reached the goal.
  int best_arrival = -1;
  int best_speed = -1;
  int best_cte = -1;
};

/// Side-by-side metrics for runs of the same scenario geometry under
/// different controllers. Throws std::invalid_argument when the logs come
/// from different scenarios.
ComparisonTable compare(
    const std::vector<std::pair<std::string, const TrajectoryLog*>>& runs);

/// Aligned plain-text rendering; the best value per column is starred.
std::string comparison_text(const ComparisonTable& table);

std::string comparison_csv(const ComparisonTable& table);

std::string metrics_csv(const Metrics& metrics);

}  // namespace tccbf

#endif  // TCCBF_METRICS_HPP

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

#ifndef TCCBF_PLOTS_HPP
#define TCCBF_PLOTS_HPP

#include <string>

#include "tccbf/metrics.hpp"
#include "tccbf/sim.hpp"

namespace tccbf {

/// Writes <stem>_trajectory.svg (path with obstacle snapshots) and
/// <stem>_timeseries.svg (barrier values, clearance, speed, inputs) into the
/// directory. Deterministic output. Throws std::runtime_error on an empty log.
void emit_plots(const TrajectoryLog& log, const std::string& directory,
                const std::string& stem);

/// Filled rendering of the restricted region {value < 0} with the obstacle
/// outline.
void emit_levelset_plot(const LevelSetGrid& grid, const std::string& path);

}  // namespace tccbf

#endif  // TCCBF_PLOTS_HPP

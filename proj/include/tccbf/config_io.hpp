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

#ifndef TCCBF_CONFIG_IO_HPP
#define TCCBF_CONFIG_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "tccbf/sim.hpp"

namespace tccbf {

struct SweepResult;

/// Shortest round-trip decimal rendering of a double (locale independent).
std::string format_double(double value);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Full scenario echo, suitable as a reproducibility sidecar: feeding it back
/// through scenario_from_json reruns the identical scenario.
nlohmann::json scenario_to_json(const Scenario& scenario);

/// Strict parser: unknown keys are rejected at every level, the reference
/// path must be "straight-x", and all invariants are validated.
Scenario scenario_from_json(const nlohmann::json& j);

Scenario load_scenario_file(const std::string& path);
void write_scenario_file(const Scenario& scenario, const std::string& path);

nlohmann::json asv_params_to_json(const AsvParams& params);

/// Strict parser for the vessel parameter file: keys must match the parameter
/// field names exactly; unknown keys are rejected.
AsvParams asv_params_from_json(const nlohmann::json& j);
AsvParams load_asv_params(const std::string& path);

/// Trajectory log as CSV, one row per control step (column order documented
/// in the README).
std::string trajectory_csv(const TrajectoryLog& log);

/// Aggregated sweep summary, one row per grid point.
std::string sweep_csv(const std::vector<SweepResult>& results);

/// Level-set grid as CSV (x, y, value rows) with a one-line comment header
/// naming the kind and parameters.
std::string levelset_csv(const LevelSetGrid& grid);

}  // namespace tccbf

#endif  // TCCBF_CONFIG_IO_HPP

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

#include "tccbf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tccbf/config_io.hpp"

namespace tccbf {

namespace {

double ground_speed(const TrajectoryLog& log, const Eigen::VectorXd& state) {
  if (log.scenario.vehicle == VehicleKind::kUnicycle) return state[3];
  return std::hypot(state[3], state[4]);
}

// Geometry fingerprint used to confirm two logs ran the same scenario.
std::string scenario_signature(const Scenario& s) {
  std::ostringstream sig;
  sig << to_string(s.vehicle) << '|' << s.goal_x << '|' << s.reference_speed
      << '|' << s.max_time << '|' << s.initial_state.transpose() << '|';
  for (const Obstacle& o : s.obstacles)
    sig << o.x << ',' << o.y << ',' << o.radius << ',' << o.vx << ',' << o.vy
        << ';';
  return sig.str();
}

}  // namespace

Metrics compute_metrics(const TrajectoryLog& log) {
  if (log.steps.empty()) throw std::invalid_argument("metrics: empty log");
  const Scenario& scenario = log.scenario;

  Metrics m;
  m.min_clearance = std::numeric_limits<double>::infinity();
  for (const StepRecord& rec : log.steps)
    m.min_clearance = std::min(m.min_clearance, rec.obstacle_clearance);

  // Interpolated goal crossing.
  double t_arrival = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 1; k < log.steps.size(); ++k) {
    if (log.steps[k].state[0] >= scenario.goal_x) {
      const double x_prev = log.steps[k - 1].state[0];
      const double x_here = log.steps[k].state[0];
      const double span = x_here - x_prev;
      const double fraction =
          span > 0.0 ? (scenario.goal_x - x_prev) / span : 1.0;
      t_arrival = log.steps[k - 1].t +
                  fraction * (log.steps[k].t - log.steps[k - 1].t);
      m.reached = true;
      break;
    }
  }
  m.arrival_time = t_arrival;

  const double window = m.reached ? t_arrival : log.steps.back().t;
  double speed_sum = 0.0;
  double cte_sum = 0.0;
  int count = 0;
  for (const StepRecord& rec : log.steps) {
    if (rec.t > window) break;
    speed_sum += std::abs(ground_speed(log, rec.state) - scenario.reference_speed);
    cte_sum += std::abs(rec.state[1]);
    ++count;
  }
  if (count > 0) {
    m.speed_error = speed_sum / count;
    m.cross_track_error = cte_sum / count;
  }
  return m;
}

ComparisonTable compare(
    const std::vector<std::pair<std::string, const TrajectoryLog*>>& runs) {
  if (runs.empty()) throw std::invalid_argument("compare: no runs given");
  const std::string signature = scenario_signature(runs.front().second->scenario);
  ComparisonTable table;
  table.scenario_name = runs.front().second->scenario.name;
  for (const auto& [label, log] : runs) {
    if (scenario_signature(log->scenario) != signature)
      throw std::invalid_argument("compare: logs are from different scenarios");
    table.entries.push_back({label, compute_metrics(*log)});
  }

  const auto best_by = [&](auto key) {
    int best = -1;
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
      if (!table.entries[i].metrics.reached) continue;
      if (best < 0 || key(table.entries[i].metrics) <
                          key(table.entries[static_cast<std::size_t>(best)].metrics))
        best = static_cast<int>(i);
    }
    return best;
  };
  table.best_arrival = best_by([](const Metrics& m) { return m.arrival_time; });
  table.best_speed = best_by([](const Metrics& m) { return m.speed_error; });
  table.best_cte = best_by([](const Metrics& m) { return m.cross_track_error; });
  return table;
}

namespace {

std::string cell(double value, bool reached, bool best) {
  if (!reached) return "unreached";
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << value;
  if (best) out << '*';
  return out.str();
}

}  // namespace

std::string comparison_text(const ComparisonTable& table) {
  std::ostringstream out;
  out << "scenario: " << table.scenario_name << "\n";
  out << std::left << std::setw(14) << "controller" << std::right
      << std::setw(12) << "t_a" << std::setw(12) << "e_speed" << std::setw(12)
      << "e_cte" << std::setw(12) << "d_min"
      << "\n";
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    const auto& [label, m] = table.entries[i];
    const int idx = static_cast<int>(i);
    out << std::left << std::setw(14) << label << std::right << std::setw(12)
        << cell(m.arrival_time, m.reached, idx == table.best_arrival)
        << std::setw(12) << cell(m.speed_error, m.reached, idx == table.best_speed)
        << std::setw(12)
        << cell(m.cross_track_error, m.reached, idx == table.best_cte)
        << std::setw(12) << format_double(m.min_clearance) << "\n";
  }
  return out.str();
}

std::string comparison_csv(const ComparisonTable& table) {
  std::ostringstream out;
  out << "scenario,controller,reached,arrival_time,speed_error,"
         "cross_track_error,min_clearance,best_arrival,best_speed,best_cte\n";
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    const auto& [label, m] = table.entries[i];
    const int idx = static_cast<int>(i);
    out << table.scenario_name << ',' << label << ',' << (m.reached ? 1 : 0)
        << ',' << format_double(m.arrival_time) << ','
        << format_double(m.speed_error) << ','
        << format_double(m.cross_track_error) << ','
        << format_double(m.min_clearance) << ','
        << (idx == table.best_arrival ? 1 : 0) << ','
        << (idx == table.best_speed ? 1 : 0) << ','
        << (idx == table.best_cte ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string metrics_csv(const Metrics& metrics) {
  std::ostringstream out;
  out << "reached,arrival_time,speed_error,cross_track_error,min_clearance\n";
  out << (metrics.reached ? 1 : 0) << ',' << format_double(metrics.arrival_time)
      << ',' << format_double(metrics.speed_error) << ','
      << format_double(metrics.cross_track_error) << ','
      << format_double(metrics.min_clearance) << "\n";
  return out.str();
}

}  // namespace tccbf

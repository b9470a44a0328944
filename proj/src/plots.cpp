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

#include "tccbf/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "tccbf/config_io.hpp"

namespace tccbf {

namespace {

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  return buffer;
}

// Maps data coordinates into an SVG viewport rectangle (y axis flipped).
struct Frame {
  double x0, x1, y0, y1;          // data range
  double px, py, width, height;   // viewport

  double sx(double x) const { return px + (x - x0) / (x1 - x0) * width; }
  double sy(double y) const { return py + (y1 - y) / (y1 - y0) * height; }
};

void polyline(std::ostringstream& svg, const Frame& frame,
              const std::vector<double>& xs, const std::vector<double>& ys,
              const std::string& color, double stroke_width = 1.5) {
  svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
      << stroke_width << "\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i)
    svg << num(frame.sx(xs[i])) << ',' << num(frame.sy(ys[i])) << ' ';
  svg << "\"/>\n";
}

void axes(std::ostringstream& svg, const Frame& frame, const std::string& title) {
  svg << "<rect x=\"" << num(frame.px) << "\" y=\"" << num(frame.py)
      << "\" width=\"" << num(frame.width) << "\" height=\"" << num(frame.height)
      << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  svg << "<text x=\"" << num(frame.px + 4) << "\" y=\"" << num(frame.py - 5)
      << "\" font-size=\"11\" font-family=\"sans-serif\">" << title
      << "</text>\n";
  svg << "<text x=\"" << num(frame.px - 2) << "\" y=\""
      << num(frame.py + frame.height + 12)
      << "\" font-size=\"9\" font-family=\"sans-serif\">" << num(frame.x0)
      << "</text>\n";
  svg << "<text x=\"" << num(frame.px + frame.width - 14) << "\" y=\""
      << num(frame.py + frame.height + 12)
      << "\" font-size=\"9\" font-family=\"sans-serif\">" << num(frame.x1)
      << "</text>\n";
  svg << "<text x=\"" << num(frame.px - 34) << "\" y=\""
      << num(frame.py + frame.height)
      << "\" font-size=\"9\" font-family=\"sans-serif\">" << num(frame.y0)
      << "</text>\n";
  svg << "<text x=\"" << num(frame.px - 34) << "\" y=\"" << num(frame.py + 8)
      << "\" font-size=\"9\" font-family=\"sans-serif\">" << num(frame.y1)
      << "</text>\n";
}

struct Series {
  std::string label;
  std::string color;
  std::vector<double> values;
};

void panel(std::ostringstream& svg, Frame frame, const std::string& title,
           const std::vector<double>& ts, const std::vector<Series>& series) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Series& s : series)
    for (double v : s.values)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  frame.y0 = lo - pad;
  frame.y1 = hi + pad;
  axes(svg, frame, title);
  if (frame.y0 < 0.0 && frame.y1 > 0.0) {
    svg << "<line x1=\"" << num(frame.sx(frame.x0)) << "\" y1=\""
        << num(frame.sy(0.0)) << "\" x2=\"" << num(frame.sx(frame.x1))
        << "\" y2=\"" << num(frame.sy(0.0))
        << "\" stroke=\"#bbb\" stroke-dasharray=\"4,3\"/>\n";
  }
  double label_x = frame.px + frame.width - 90.0;
  double label_y = frame.py + 12.0;
  for (const Series& s : series) {
    polyline(svg, frame, ts, s.values, s.color);
    svg << "<text x=\"" << num(label_x) << "\" y=\"" << num(label_y)
        << "\" font-size=\"9\" font-family=\"sans-serif\" fill=\"" << s.color
        << "\">" << s.label << "</text>\n";
    label_y += 11.0;
  }
}

}  // namespace

void emit_plots(const TrajectoryLog& log, const std::string& directory,
                const std::string& stem) {
  if (log.steps.empty()) throw std::runtime_error("nothing to plot");
  const Scenario& scenario = log.scenario;
  const bool asv = scenario.vehicle == VehicleKind::kAsv;

  std::vector<double> ts, xs, ys, speeds, h_ed, h_tc, h_dc, clear, in0, in1;
  for (const StepRecord& rec : log.steps) {
    ts.push_back(rec.t);
    xs.push_back(rec.state[0]);
    ys.push_back(rec.state[1]);
    speeds.push_back(asv ? std::hypot(rec.state[3], rec.state[4])
                         : rec.state[3]);
    h_ed.push_back(rec.h_ed);
    h_tc.push_back(rec.h_tc);
    h_dc.push_back(rec.h_dc);
    clear.push_back(rec.obstacle_clearance);
    in0.push_back(rec.input[0]);
    in1.push_back(rec.input[1]);
  }

  // Trajectory figure with obstacle snapshots.
  {
    double x_lo = *std::min_element(xs.begin(), xs.end());
    double x_hi = std::max(scenario.goal_x,
                           *std::max_element(xs.begin(), xs.end()));
    double y_lo = *std::min_element(ys.begin(), ys.end());
    double y_hi = *std::max_element(ys.begin(), ys.end());
    const double snapshot_interval = asv ? 6.0 : 2.5;
    for (double t = 0.0; t <= log.steps.back().t; t += snapshot_interval) {
      for (const Obstacle& obs : propagate_obstacles(scenario.obstacles, t)) {
        x_lo = std::min(x_lo, obs.x - obs.radius);
        x_hi = std::max(x_hi, obs.x + obs.radius);
        y_lo = std::min(y_lo, obs.y - obs.radius);
        y_hi = std::max(y_hi, obs.y + obs.radius);
      }
    }
    y_lo = std::min(y_lo, -1.0) - 1.0;
    y_hi = std::max(y_hi, 1.0) + 1.0;
    x_lo -= 1.0;
    x_hi += 1.0;

    const double width = 760.0;
    const double height =
        std::max(160.0, std::min(420.0, width * (y_hi - y_lo) / (x_hi - x_lo)));
    Frame frame{x_lo, x_hi, y_lo, y_hi, 50.0, 24.0, width, height};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
        << num(frame.width + 90.0) << "\" height=\"" << num(frame.height + 60.0)
        << "\">\n";
    axes(svg, frame, scenario.name + " trajectory [m]");
    svg << "<line x1=\"" << num(frame.sx(x_lo)) << "\" y1=\""
        << num(frame.sy(0.0)) << "\" x2=\"" << num(frame.sx(x_hi)) << "\" y2=\""
        << num(frame.sy(0.0))
        << "\" stroke=\"#ccc\" stroke-dasharray=\"6,4\"/>\n";
    int snapshot = 0;
    for (double t = 0.0; t <= log.steps.back().t; t += snapshot_interval) {
      for (const Obstacle& obs : propagate_obstacles(scenario.obstacles, t)) {
        const double r_px = frame.sx(obs.x + obs.radius) - frame.sx(obs.x);
        svg << "<circle cx=\"" << num(frame.sx(obs.x)) << "\" cy=\""
            << num(frame.sy(obs.y)) << "\" r=\"" << num(r_px)
            << "\" fill=\"#999\" fill-opacity=\"0.35\" stroke=\"#666\"/>\n";
      }
      ++snapshot;
    }
    (void)snapshot;
    polyline(svg, frame, xs, ys, "#c0392b", 2.0);
    svg << "<circle cx=\"" << num(frame.sx(xs.front())) << "\" cy=\""
        << num(frame.sy(ys.front()))
        << "\" r=\"4\" fill=\"#2980b9\"/>\n";
    svg << "<line x1=\"" << num(frame.sx(scenario.goal_x)) << "\" y1=\""
        << num(frame.py) << "\" x2=\"" << num(frame.sx(scenario.goal_x))
        << "\" y2=\"" << num(frame.py + frame.height)
        << "\" stroke=\"#27ae60\" stroke-dasharray=\"5,4\"/>\n";
    svg << "</svg>\n";
    write_file(directory + "/" + stem + "_trajectory.svg", svg.str());
  }

  // Time-series figure: barrier values, clearance, speed, inputs.
  {
    const double width = 700.0;
    const double panel_height = 110.0;
    const double gap = 38.0;
    const double t_end = ts.back();
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
        << num(width + 100.0) << "\" height=\""
        << num(4 * (panel_height + gap) + 30.0) << "\">\n";

    const auto frame_at = [&](int row) {
      return Frame{0.0, t_end, 0.0, 1.0, 55.0, 28.0 + row * (panel_height + gap),
                   width, panel_height};
    };
    panel(svg, frame_at(0), "barrier values", ts,
          {{"h_ed", "#c0392b", h_ed},
           {"h_tc", "#2980b9", h_tc},
           {"h_dc", "#7f8c8d", h_dc}});
    panel(svg, frame_at(1), "closest distance to obstacle [m]", ts,
          {{"clearance", "#8e44ad", clear}});
    std::vector<double> reference(ts.size(), scenario.reference_speed);
    panel(svg, frame_at(2), "speed [m/s]", ts,
          {{"speed", "#16a085", speeds}, {"u_r", "#aaa", reference}});
    const char* label0 = asv ? "thrust_left" : "turn_rate";
    const char* label1 = asv ? "thrust_right" : "accel";
    panel(svg, frame_at(3), "control inputs", ts,
          {{label0, "#d35400", in0}, {label1, "#2c3e50", in1}});
    svg << "</svg>\n";
    write_file(directory + "/" + stem + "_timeseries.svg", svg.str());
  }
}

void emit_levelset_plot(const LevelSetGrid& grid, const std::string& path) {
  if (grid.xs.empty() || grid.ys.empty())
    throw std::runtime_error("nothing to plot");
  const double x_lo = grid.xs.front();
  const double x_hi = grid.xs.back();
  const double y_lo = grid.ys.front();
  const double y_hi = grid.ys.back();
  const double width = 640.0;
  const double height = width * (y_hi - y_lo) / (x_hi - x_lo);
  Frame frame{x_lo, x_hi, y_lo, y_hi, 50.0, 26.0, width, height};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << num(frame.width + 80.0) << "\" height=\"" << num(frame.height + 60.0)
      << "\">\n";
  axes(svg, frame, "restricted region, " + to_string(grid.kind));

  // Raster fill of the negative cells.
  const double cell_w = frame.sx(x_lo + (grid.xs.size() > 1
                                             ? grid.xs[1] - grid.xs[0]
                                             : 1.0)) -
                        frame.sx(x_lo);
  const double cell_h = frame.sy(y_lo) - frame.sy(y_lo + (grid.ys.size() > 1
                                                              ? grid.ys[1] - grid.ys[0]
                                                              : 1.0));
  for (std::size_t i = 0; i < grid.ys.size(); ++i) {
    for (std::size_t j = 0; j < grid.xs.size(); ++j) {
      if (grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) <
          0.0) {
        svg << "<rect x=\"" << num(frame.sx(grid.xs[j]) - cell_w / 2.0)
            << "\" y=\"" << num(frame.sy(grid.ys[i]) - cell_h / 2.0)
            << "\" width=\"" << num(cell_w) << "\" height=\"" << num(cell_h)
            << "\" fill=\"#e74c3c\" fill-opacity=\"0.45\"/>\n";
      }
    }
  }
  const double r_px = frame.sx(grid.obstacle.x + grid.obstacle.radius) -
                      frame.sx(grid.obstacle.x);
  svg << "<circle cx=\"" << num(frame.sx(grid.obstacle.x)) << "\" cy=\""
      << num(frame.sy(grid.obstacle.y)) << "\" r=\"" << num(r_px)
      << "\" fill=\"#777\" fill-opacity=\"0.7\" stroke=\"#333\"/>\n";
  svg << "</svg>\n";
  write_file(path, svg.str());
}

}  // namespace tccbf

// Copyright 2026 The vlmtest Authors
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

#include "vlmtest/autonomy/types.hpp"

#include <cmath>
#include <stdexcept>

namespace vlmtest::autonomy
{

std::string_view to_string(MapLabel m)
{
  switch (m) {
    case MapLabel::highway:
      return "highway";
    case MapLabel::intersection:
      return "intersection";
    case MapLabel::parkinglot:
      return "parkinglot";
  }
  return "highway";
}

MapLabel map_label_from_string(std::string_view s)
{
  if (s == "highway") return MapLabel::highway;
  if (s == "intersection") return MapLabel::intersection;
  if (s == "parkinglot") return MapLabel::parkinglot;
  throw std::invalid_argument("unknown map label: " + std::string(s));
}

double three_point_curvature(const Waypoint & a, const Waypoint & b, const Waypoint & c)
{
  const double abx = b.x - a.x, aby = b.y - a.y;
  const double bcx = c.x - b.x, bcy = c.y - b.y;
  const double acx = c.x - a.x, acy = c.y - a.y;
  const double denom = std::hypot(abx, aby) * std::hypot(bcx, bcy) * std::hypot(acx, acy);
  if (denom <= 0.0) {
    return 0.0;
  }
  return 2.0 * (abx * bcy - aby * bcx) / denom;
}

Trajectory make_trajectory(std::string behavior_id, std::vector<Waypoint> waypoints)
{
  if (waypoints.size() < 2) {
    throw std::invalid_argument("trajectory " + behavior_id + ": needs at least two waypoints");
  }
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    const auto & w = waypoints[i];
    if (!std::isfinite(w.x) || !std::isfinite(w.y) || !std::isfinite(w.v_ref)) {
      throw std::invalid_argument("trajectory " + behavior_id + ": non-finite waypoint");
    }
    if (w.v_ref < 0.0) {
      throw std::invalid_argument("trajectory " + behavior_id + ": negative v_ref");
    }
    if (i > 0 && w.x == waypoints[i - 1].x && w.y == waypoints[i - 1].y) {
      throw std::invalid_argument(
        "trajectory " + behavior_id + ": consecutive waypoints coincide at index " +
        std::to_string(i));
    }
  }
  Trajectory t;
  t.behavior_id = std::move(behavior_id);
  t.kappa.assign(waypoints.size(), 0.0);
  for (std::size_t i = 1; i + 1 < waypoints.size(); ++i) {
    t.kappa[i] = three_point_curvature(waypoints[i - 1], waypoints[i], waypoints[i + 1]);
  }
  if (waypoints.size() > 2) {
    t.kappa.front() = t.kappa[1];
    t.kappa.back() = t.kappa[waypoints.size() - 2];
  }
  t.waypoints = std::move(waypoints);
  return t;
}

const Behavior * BehaviorSet::find(std::string_view id) const
{
  for (const auto & b : behaviors) {
    if (b.trajectory.behavior_id == id) {
      return &b;
    }
  }
  return nullptr;
}

std::vector<std::string> BehaviorSet::safe_ids() const
{
  std::vector<std::string> ids;
  for (const auto & b : behaviors) {
    if (b.safe) {
      ids.push_back(b.trajectory.behavior_id);
    }
  }
  return ids;
}

void to_json(nlohmann::json & j, const Detection & d)
{
  j = {
    {"box", {d.box.cx, d.box.cy, d.box.w, d.box.h}},
    {"class", simworld::to_string(d.cls)},
    {"p", d.confidence}};
}

void to_json(nlohmann::json & j, const DetectionSet & d)
{
  j = {{"t_virtual", d.t_virtual}, {"items", d.items}};
}

void to_json(nlohmann::json & j, const VehicleState & s)
{
  j = {{"x", s.x}, {"y", s.y}, {"psi", s.psi}, {"v", s.v}, {"m", to_string(s.map)}, {"t_virtual", s.t_virtual}};
}

// Waypoint lists are summarized: the log records identity and extent, not every row.
void to_json(nlohmann::json & j, const Trajectory & t)
{
  j = {{"behavior_id", t.behavior_id}, {"n", t.waypoints.size()}};
  if (!t.waypoints.empty()) {
    const auto & a = t.waypoints.front();
    const auto & b = t.waypoints.back();
    j["start"] = {a.x, a.y, a.v_ref};
    j["end"] = {b.x, b.y, b.v_ref};
  }
}

void to_json(nlohmann::json & j, const Behavior & b)
{
  j = {{"trajectory", b.trajectory}, {"safe", b.safe}, {"degraded", b.degraded}};
}

void to_json(nlohmann::json & j, const BehaviorSet & b)
{
  j = {{"t_virtual", b.t_virtual}, {"behaviors", b.behaviors}};
}

void to_json(nlohmann::json & j, const PidGains & g) { j = {{"Kp", g.kp}, {"Ki", g.ki}, {"Kd", g.kd}}; }

void to_json(nlohmann::json & j, const MpcWeights & w)
{
  j = {
    {"w_lat", w.w_lat}, {"w_head", w.w_head}, {"c_speed", w.c_speed},
    {"horizon", w.horizon}, {"dt", w.dt}, {"p_terminal", w.p_terminal}};
}

}  // namespace vlmtest::autonomy

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

#include "vlmtest/autonomy/autonomy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

namespace vlmtest::autonomy
{

void TrajectoryLibrary::add(MapLabel map, std::string situation, Trajectory trajectory)
{
  entries_[{map, std::move(situation)}].push_back(std::move(trajectory));
}

bool TrajectoryLibrary::has_map(MapLabel map) const
{
  for (const auto & [key, list] : entries_) {
    if (key.first == map) {
      return true;
    }
  }
  return false;
}

const std::vector<Trajectory> & TrajectoryLibrary::at(
  MapLabel map, const std::string & situation) const
{
  auto it = entries_.find({map, situation});
  if (it == entries_.end()) {
    throw std::out_of_range(
      "no trajectory library entry for map '" + std::string(to_string(map)) + "', situation '" +
      situation + "'");
  }
  return it->second;
}

std::vector<std::pair<MapLabel, std::string>> TrajectoryLibrary::keys() const
{
  std::vector<std::pair<MapLabel, std::string>> out;
  for (const auto & [key, list] : entries_) {
    out.push_back(key);
  }
  return out;
}

TrajectoryLibrary parse_trajectory_library(const nlohmann::json & doc)
{
  if (!doc.is_object() || doc.value("schema", 0) != 1 || !doc.contains("trajectories")) {
    throw std::runtime_error("trajectory library: expected {\"schema\": 1, \"trajectories\": [...]}");
  }
  TrajectoryLibrary lib;
  const auto & records = doc.at("trajectories");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto & rec = records[i];
    try {
      for (auto it = rec.begin(); it != rec.end(); ++it) {
        static const std::set<std::string> known{"behavior_id", "map_label", "situation", "points"};
        if (known.count(it.key()) == 0) {
          throw std::runtime_error("unknown field '" + it.key() + "'");
        }
      }
      std::vector<Waypoint> wps;
      for (const auto & row : rec.at("points")) {
        if (!row.is_array() || row.size() != 3) {
          throw std::runtime_error("each point must be [x, y, v_ref]");
        }
        wps.push_back(Waypoint{row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
      }
      lib.add(
        map_label_from_string(rec.at("map_label").get<std::string>()),
        rec.value("situation", std::string("default")),
        make_trajectory(rec.at("behavior_id").get<std::string>(), std::move(wps)));
    } catch (const std::exception & e) {
      throw std::runtime_error(
        "trajectory library record " + std::to_string(i) + ": " + e.what());
    }
  }
  return lib;
}

TrajectoryLibrary load_trajectory_library(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open trajectory library: " + path);
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error & e) {
    throw std::runtime_error("trajectory library " + path + ": " + e.what());
  }
  return parse_trajectory_library(doc);
}

PathProjection project_onto(const Trajectory & trajectory, double x, double y)
{
  const auto & w = trajectory.waypoints;
  if (w.size() < 2) {
    throw std::invalid_argument("project_onto: trajectory has fewer than two waypoints");
  }
  PathProjection best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const double sx = w[i + 1].x - w[i].x;
    const double sy = w[i + 1].y - w[i].y;
    const double len2 = sx * sx + sy * sy;
    if (len2 <= 0.0) {
      continue;
    }
    const double f = std::clamp(((x - w[i].x) * sx + (y - w[i].y) * sy) / len2, 0.0, 1.0);
    const double px = w[i].x + f * sx;
    const double py = w[i].y + f * sy;
    const double d2 = (x - px) * (x - px) + (y - py) * (y - py);
    if (d2 < best_d2) {
      best_d2 = d2;
      const double len = std::sqrt(len2);
      best.segment = i;
      best.fraction = f;
      best.px = px;
      best.py = py;
      best.heading = std::atan2(sy, sx);
      best.lateral = (sx * (y - py) - sy * (x - px)) / len;
      best.v_ref = w[i].v_ref + f * (w[i + 1].v_ref - w[i].v_ref);
      best.kappa = trajectory.kappa.size() == w.size()
                     ? trajectory.kappa[i] + f * (trajectory.kappa[i + 1] - trajectory.kappa[i])
                     : 0.0;
    }
  }
  if (!std::isfinite(best_d2)) {
    throw std::invalid_argument("trajectory " + trajectory.behavior_id + " is degenerate");
  }
  return best;
}

namespace
{
Trajectory trim_to(const Trajectory & src, const PathProjection & proj)
{
  constexpr double kMinGap = 1e-6;
  Trajectory out;
  out.behavior_id = src.behavior_id;
  out.waypoints.push_back(Waypoint{proj.px, proj.py, proj.v_ref});
  out.kappa.push_back(proj.kappa);
  for (std::size_t i = proj.segment + 1; i < src.waypoints.size(); ++i) {
    const auto & prev = out.waypoints.back();
    const auto & wp = src.waypoints[i];
    if (std::hypot(wp.x - prev.x, wp.y - prev.y) < kMinGap) {
      continue;
    }
    out.waypoints.push_back(wp);
    out.kappa.push_back(src.kappa[i]);
  }
  if (out.waypoints.size() < 2) {
    const std::size_t n = src.waypoints.size();
    out.waypoints = {src.waypoints[n - 2], src.waypoints[n - 1]};
    out.kappa = {src.kappa[n - 2], src.kappa[n - 1]};
  }
  return out;
}
}  // namespace

BehaviorSet plan_behaviors(
  const TrajectoryLibrary & library, const VehicleState & state, const std::string & situation)
{
  const auto & candidates = library.at(state.map, situation);
  BehaviorSet set;
  set.t_virtual = state.t_virtual;
  std::set<std::string> seen;
  for (const auto & traj : candidates) {
    if (!seen.insert(traj.behavior_id).second) {
      throw std::invalid_argument("duplicate behavior id in library: " + traj.behavior_id);
    }
    set.behaviors.push_back(Behavior{trim_to(traj, project_onto(traj, state.x, state.y)), true, false});
  }
  return set;
}

}  // namespace vlmtest::autonomy

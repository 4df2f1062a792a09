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

#pragma once

#include "vlmtest/simworld/types.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace vlmtest::autonomy
{

struct BoundingBox
{
  double cx{0.0};
  double cy{0.0};
  double w{0.0};
  double h{0.0};
};

struct Detection
{
  BoundingBox box;
  simworld::ActorClass cls{simworld::ActorClass::car};
  double confidence{0.0};
};

struct DetectionSet
{
  double t_virtual{0.0};
  std::vector<Detection> items;
};

enum class MapLabel
{
  highway,
  intersection,
  parkinglot
};

std::string_view to_string(MapLabel m);
MapLabel map_label_from_string(std::string_view s);

struct VehicleState
{
  double x{0.0};
  double y{0.0};
  double psi{0.0};
  double v{0.0};
  MapLabel map{MapLabel::highway};
  double t_virtual{0.0};
};

struct Waypoint
{
  double x{0.0};
  double y{0.0};
  double v_ref{0.0};
};

struct Trajectory
{
  std::string behavior_id;
  std::vector<Waypoint> waypoints;
  std::vector<double> kappa;  // one per waypoint
};

/// Builds a trajectory and fills its curvature profile. Throws
/// std::invalid_argument on fewer than two waypoints, repeated consecutive
/// waypoints or negative reference speeds.
Trajectory make_trajectory(std::string behavior_id, std::vector<Waypoint> waypoints);

/// Signed curvature through three points (circumcircle), positive for left turns.
double three_point_curvature(const Waypoint & a, const Waypoint & b, const Waypoint & c);

struct Behavior
{
  Trajectory trajectory;
  bool safe{true};
  bool degraded{false};
};

struct BehaviorSet
{
  double t_virtual{0.0};
  std::vector<Behavior> behaviors;

  const Behavior * find(std::string_view id) const;
  /// Ids of the behaviors not flagged unsafe, in set order.
  std::vector<std::string> safe_ids() const;
};

struct PidGains
{
  double kp{1.1};
  double ki{0.02};
  double kd{0.01};
};

struct PidState
{
  double integral{0.0};
  double prev_error{0.0};
  double dt{0.01};
};

struct PidLimits
{
  double a_max{3.0};
  double integral_max{10.0};
};

struct MpcWeights
{
  double w_lat{0.2};
  double w_head{0.35};
  double c_speed{2.0};
  int horizon{20};
  double dt{0.1};
  double p_terminal{10.0};
};

void to_json(nlohmann::json & j, const Detection & d);
void to_json(nlohmann::json & j, const DetectionSet & d);
void to_json(nlohmann::json & j, const VehicleState & s);
void to_json(nlohmann::json & j, const Trajectory & t);
void to_json(nlohmann::json & j, const Behavior & b);
void to_json(nlohmann::json & j, const BehaviorSet & b);
void to_json(nlohmann::json & j, const PidGains & g);
void to_json(nlohmann::json & j, const MpcWeights & w);

}  // namespace vlmtest::autonomy

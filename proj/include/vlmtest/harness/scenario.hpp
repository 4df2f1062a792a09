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

#include "vlmtest/autonomy/autonomy.hpp"
#include "vlmtest/simworld/types.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vlmtest::harness
{

/// Bad scenario input. `field` names the offending entry, e.g. "actors[1].script".
class ScenarioError : public std::runtime_error
{
public:
  ScenarioError(std::string field, const std::string & what)
  : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field))
  {
  }
  const std::string & field() const { return field_; }

private:
  std::string field_;
};

enum class RoadCondition
{
  dry,
  wet,
  icy,
  pothole
};

std::string_view to_string(RoadCondition c);
RoadCondition road_condition_from_string(std::string_view s);
/// Traction multiplier applied on top of the weather friction.
double road_friction(RoadCondition c);

struct Road
{
  std::vector<std::array<double, 2>> polyline;
  int lanes{1};
  double lane_width{3.5};
};

struct CommandEvent
{
  double t{0.0};
  std::string text;
};

struct ParamExpectation
{
  enum class Cmp
  {
    lt,
    gt
  };
  std::string name;  // one of midlayer::kParamNames
  Cmp cmp{Cmp::lt};
  double value{0.0};
};

/// Within [t0, t1] every applied decision should pick `behavior` (when set)
/// and satisfy each parameter comparison.
struct Expectation
{
  double t0{0.0};
  double t1{0.0};
  std::string behavior;
  std::vector<ParamExpectation> params;
};

struct ScenarioSpec
{
  std::string name;
  std::string source_path;
  autonomy::MapLabel map_label{autonomy::MapLabel::highway};
  Road road;
  RoadCondition road_condition{RoadCondition::dry};
  std::string weather_label{"clear"};  // as written, e.g. "snow+fog"
  simworld::Weather weather;
  std::vector<simworld::Actor> actors;
  std::vector<CommandEvent> commands;  // sorted by time
  std::string trajectory_library_path;
  autonomy::TrajectoryLibrary library;
  std::string situation{"default"};
  double cadence{3.0};
  double duration{0.0};
  std::uint64_t seed{0};
  simworld::EgoState ego;
  std::string initial_behavior{"following"};
  autonomy::LocalizationNoise localization{0.02, 0.001, 0.02};
  std::vector<Expectation> expected;
};

/// Conditions of several weather kinds joined with '+' combine to the worst
/// of each: shortest visibility, highest dropout and noise, lowest friction.
simworld::Weather combined_weather(std::string_view label);

/// Throws ScenarioError naming the field that breaks an invariant.
void validate_scenario(const ScenarioSpec & spec);

/// Parses schema-1 scenario JSON. Relative library paths resolve against
/// `base_dir`. Syntax errors report the line; unknown fields are rejected.
ScenarioSpec parse_scenario(const std::string & text, const std::string & base_dir, const std::string & source = "<text>");
ScenarioSpec load_scenario(const std::string & path);

/// Tick length of the simulation loop in seconds.
inline constexpr double kTick = 0.01;
/// Converts a duration in seconds to whole ticks; throws ScenarioError when
/// it is not a multiple of the tick.
std::int64_t to_ticks(double seconds, const std::string & field);

}  // namespace vlmtest::harness

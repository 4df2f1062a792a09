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

#include <nlohmann/json.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace vlmtest::simworld
{

using Rng = std::mt19937_64;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double rad);

struct Pose
{
  double x{0.0};
  double y{0.0};
  double psi{0.0};
};

struct VehicleParams
{
  double wheelbase{2.8};
  double a_max{3.0};
  double delta_max{0.6};
};

struct ControlCommand
{
  double accel{0.0};  // m/s^2
  double steer{0.0};  // rad, positive turns left
};

struct EgoState
{
  Pose pose;
  double v{0.0};
  double a{0.0};
};

enum class ActorClass
{
  car,
  truck,
  pedestrian,
  cyclist,
  cone
};

std::string_view to_string(ActorClass c);
ActorClass actor_class_from_string(std::string_view s);

struct Extent
{
  double length{0.0};
  double width{0.0};
};

Extent default_extent(ActorClass c);

/// From `t` onwards the actor moves with speed `v` along heading `psi`.
struct ScriptSegment
{
  double t{0.0};
  double v{0.0};
  double psi{0.0};
};

struct Actor
{
  std::string id;
  ActorClass cls{ActorClass::car};
  Pose pose;
  double v{0.0};
  std::vector<ScriptSegment> script;  // strictly increasing t
  double t{0.0};                      // actor-local script clock
};

/// Throws std::invalid_argument if the script timestamps are not strictly increasing.
void validate_actor(const Actor & actor);

enum class WeatherKind
{
  clear,
  rain,
  snow,
  fog
};

std::string_view to_string(WeatherKind w);
WeatherKind weather_kind_from_string(std::string_view s);

struct Weather
{
  WeatherKind kind{WeatherKind::clear};
  double visibility{150.0};
  double dropout_p{0.0};
  double pos_noise_sigma{0.0};
  double friction{1.0};
};

/// Default sensing/traction parameters for each weather kind.
Weather weather_preset(WeatherKind kind);
void validate_weather(const Weather & w);

struct WorldState
{
  double t{0.0};
  std::vector<Actor> actors;
};

struct TruthObject
{
  std::string actor_id;
  ActorClass cls{ActorClass::car};
  double rel_x{0.0};  // forward, ego frame
  double rel_y{0.0};  // left, ego frame
  Extent extent;
};

struct SensorFrame
{
  double t_virtual{0.0};
  std::vector<TruthObject> truth_objects;
  std::string frame_tag;
  double visibility{0.0};
  WeatherKind weather{WeatherKind::clear};
};

void to_json(nlohmann::json & j, const Pose & p);
void from_json(const nlohmann::json & j, Pose & p);
void to_json(nlohmann::json & j, const EgoState & s);
void to_json(nlohmann::json & j, const ControlCommand & c);
void to_json(nlohmann::json & j, const Weather & w);
void to_json(nlohmann::json & j, const TruthObject & o);
void to_json(nlohmann::json & j, const SensorFrame & f);

}  // namespace vlmtest::simworld

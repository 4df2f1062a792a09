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

#include "vlmtest/simworld/types.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vlmtest::simworld
{

double wrap_angle(double rad)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(rad, two_pi);
  if (r > std::numbers::pi) {
    r -= two_pi;
  } else if (r <= -std::numbers::pi) {
    r += two_pi;
  }
  return r;
}

std::string_view to_string(ActorClass c)
{
  switch (c) {
    case ActorClass::car:
      return "car";
    case ActorClass::truck:
      return "truck";
    case ActorClass::pedestrian:
      return "pedestrian";
    case ActorClass::cyclist:
      return "cyclist";
    case ActorClass::cone:
      return "cone";
  }
  return "car";
}

ActorClass actor_class_from_string(std::string_view s)
{
  if (s == "car") return ActorClass::car;
  if (s == "truck") return ActorClass::truck;
  if (s == "pedestrian") return ActorClass::pedestrian;
  if (s == "cyclist") return ActorClass::cyclist;
  if (s == "cone") return ActorClass::cone;
  throw std::invalid_argument("unknown actor class: " + std::string(s));
}

Extent default_extent(ActorClass c)
{
  switch (c) {
    case ActorClass::car:
      return {4.5, 1.8};
    case ActorClass::truck:
      return {10.0, 2.5};
    case ActorClass::pedestrian:
      return {0.5, 0.5};
    case ActorClass::cyclist:
      return {1.8, 0.6};
    case ActorClass::cone:
      return {0.4, 0.4};
  }
  return {1.0, 1.0};
}

void validate_actor(const Actor & actor)
{
  for (std::size_t i = 1; i < actor.script.size(); ++i) {
    if (!(actor.script[i].t > actor.script[i - 1].t)) {
      throw std::invalid_argument("actor " + actor.id + ": script times must strictly increase");
    }
  }
}

std::string_view to_string(WeatherKind w)
{
  switch (w) {
    case WeatherKind::clear:
      return "clear";
    case WeatherKind::rain:
      return "rain";
    case WeatherKind::snow:
      return "snow";
    case WeatherKind::fog:
      return "fog";
  }
  return "clear";
}

WeatherKind weather_kind_from_string(std::string_view s)
{
  if (s == "clear") return WeatherKind::clear;
  if (s == "rain") return WeatherKind::rain;
  if (s == "snow") return WeatherKind::snow;
  if (s == "fog") return WeatherKind::fog;
  throw std::invalid_argument("unknown weather kind: " + std::string(s));
}

Weather weather_preset(WeatherKind kind)
{
  switch (kind) {
    case WeatherKind::clear:
      return {kind, 150.0, 0.0, 0.0, 1.0};
    case WeatherKind::rain:
      return {kind, 100.0, 0.1, 0.2, 0.7};
    case WeatherKind::snow:
      return {kind, 60.0, 0.25, 0.4, 0.45};
    case WeatherKind::fog:
      return {kind, 40.0, 0.4, 0.3, 0.9};
  }
  return {};
}

void validate_weather(const Weather & w)
{
  if (!(w.dropout_p >= 0.0 && w.dropout_p <= 1.0)) {
    throw std::invalid_argument("weather.dropout_p must lie in [0, 1]");
  }
  if (!(w.friction > 0.0 && w.friction <= 1.0)) {
    throw std::invalid_argument("weather.friction must lie in (0, 1]");
  }
  if (!(w.visibility > 0.0)) {
    throw std::invalid_argument("weather.visibility must be positive");
  }
  if (!(w.pos_noise_sigma >= 0.0)) {
    throw std::invalid_argument("weather.pos_noise_sigma must be non-negative");
  }
}

void to_json(nlohmann::json & j, const Pose & p) { j = {{"x", p.x}, {"y", p.y}, {"psi", p.psi}}; }

void from_json(const nlohmann::json & j, Pose & p)
{
  p.x = j.at("x").get<double>();
  p.y = j.at("y").get<double>();
  p.psi = j.value("psi", 0.0);
}

void to_json(nlohmann::json & j, const EgoState & s) { j = {{"pose", s.pose}, {"v", s.v}, {"a", s.a}}; }

void to_json(nlohmann::json & j, const ControlCommand & c)
{
  j = {{"accel", c.accel}, {"steer", c.steer}};
}

void to_json(nlohmann::json & j, const Weather & w)
{
  j = {
    {"kind", to_string(w.kind)},
    {"visibility", w.visibility},
    {"dropout_p", w.dropout_p},
    {"pos_noise_sigma", w.pos_noise_sigma},
    {"friction", w.friction}};
}

void to_json(nlohmann::json & j, const TruthObject & o)
{
  j = {
    {"id", o.actor_id},
    {"class", to_string(o.cls)},
    {"rel_x", o.rel_x},
    {"rel_y", o.rel_y},
    {"length", o.extent.length},
    {"width", o.extent.width}};
}

void to_json(nlohmann::json & j, const SensorFrame & f)
{
  j = {
    {"t_virtual", f.t_virtual},
    {"frame_tag", f.frame_tag},
    {"visibility", f.visibility},
    {"weather", to_string(f.weather)},
    {"objects", f.truth_objects}};
}

}  // namespace vlmtest::simworld

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

#include "vlmtest/harness/scenario.hpp"

#include "vlmtest/midlayer/midlayer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace vlmtest::harness
{

using nlohmann::json;

std::string_view to_string(RoadCondition c)
{
  switch (c) {
    case RoadCondition::dry:
      return "dry";
    case RoadCondition::wet:
      return "wet";
    case RoadCondition::icy:
      return "icy";
    case RoadCondition::pothole:
      return "pothole";
  }
  return "dry";
}

RoadCondition road_condition_from_string(std::string_view s)
{
  for (auto c : {RoadCondition::dry, RoadCondition::wet, RoadCondition::icy, RoadCondition::pothole}) {
    if (to_string(c) == s) {
      return c;
    }
  }
  throw std::invalid_argument("unknown road condition: " + std::string(s));
}

double road_friction(RoadCondition c)
{
  switch (c) {
    case RoadCondition::dry:
    case RoadCondition::pothole:
      return 1.0;
    case RoadCondition::wet:
      return 0.85;
    case RoadCondition::icy:
      return 0.35;
  }
  return 1.0;
}

simworld::Weather combined_weather(std::string_view label)
{
  simworld::Weather out;
  bool first = true;
  std::size_t start = 0;
  while (start <= label.size()) {
    const auto plus = label.find('+', start);
    const auto part = label.substr(start, plus == std::string_view::npos ? plus : plus - start);
    const auto w = simworld::weather_preset(simworld::weather_kind_from_string(part));
    if (first) {
      out = w;
      first = false;
    } else {
      out.visibility = std::min(out.visibility, w.visibility);
      out.dropout_p = std::max(out.dropout_p, w.dropout_p);
      out.pos_noise_sigma = std::max(out.pos_noise_sigma, w.pos_noise_sigma);
      out.friction = std::min(out.friction, w.friction);
    }
    if (plus == std::string_view::npos) {
      break;
    }
    start = plus + 1;
  }
  return out;
}

std::int64_t to_ticks(double seconds, const std::string & field)
{
  const double ticks = seconds / kTick;
  const auto n = static_cast<std::int64_t>(std::llround(ticks));
  if (!std::isfinite(ticks) || std::abs(ticks - static_cast<double>(n)) > 1e-6) {
    throw ScenarioError(field, "must be a multiple of " + std::to_string(kTick) + " s");
  }
  return n;
}

void validate_scenario(const ScenarioSpec & s)
{
  if (s.name.empty()) {
    throw ScenarioError("name", "must not be empty");
  }
  if (!(s.duration > 0.0)) {
    throw ScenarioError("duration", "must be positive");
  }
  if (!(s.cadence > 0.0)) {
    throw ScenarioError("agent_cadence", "must be positive");
  }
  to_ticks(s.duration, "duration");
  if (to_ticks(s.cadence, "agent_cadence") < 1) {
    throw ScenarioError("agent_cadence", "shorter than one tick");
  }
  if (s.road.polyline.size() < 2) {
    throw ScenarioError("road.polyline", "needs at least two points");
  }
  if (s.road.lanes < 1 || !(s.road.lane_width > 0.0)) {
    throw ScenarioError("road", "lanes >= 1 and lane_width > 0 required");
  }
  try {
    simworld::validate_weather(s.weather);
  } catch (const std::invalid_argument & e) {
    throw ScenarioError("weather", e.what());
  }
  for (std::size_t i = 0; i < s.commands.size(); ++i) {
    const auto & c = s.commands[i];
    if (!(c.t >= 0.0 && c.t <= s.duration)) {
      throw ScenarioError("commands[" + std::to_string(i) + "].t", "outside [0, duration]");
    }
    if (c.text.empty()) {
      throw ScenarioError("commands[" + std::to_string(i) + "].text", "must not be empty");
    }
    if (i > 0 && c.t < s.commands[i - 1].t) {
      throw ScenarioError("commands", "must be sorted by time");
    }
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < s.actors.size(); ++i) {
    const std::string where = "actors[" + std::to_string(i) + "]";
    if (!ids.insert(s.actors[i].id).second) {
      throw ScenarioError(where + ".id", "duplicate actor id '" + s.actors[i].id + "'");
    }
    try {
      simworld::validate_actor(s.actors[i]);
    } catch (const std::invalid_argument & e) {
      throw ScenarioError(where + ".script", e.what());
    }
  }
  if (!(s.ego.v >= 0.0)) {
    throw ScenarioError("ego.v", "must be non-negative");
  }
  const auto & n = s.localization;
  if (!(n.sigma_xy >= 0.0 && n.sigma_psi >= 0.0 && n.sigma_v >= 0.0)) {
    throw ScenarioError("localization_noise", "sigmas must be non-negative");
  }
  const std::vector<autonomy::Trajectory> * entries = nullptr;
  try {
    entries = &s.library.at(s.map_label, s.situation);
  } catch (const std::out_of_range & e) {
    throw ScenarioError("trajectory_library", e.what());
  }
  const bool has_initial = std::any_of(entries->begin(), entries->end(), [&](const auto & t) {
    return t.behavior_id == s.initial_behavior;
  });
  if (!has_initial) {
    throw ScenarioError("initial_behavior", "'" + s.initial_behavior + "' is not in the library");
  }
  for (std::size_t i = 0; i < s.expected.size(); ++i) {
    const auto & e = s.expected[i];
    const std::string where = "expected[" + std::to_string(i) + "]";
    if (!(e.t0 >= 0.0 && e.t0 <= e.t1 && e.t1 <= s.duration)) {
      throw ScenarioError(where, "window must satisfy 0 <= t0 <= t1 <= duration");
    }
    for (const auto & p : e.params) {
      if (std::find(midlayer::kParamNames.begin(), midlayer::kParamNames.end(), p.name) ==
          midlayer::kParamNames.end()) {
        throw ScenarioError(where + ".params", "unknown parameter '" + p.name + "'");
      }
    }
  }
}

// ---------------------------------------------------------------------------

namespace
{

void reject_unknown(const json & j, std::initializer_list<std::string_view> allowed, const std::string & where)
{
  if (!j.is_object()) {
    throw ScenarioError(where, "expected an object");
  }
  for (const auto & [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ScenarioError(where.empty() ? key : where + "." + key, "unknown field");
    }
  }
}

template <class T>
T get(const json & j, const char * key, const std::string & where)
{
  const std::string field = where.empty() ? key : where + "." + key;
  if (!j.contains(key)) {
    throw ScenarioError(field, "missing");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception & e) {
    throw ScenarioError(field, "wrong type");
  }
}

template <class T>
T get_or(const json & j, const char * key, T fallback, const std::string & where)
{
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

template <class F>
auto guarded(const std::string & field, F && fn) -> decltype(fn())
{
  try {
    return fn();
  } catch (const ScenarioError &) {
    throw;
  } catch (const std::exception & e) {
    throw ScenarioError(field, e.what());
  }
}

simworld::Actor parse_actor(const json & j, const std::string & where)
{
  reject_unknown(j, {"id", "class", "x", "y", "psi", "v", "script"}, where);
  simworld::Actor a;
  a.id = get<std::string>(j, "id", where);
  a.cls = guarded(where + ".class", [&] { return simworld::actor_class_from_string(get<std::string>(j, "class", where)); });
  a.pose.x = get<double>(j, "x", where);
  a.pose.y = get<double>(j, "y", where);
  a.pose.psi = simworld::wrap_angle(get_or<double>(j, "psi", 0.0, where));
  a.v = get_or<double>(j, "v", 0.0, where);
  if (j.contains("script")) {
    const auto & s = j.at("script");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string sw = where + ".script[" + std::to_string(i) + "]";
      reject_unknown(s[i], {"t", "v", "psi"}, sw);
      a.script.push_back({get<double>(s[i], "t", sw), get<double>(s[i], "v", sw), get<double>(s[i], "psi", sw)});
    }
  }
  return a;
}

std::size_t line_of(const std::string & text, std::size_t byte)
{
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

ScenarioSpec parse_scenario(const std::string & text, const std::string & base_dir, const std::string & source)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error & e) {
    throw ScenarioError("", source + ": syntax error at line " + std::to_string(line_of(text, e.byte)));
  }

  reject_unknown(doc, {"schema", "name", "map_label", "road", "road_condition", "weather", "actors",
                       "commands", "trajectory_library", "situation", "agent_cadence", "duration",
                       "seed", "ego", "initial_behavior", "localization_noise", "expected"}, "");
  if (get<int>(doc, "schema", "") != 1) {
    throw ScenarioError("schema", "unsupported version");
  }

  ScenarioSpec s;
  s.source_path = source;
  s.name = get<std::string>(doc, "name", "");
  s.map_label = guarded("map_label", [&] { return autonomy::map_label_from_string(get<std::string>(doc, "map_label", "")); });

  const auto & road = doc.contains("road") ? doc.at("road") : throw ScenarioError("road", "missing");
  reject_unknown(road, {"polyline", "lanes", "lane_width"}, "road");
  s.road.polyline = get<std::vector<std::array<double, 2>>>(road, "polyline", "road");
  s.road.lanes = get_or<int>(road, "lanes", 1, "road");
  s.road.lane_width = get_or<double>(road, "lane_width", 3.5, "road");

  s.road_condition = guarded("road_condition", [&] {
    return road_condition_from_string(get_or<std::string>(doc, "road_condition", "dry", ""));
  });

  if (doc.contains("weather")) {
    const auto & w = doc.at("weather");
    reject_unknown(w, {"kind", "overrides"}, "weather");
    s.weather_label = get<std::string>(w, "kind", "weather");
    s.weather = guarded("weather.kind", [&] { return combined_weather(s.weather_label); });
    if (w.contains("overrides")) {
      const auto & o = w.at("overrides");
      reject_unknown(o, {"visibility", "dropout_p", "pos_noise_sigma", "friction"}, "weather.overrides");
      s.weather.visibility = get_or<double>(o, "visibility", s.weather.visibility, "weather.overrides");
      s.weather.dropout_p = get_or<double>(o, "dropout_p", s.weather.dropout_p, "weather.overrides");
      s.weather.pos_noise_sigma = get_or<double>(o, "pos_noise_sigma", s.weather.pos_noise_sigma, "weather.overrides");
      s.weather.friction = get_or<double>(o, "friction", s.weather.friction, "weather.overrides");
    }
  } else {
    s.weather = simworld::weather_preset(simworld::WeatherKind::clear);
  }

  if (doc.contains("actors")) {
    const auto & arr = doc.at("actors");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      s.actors.push_back(parse_actor(arr[i], "actors[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("commands")) {
    const auto & arr = doc.at("commands");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "commands[" + std::to_string(i) + "]";
      reject_unknown(arr[i], {"t", "text"}, where);
      s.commands.push_back({get<double>(arr[i], "t", where), get<std::string>(arr[i], "text", where)});
    }
  }

  s.trajectory_library_path = get<std::string>(doc, "trajectory_library", "");
  std::filesystem::path lib(s.trajectory_library_path);
  if (lib.is_relative()) {
    lib = std::filesystem::path(base_dir) / lib;
  }
  s.library = guarded("trajectory_library", [&] { return autonomy::load_trajectory_library(lib.string()); });
  s.situation = get_or<std::string>(doc, "situation", "default", "");

  s.cadence = get_or<double>(doc, "agent_cadence", 3.0, "");
  s.duration = get<double>(doc, "duration", "");
  s.seed = get_or<std::uint64_t>(doc, "seed", 0, "");

  const auto & ego = doc.contains("ego") ? doc.at("ego") : throw ScenarioError("ego", "missing");
  reject_unknown(ego, {"x", "y", "psi", "v"}, "ego");
  s.ego.pose.x = get<double>(ego, "x", "ego");
  s.ego.pose.y = get<double>(ego, "y", "ego");
  s.ego.pose.psi = simworld::wrap_angle(get<double>(ego, "psi", "ego"));
  s.ego.v = get_or<double>(ego, "v", 0.0, "ego");

  s.initial_behavior = get_or<std::string>(doc, "initial_behavior", "following", "");
  if (doc.contains("localization_noise")) {
    const auto & n = doc.at("localization_noise");
    reject_unknown(n, {"sigma_xy", "sigma_psi", "sigma_v"}, "localization_noise");
    s.localization.sigma_xy = get_or<double>(n, "sigma_xy", s.localization.sigma_xy, "localization_noise");
    s.localization.sigma_psi = get_or<double>(n, "sigma_psi", s.localization.sigma_psi, "localization_noise");
    s.localization.sigma_v = get_or<double>(n, "sigma_v", s.localization.sigma_v, "localization_noise");
  }

  if (doc.contains("expected")) {
    const auto & arr = doc.at("expected");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "expected[" + std::to_string(i) + "]";
      reject_unknown(arr[i], {"t0", "t1", "behavior", "params"}, where);
      Expectation e;
      e.t0 = get<double>(arr[i], "t0", where);
      e.t1 = get<double>(arr[i], "t1", where);
      e.behavior = get_or<std::string>(arr[i], "behavior", "", where);
      if (arr[i].contains("params")) {
        for (const auto & p : arr[i].at("params")) {
          reject_unknown(p, {"name", "cmp", "value"}, where + ".params");
          ParamExpectation pe;
          pe.name = get<std::string>(p, "name", where + ".params");
          const auto cmp = get<std::string>(p, "cmp", where + ".params");
          if (cmp != "lt" && cmp != "gt") {
            throw ScenarioError(where + ".params.cmp", "must be 'lt' or 'gt'");
          }
          pe.cmp = cmp == "lt" ? ParamExpectation::Cmp::lt : ParamExpectation::Cmp::gt;
          pe.value = get<double>(p, "value", where + ".params");
          e.params.push_back(pe);
        }
      }
      s.expected.push_back(std::move(e));
    }
  }

  validate_scenario(s);
  return s;
}

ScenarioSpec load_scenario(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("", "cannot open scenario: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  const auto base = std::filesystem::path(path).parent_path().string();
  return parse_scenario(ss.str(), base, path);
}

}  // namespace vlmtest::harness

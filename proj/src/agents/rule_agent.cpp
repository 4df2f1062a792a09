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

#include "vlmtest/agents/agents.hpp"
#include "vlmtest/runtime/clock.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace vlmtest::agents
{

namespace
{
std::string lowered(std::string_view s)
{
  std::string out(s);
  for (auto & c : out) {
    if (c >= 'A' && c <= 'Z') {
      c = static_cast<char>(c - 'A' + 'a');
    }
  }
  return out;
}

bool matches(const RuleMatch & m, const midlayer::DrivingStateVector & vs, const RuleThresholds & t)
{
  if (m.map && *m.map != vs.S.map) {
    return false;
  }
  if (!m.command_any.empty()) {
    const auto text = lowered(vs.H.text);
    const bool any = std::any_of(m.command_any.begin(), m.command_any.end(), [&](const std::string & s) {
      return text.find(lowered(s)) != std::string::npos;
    });
    if (!any) {
      return false;
    }
  }
  if (m.lead_gap_below) {
    const auto gap = lead_gap(vs.F.detections, t);
    if (!gap || !(*gap < *m.lead_gap_below)) {
      return false;
    }
  }
  if (!m.weather_in.empty() &&
      std::find(m.weather_in.begin(), m.weather_in.end(), vs.F.weather_hint) == m.weather_in.end()) {
    return false;
  }
  if (m.crowded && *m.crowded != is_crowded(vs.F.detections, t)) {
    return false;
  }
  for (const auto & id : m.behaviors_available) {
    const auto * b = vs.B.find(id);
    if (b == nullptr || !b->safe) {
      return false;
    }
  }
  return true;
}

constexpr autonomy::PidGains kDefaultGains{};
constexpr autonomy::MpcWeights kDefaultWeights{};

RuleEmit emit(
  std::string behavior, std::array<double, 3> lat, std::array<double, 3> lon, std::string thought)
{
  return RuleEmit{std::move(behavior), lat, lon, std::move(thought)};
}
}  // namespace

bool RuleMatch::empty() const
{
  return !map && command_any.empty() && !lead_gap_below && weather_in.empty() && !crowded &&
         behaviors_available.empty();
}

std::optional<double> lead_gap(const autonomy::DetectionSet & d, const RuleThresholds & t)
{
  std::optional<double> best;
  for (const auto & item : d.items) {
    if (item.box.cx > 0.0 && std::abs(item.box.cy) < t.lane_half_width) {
      if (!best || item.box.cx < *best) {
        best = item.box.cx;
      }
    }
  }
  return best;
}

bool is_crowded(const autonomy::DetectionSet & d, const RuleThresholds & t)
{
  const auto n = std::count_if(d.items.begin(), d.items.end(), [&](const autonomy::Detection & item) {
    return std::hypot(item.box.cx, item.box.cy) <= t.crowded_radius;
  });
  return static_cast<std::size_t>(n) >= t.crowded_count;
}

void validate_policy(const RulePolicy & policy)
{
  if (policy.rules.empty()) {
    throw std::invalid_argument("rule policy: no rules");
  }
  const auto & last = policy.rules.back();
  const std::array<double, 3> lat{kDefaultWeights.w_lat, kDefaultWeights.w_head, kDefaultWeights.c_speed};
  const std::array<double, 3> lon{kDefaultGains.kp, kDefaultGains.ki, kDefaultGains.kd};
  if (!last.match.empty() || last.emit.behavior != "following" || last.emit.lateral != lat ||
      last.emit.longitudinal != lon) {
    throw std::invalid_argument(
      "rule policy: last rule must match everything and emit following with default parameters");
  }
  std::set<std::string> names;
  for (const auto & r : policy.rules) {
    if (r.emit.behavior.empty()) {
      throw std::invalid_argument("rule policy: rule '" + r.name + "' emits no behavior");
    }
    if (!names.insert(r.name).second) {
      throw std::invalid_argument("rule policy: duplicate rule name '" + r.name + "'");
    }
  }
}

RulePolicy default_policy()
{
  using autonomy::MapLabel;
  using simworld::WeatherKind;
  RulePolicy p;
  const std::array<double, 3> lat{kDefaultWeights.w_lat, kDefaultWeights.w_head, kDefaultWeights.c_speed};
  const std::array<double, 3> lon{kDefaultGains.kp, kDefaultGains.ki, kDefaultGains.kd};

  {
    Rule r{"highway_overtake", {}, {}};
    r.match.map = MapLabel::highway;
    r.match.command_any = {"too slow", "overtake", "pass"};
    r.match.behaviors_available = {"overtake"};
    r.emit = emit("overtake", lat, lon,
      "The passenger finds the traffic too slow and the adjacent lane is clear, so I should overtake "
      "the slow vehicle ahead");
    p.rules.push_back(r);
  }
  {
    Rule r{"highway_caution", {}, {}};
    r.match.map = MapLabel::highway;
    r.match.weather_in = {WeatherKind::snow, WeatherKind::fog};
    r.emit = emit("following", {0.2, 0.35, 4.0}, {0.6, 0.02, 0.01},
      "Snow reduces traction and visibility, so I should keep following with gentler acceleration "
      "and smoother steering");
    p.rules.push_back(r);
  }
  {
    Rule r{"intersection_caution", {}, {}};
    r.match.map = MapLabel::intersection;
    r.match.weather_in = {WeatherKind::snow, WeatherKind::fog};
    r.emit = emit("following", {0.2, 0.35, 4.0}, {0.7, 0.02, 0.01},
      "Visibility and traction are poor at this intersection, so I should follow cautiously with "
      "softer acceleration and steering");
    p.rules.push_back(r);
  }
  {
    Rule r{"intersection_hurry", {}, {}};
    r.match.map = MapLabel::intersection;
    r.match.command_any = {"flight", "hurry", "quick", "late"};
    r.emit = emit("following", lat, {1.6, 0.03, 0.01},
      "The passenger is in a hurry and the road is clear, so I should keep following and accelerate "
      "more firmly");
    p.rules.push_back(r);
  }
  {
    Rule r{"parking_crowded", {}, {}};
    r.match.map = MapLabel::parkinglot;
    r.match.crowded = true;
    r.emit = emit("following", {1.0, 0.35, 2.0}, {0.8, 0.02, 0.01},
      "The parking lot is crowded, so I should track the path tightly and move slowly");
    p.rules.push_back(r);
  }
  {
    Rule r{"parking_quick", {}, {}};
    r.match.map = MapLabel::parkinglot;
    r.match.command_any = {"quick", "hurry", "fast"};
    r.emit = emit("following", {0.6, 0.35, 2.0}, {1.5, 0.02, 0.01},
      "The lot is clear and the passenger wants to leave quickly, so I can relax lateral tracking "
      "and accelerate more");
    p.rules.push_back(r);
  }
  {
    Rule r{"highway_slow_lead", {}, {}};
    r.match.map = MapLabel::highway;
    r.match.lead_gap_below = 25.0;
    r.emit = emit("following", lat, lon, "A vehicle is close ahead, so I should keep a safe following distance");
    p.rules.push_back(r);
  }
  p.rules.push_back(Rule{"default", {}, emit("following", lat, lon, "Nothing calls for a change, so I keep following the lane")});
  validate_policy(p);
  return p;
}

std::size_t matching_rule(const midlayer::DrivingStateVector & vs, const RulePolicy & policy)
{
  for (std::size_t i = 0; i < policy.rules.size(); ++i) {
    if (matches(policy.rules[i].match, vs, policy.thresholds)) {
      return i;
    }
  }
  return policy.rules.size() - 1;
}

AgentReply decide_rule(const midlayer::DrivingStateVector & vs, const RulePolicy & policy)
{
  const auto & e = policy.rules.at(matching_rule(vs, policy)).emit;
  midlayer::ActionVector a;
  a.behavior = e.behavior;
  a.lateral = e.lateral;
  a.longitudinal = e.longitudinal;
  a.rationale = e.thought;
  return AgentReply{interface::render_action(a), 0.0, Outcome::ok};
}

RuleAgent::RuleAgent(RulePolicy policy) : policy_(std::move(policy)) { validate_policy(policy_); }

AgentReply RuleAgent::decide(const AgentRequest &, const midlayer::DrivingStateVector & vs)
{
  const auto t0 = runtime::wall_now_ns();
  auto reply = decide_rule(vs, policy_);
  reply.latency_wall_ms = static_cast<double>(runtime::wall_now_ns() - t0) / 1e6;
  return reply;
}

// ---------------------------------------------------------------------------
// Policy files

namespace
{
void reject_unknown(const nlohmann::json & j, std::initializer_list<std::string_view> allowed, const std::string & where)
{
  for (const auto & [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw std::invalid_argument(where + ": unknown field '" + key + "'");
    }
  }
}
}  // namespace

void to_json(nlohmann::json & j, const RulePolicy & p)
{
  j = nlohmann::json::object();
  j["thresholds"] = {
    {"lane_half_width", p.thresholds.lane_half_width},
    {"crowded_radius", p.thresholds.crowded_radius},
    {"crowded_count", p.thresholds.crowded_count}};
  auto & rules = j["rules"] = nlohmann::json::array();
  for (const auto & r : p.rules) {
    nlohmann::json m = nlohmann::json::object();
    if (r.match.map) {
      m["map"] = std::string(autonomy::to_string(*r.match.map));
    }
    if (!r.match.command_any.empty()) {
      m["command_any"] = r.match.command_any;
    }
    if (r.match.lead_gap_below) {
      m["lead_gap_below"] = *r.match.lead_gap_below;
    }
    if (!r.match.weather_in.empty()) {
      auto & w = m["weather_in"] = nlohmann::json::array();
      for (auto k : r.match.weather_in) {
        w.push_back(std::string(simworld::to_string(k)));
      }
    }
    if (r.match.crowded) {
      m["crowded"] = *r.match.crowded;
    }
    if (!r.match.behaviors_available.empty()) {
      m["behaviors_available"] = r.match.behaviors_available;
    }
    rules.push_back({
      {"name", r.name},
      {"match", m},
      {"emit",
       {{"behavior", r.emit.behavior},
        {"lateral", r.emit.lateral},
        {"longitudinal", r.emit.longitudinal},
        {"thought", r.emit.thought}}}});
  }
}

void from_json(const nlohmann::json & j, RulePolicy & p)
{
  reject_unknown(j, {"thresholds", "rules"}, "rule policy");
  p = RulePolicy{};
  if (j.contains("thresholds")) {
    const auto & t = j.at("thresholds");
    reject_unknown(t, {"lane_half_width", "crowded_radius", "crowded_count"}, "rule policy thresholds");
    p.thresholds.lane_half_width = t.value("lane_half_width", p.thresholds.lane_half_width);
    p.thresholds.crowded_radius = t.value("crowded_radius", p.thresholds.crowded_radius);
    p.thresholds.crowded_count = t.value("crowded_count", p.thresholds.crowded_count);
  }
  for (const auto & rj : j.at("rules")) {
    Rule r;
    reject_unknown(rj, {"name", "match", "emit"}, "rule");
    r.name = rj.at("name").get<std::string>();
    const auto where = "rule '" + r.name + "'";
    const auto & m = rj.value("match", nlohmann::json::object());
    reject_unknown(m, {"map", "command_any", "lead_gap_below", "weather_in", "crowded", "behaviors_available"}, where);
    if (m.contains("map")) {
      r.match.map = autonomy::map_label_from_string(m.at("map").get<std::string>());
    }
    r.match.command_any = m.value("command_any", std::vector<std::string>{});
    if (m.contains("lead_gap_below")) {
      r.match.lead_gap_below = m.at("lead_gap_below").get<double>();
    }
    for (const auto & w : m.value("weather_in", std::vector<std::string>{})) {
      r.match.weather_in.push_back(simworld::weather_kind_from_string(w));
    }
    if (m.contains("crowded")) {
      r.match.crowded = m.at("crowded").get<bool>();
    }
    r.match.behaviors_available = m.value("behaviors_available", std::vector<std::string>{});
    const auto & e = rj.at("emit");
    reject_unknown(e, {"behavior", "lateral", "longitudinal", "thought"}, where);
    r.emit.behavior = e.at("behavior").get<std::string>();
    r.emit.lateral = e.value("lateral", r.emit.lateral);
    r.emit.longitudinal = e.value("longitudinal", r.emit.longitudinal);
    r.emit.thought = e.value("thought", std::string{});
    p.rules.push_back(std::move(r));
  }
  validate_policy(p);
}

}  // namespace vlmtest::agents

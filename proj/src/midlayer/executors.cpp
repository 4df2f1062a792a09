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

#include "vlmtest/midlayer/midlayer.hpp"

#include <algorithm>
#include <cmath>

namespace vlmtest::midlayer
{

std::array<ParamRange, 6> ordered(const SafetyRanges & r)
{
  return {r.w_lat, r.w_head, r.c_speed, r.kp, r.ki, r.kd};
}

std::array<double, 6> ordered(const ActionVector & a)
{
  return {a.lateral[0], a.lateral[1], a.lateral[2], a.longitudinal[0], a.longitudinal[1], a.longitudinal[2]};
}

void validate_ranges(const SafetyRanges & ranges)
{
  const auto rs = ordered(ranges);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (!std::isfinite(rs[i].lo) || !std::isfinite(rs[i].hi) || rs[i].lo > rs[i].hi) {
      throw MidlayerError("malformed safety range for " + std::string(kParamNames[i]));
    }
  }
  if (ranges.w_lat.hi <= 0.0 && ranges.w_head.hi <= 0.0) {
    throw MidlayerError("safety ranges force both MPC state weights to zero");
  }
}

SelectionResult select_behavior(
  const ActionVector & action, const autonomy::BehaviorSet & behaviors,
  const autonomy::Trajectory & current, double t_virtual)
{
  const autonomy::Behavior * chosen = behaviors.find(action.behavior);
  if (chosen != nullptr && chosen->safe) {
    return {chosen->trajectory, std::nullopt};
  }
  Violation v;
  v.t_virtual = t_virtual;
  v.requested = action.behavior;
  v.reason = chosen == nullptr ? "unknown behavior" : "behavior flagged unsafe";
  v.fallback = current.behavior_id;
  return {current, v};
}

RefinedParams refine_motion_control(
  const ActionVector & action, const SafetyRanges & ranges, const autonomy::MpcWeights & base)
{
  validate_ranges(ranges);
  const auto rs = ordered(ranges);
  const auto requested = ordered(action);
  std::array<double, 6> applied{};
  RefinedParams out;
  for (std::size_t i = 0; i < 6; ++i) {
    const double req = requested[i];
    applied[i] = std::isfinite(req) ? std::clamp(req, rs[i].lo, rs[i].hi) : rs[i].lo;
    if (!(applied[i] == req)) {
      out.clamped.emplace_back(kParamNames[i]);
    }
  }
  out.weights = base;
  out.weights.w_lat = applied[0];
  out.weights.w_head = applied[1];
  out.weights.c_speed = applied[2];
  out.gains = autonomy::PidGains{applied[3], applied[4], applied[5]};
  return out;
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json & j, const PerceptionFeed & f)
{
  j = {
    {"t_virtual", f.t_virtual},
    {"frame_tag", f.frame_tag},
    {"weather_hint", simworld::to_string(f.weather_hint)},
    {"detections", f.detections},
    {"summary", f.summary}};
}

void to_json(nlohmann::json & j, const HumanCommand & h)
{
  j = {{"text", h.text}, {"t_detected", h.t_detected}, {"t_virtual", h.t_virtual}, {"latched", h.latched}};
}

void to_json(nlohmann::json & j, const DrivingStateVector & v)
{
  j = {
    {"t_virtual", v.t_virtual},
    {"seq", {{"F", v.seq.f}, {"B", v.seq.b}, {"S", v.seq.s}, {"H", v.seq.h}}},
    {"S", v.S},
    {"B", v.B.safe_ids()},
    {"H", v.H.text},
    {"frame_tag", v.F.frame_tag},
    {"summary", v.F.summary}};
}

void to_json(nlohmann::json & j, const ActionVector & a)
{
  j = {
    {"behavior", a.behavior},
    {"lateral", a.lateral},
    {"longitudinal", a.longitudinal},
    {"rationale", a.rationale}};
}

void from_json(const nlohmann::json & j, ActionVector & a)
{
  a.behavior = j.at("behavior").get<std::string>();
  a.lateral = j.at("lateral").get<std::array<double, 3>>();
  a.longitudinal = j.at("longitudinal").get<std::array<double, 3>>();
  a.rationale = j.value("rationale", std::string{});
}

void to_json(nlohmann::json & j, const ExecutionPlan & p)
{
  j = {
    {"behavior", p.trajectory.behavior_id},
    {"gains", p.gains},
    {"weights", p.weights},
    {"clamped", p.clamped}};
}

void to_json(nlohmann::json & j, const Violation & v)
{
  j = {{"t_virtual", v.t_virtual}, {"requested", v.requested}, {"reason", v.reason}, {"fallback", v.fallback}};
}

void from_json(const nlohmann::json & j, Violation & v)
{
  v.t_virtual = j.at("t_virtual").get<double>();
  v.requested = j.at("requested").get<std::string>();
  v.reason = j.at("reason").get<std::string>();
  v.fallback = j.at("fallback").get<std::string>();
}

namespace
{
nlohmann::json range_json(const ParamRange & r) { return {r.lo, r.hi}; }
ParamRange range_from(const nlohmann::json & j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
}  // namespace

void to_json(nlohmann::json & j, const SafetyRanges & r)
{
  j = {
    {"Kp", range_json(r.kp)}, {"Ki", range_json(r.ki)}, {"Kd", range_json(r.kd)},
    {"w_lat", range_json(r.w_lat)}, {"w_head", range_json(r.w_head)},
    {"c_speed", range_json(r.c_speed)}};
}

void from_json(const nlohmann::json & j, SafetyRanges & r)
{
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto & k = it.key();
    ParamRange * dst = k == "Kp"        ? &r.kp
                       : k == "Ki"      ? &r.ki
                       : k == "Kd"      ? &r.kd
                       : k == "w_lat"   ? &r.w_lat
                       : k == "w_head"  ? &r.w_head
                       : k == "c_speed" ? &r.c_speed
                                        : nullptr;
    if (dst == nullptr) {
      throw MidlayerError("unknown safety range: " + k);
    }
    *dst = range_from(it.value());
  }
}

}  // namespace vlmtest::midlayer

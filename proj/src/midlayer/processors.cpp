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
#include <cstdio>
#include <limits>

namespace vlmtest::midlayer
{

PerceptionFeed aggregate_perception(
  const autonomy::DetectionSet & detections, const simworld::SensorFrame & frame, double window)
{
  if (std::abs(detections.t_virtual - frame.t_virtual) > window + 1e-9) {
    throw MidlayerError("aggregate_perception: detection and frame timestamps differ beyond window");
  }
  PerceptionFeed feed;
  feed.detections = detections;
  feed.frame_tag = frame.frame_tag;
  feed.weather_hint = frame.weather;
  feed.t_virtual = frame.t_virtual;
  feed.summary.reserve(detections.items.size());
  char buf[96];
  for (const auto & d : detections.items) {
    const double range = std::hypot(d.box.cx, d.box.cy);
    std::snprintf(
      buf, sizeof buf, "%s at %.1f m, confidence %.2f",
      std::string(simworld::to_string(d.cls)).c_str(), range, d.confidence);
    feed.summary.emplace_back(buf);
  }
  return feed;
}

autonomy::VehicleState adapt_localization(const autonomy::VehicleState & raw)
{
  autonomy::VehicleState s = raw;
  s.psi = simworld::wrap_angle(raw.psi);
  s.v = std::max(0.0, raw.v);
  return s;
}

double path_clearance(const autonomy::Trajectory & traj, double x, double y, double lookahead)
{
  const auto & w = traj.waypoints;
  double best = std::numeric_limits<double>::infinity();
  double travelled = 0.0;
  for (std::size_t i = 0; i + 1 < w.size() && travelled < lookahead; ++i) {
    double sx = w[i + 1].x - w[i].x;
    double sy = w[i + 1].y - w[i].y;
    const double len = std::hypot(sx, sy);
    if (len <= 0.0) {
      continue;
    }
    const double keep = std::min(len, lookahead - travelled);
    sx *= keep / len;
    sy *= keep / len;
    const double len2 = keep * keep;
    const double f = std::clamp(((x - w[i].x) * sx + (y - w[i].y) * sy) / len2, 0.0, 1.0);
    best = std::min(best, std::hypot(x - (w[i].x + f * sx), y - (w[i].y + f * sy)));
    travelled += len;
  }
  return best;
}

namespace
{
double mean_speed(const autonomy::Trajectory & t)
{
  double sum = 0.0;
  for (const auto & w : t.waypoints) {
    sum += w.v_ref;
  }
  return t.waypoints.empty() ? 0.0 : sum / static_cast<double>(t.waypoints.size());
}
}  // namespace

autonomy::BehaviorSet acquire_planning(
  const autonomy::BehaviorSet & behaviors, const simworld::WorldState & world,
  const ClearanceConfig & config)
{
  if (behaviors.behaviors.empty()) {
    throw MidlayerError("acquire_planning: empty behavior set");
  }
  autonomy::BehaviorSet out = behaviors;
  bool any_safe = false;
  for (auto & b : out.behaviors) {
    b.safe = true;
    b.degraded = false;
    for (const auto & actor : world.actors) {
      if (path_clearance(b.trajectory, actor.pose.x, actor.pose.y, config.lookahead) < config.safety_radius) {
        b.safe = false;
        break;
      }
    }
    any_safe = any_safe || b.safe;
  }
  if (!any_safe) {
    auto slowest = std::min_element(
      out.behaviors.begin(), out.behaviors.end(), [](const auto & a, const auto & b) {
        return mean_speed(a.trajectory) < mean_speed(b.trajectory);
      });
    slowest->safe = true;
    slowest->degraded = true;
  }
  return out;
}

HumanCommand process_command(
  const std::optional<std::string> & event, const HumanCommand & prev, double t_virtual)
{
  HumanCommand h;
  h.t_virtual = t_virtual;
  if (event && !event->empty()) {
    h.text = *event;
    h.t_detected = t_virtual;
    h.latched = false;
  } else {
    h.text = prev.text.empty() ? "none" : prev.text;
    h.t_detected = prev.t_detected;
    h.latched = true;
  }
  return h;
}

namespace
{
template <class T>
const T & require(const std::optional<T> & part, const char * name)
{
  if (!part) {
    throw MidlayerError(std::string("missing ") + name);
  }
  return *part;
}

void check_age(double stamp, double t, double window, const char * name)
{
  if (t - stamp > window + 1e-9 || stamp - t > 1e-9) {
    throw MidlayerError(std::string("stale ") + name);
  }
}
}  // namespace

DrivingStateVector assemble_state_vector(
  const std::optional<PerceptionFeed> & F, const std::optional<autonomy::BehaviorSet> & B,
  const std::optional<autonomy::VehicleState> & S, const std::optional<HumanCommand> & H, double t,
  PartSeq seq, double window)
{
  DrivingStateVector v;
  v.F = require(F, "perception");
  v.B = require(B, "behaviors");
  v.S = require(S, "vehicle state");
  v.H = require(H, "human command");
  check_age(v.F.t_virtual, t, window, "perception");
  check_age(v.B.t_virtual, t, window, "behaviors");
  check_age(v.S.t_virtual, t, window, "vehicle state");
  check_age(v.H.t_virtual, t, window, "human command");
  v.t_virtual = t;
  v.seq = seq;
  return v;
}

}  // namespace vlmtest::midlayer

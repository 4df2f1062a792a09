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

#include "vlmtest/simworld/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace vlmtest::simworld
{

EgoState step_dynamics(
  const EgoState & ego, const ControlCommand & cmd, double friction, double dt,
  const VehicleParams & params)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("step_dynamics: dt must be positive");
  }
  const double a_cmd = std::clamp(cmd.accel, -params.a_max, params.a_max);
  const double delta = std::clamp(cmd.steer, -params.delta_max, params.delta_max);
  const double a = friction * a_cmd;

  EgoState next;
  next.pose.x = ego.pose.x + ego.v * std::cos(ego.pose.psi) * dt;
  next.pose.y = ego.pose.y + ego.v * std::sin(ego.pose.psi) * dt;
  next.pose.psi = wrap_angle(ego.pose.psi + ego.v / params.wheelbase * std::tan(delta) * dt);
  next.v = std::max(0.0, ego.v + a * dt);
  next.a = a;
  return next;
}

namespace
{
void advance(Actor & a, double v, double psi, double span)
{
  a.pose.x += v * std::cos(psi) * span;
  a.pose.y += v * std::sin(psi) * span;
}
}  // namespace

std::vector<Actor> step_actors(const std::vector<Actor> & actors, double dt)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("step_actors: dt must be positive");
  }
  std::vector<Actor> out = actors;
  for (auto & a : out) {
    const double t0 = a.t;
    const double t1 = a.t + dt;
    double v = a.v;
    double psi = a.pose.psi;
    for (const auto & seg : a.script) {
      if (seg.t <= t0) {
        v = seg.v;
        psi = seg.psi;
      }
    }
    double cursor = t0;
    for (const auto & seg : a.script) {
      if (seg.t > t0 && seg.t < t1) {
        advance(a, v, psi, seg.t - cursor);
        cursor = seg.t;
        v = seg.v;
        psi = seg.psi;
      }
    }
    advance(a, v, psi, t1 - cursor);
    // A segment starting exactly at t1 governs from t1 on.
    for (const auto & seg : a.script) {
      if (seg.t <= t1) {
        v = seg.v;
        psi = seg.psi;
      }
    }
    a.v = v;
    a.pose.psi = wrap_angle(psi);
    a.t = t1;
  }
  return out;
}

SensorFrame sense(
  const WorldState & world, const EgoState & ego, const Weather & weather, Rng & rng,
  const SensorConfig & config, std::string frame_tag)
{
  SensorFrame frame;
  frame.t_virtual = world.t;
  frame.visibility = weather.visibility;
  frame.weather = weather.kind;
  if (frame_tag.empty()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "front_%06lld", static_cast<long long>(std::llround(world.t * 1000.0)));
    frame_tag = buf;
  }
  frame.frame_tag = std::move(frame_tag);

  const double c = std::cos(ego.pose.psi);
  const double s = std::sin(ego.pose.psi);
  auto visible = [&](double rx, double ry) {
    const double d = std::hypot(rx, ry);
    return d <= weather.visibility && std::abs(std::atan2(ry, rx)) <= config.fov_half_angle;
  };

  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const auto & actor : world.actors) {
    const double dx = actor.pose.x - ego.pose.x;
    const double dy = actor.pose.y - ego.pose.y;
    const double rx = c * dx + s * dy;
    const double ry = -s * dx + c * dy;
    if (!visible(rx, ry)) {
      continue;
    }
    // Draws happen for every candidate so the stream does not depend on p or sigma.
    const double u = uni(rng);
    const double nx = gauss(rng) * weather.pos_noise_sigma;
    const double ny = gauss(rng) * weather.pos_noise_sigma;
    if (u < weather.dropout_p) {
      continue;
    }
    if (!visible(rx + nx, ry + ny)) {
      continue;
    }
    frame.truth_objects.push_back(
      TruthObject{actor.id, actor.cls, rx + nx, ry + ny, default_extent(actor.cls)});
  }
  return frame;
}

}  // namespace vlmtest::simworld

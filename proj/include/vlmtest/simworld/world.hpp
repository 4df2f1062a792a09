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

#include <vector>

namespace vlmtest::simworld
{

/// Kinematic bicycle step. The command is saturated to the actuator limits in
/// `params`; `friction` scales the applied longitudinal acceleration and speed
/// never goes negative. Throws std::invalid_argument for dt <= 0.
EgoState step_dynamics(
  const EgoState & ego, const ControlCommand & cmd, double friction, double dt,
  const VehicleParams & params = {});

/// Advances every actor along its scripted timeline by dt, integrating
/// piecewise across segment boundaries. Past the last segment the actor holds
/// that segment's motion.
std::vector<Actor> step_actors(const std::vector<Actor> & actors, double dt);

struct SensorConfig
{
  double fov_half_angle{1.0471975511965976};  // 60 deg
};

/// Simulated front camera. Objects within visibility and the forward cone are
/// kept, each dropped independently with probability `dropout_p`, and the
/// survivors' positions perturbed with zero-mean Gaussian noise. Perturbed
/// positions that leave the visible region are discarded.
SensorFrame sense(
  const WorldState & world, const EgoState & ego, const Weather & weather, Rng & rng,
  const SensorConfig & config = {}, std::string frame_tag = {});

}  // namespace vlmtest::simworld

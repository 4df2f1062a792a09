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

#include "vlmtest/autonomy/autonomy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace vlmtest::autonomy
{

DetectionSet detect(const simworld::SensorFrame & frame)
{
  DetectionSet out;
  out.t_virtual = frame.t_virtual;
  out.items.reserve(frame.truth_objects.size());
  for (const auto & obj : frame.truth_objects) {
    const double range = std::hypot(obj.rel_x, obj.rel_y);
    const double p = frame.visibility > 0.0 ? 1.0 - range / frame.visibility : 0.0;
    Detection d;
    d.box = BoundingBox{obj.rel_x, obj.rel_y, obj.extent.length, obj.extent.width};
    d.cls = obj.cls;
    d.confidence = std::clamp(p, 0.05, 0.99);
    out.items.push_back(d);
  }
  return out;
}

VehicleState localize(
  const simworld::EgoState & ego, MapLabel map, const LocalizationNoise & noise,
  simworld::Rng & rng, double t_virtual)
{
  if (noise.sigma_xy < 0.0 || noise.sigma_psi < 0.0 || noise.sigma_v < 0.0) {
    throw std::invalid_argument("localize: noise sigmas must be non-negative");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  VehicleState s;
  s.x = ego.pose.x + gauss(rng) * noise.sigma_xy;
  s.y = ego.pose.y + gauss(rng) * noise.sigma_xy;
  s.psi = simworld::wrap_angle(ego.pose.psi + gauss(rng) * noise.sigma_psi);
  s.v = std::max(0.0, ego.v + gauss(rng) * noise.sigma_v);
  s.map = map;
  s.t_virtual = t_virtual;
  return s;
}

}  // namespace vlmtest::autonomy

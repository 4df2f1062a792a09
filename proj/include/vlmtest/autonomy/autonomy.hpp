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

#include "vlmtest/autonomy/types.hpp"
#include "vlmtest/simworld/types.hpp"

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vlmtest::autonomy
{

// ---------------------------------------------------------------------------
// Perception and localization surrogates

/// Simulated detector: one detection per truth object, confidence falling
/// linearly with range, clamped to [0.05, 0.99].
DetectionSet detect(const simworld::SensorFrame & frame);

struct LocalizationNoise
{
  double sigma_xy{0.0};
  double sigma_psi{0.0};
  double sigma_v{0.0};
};

/// Ground truth plus Gaussian noise. Throws std::invalid_argument on a negative sigma.
VehicleState localize(
  const simworld::EgoState & ego, MapLabel map, const LocalizationNoise & noise,
  simworld::Rng & rng, double t_virtual = 0.0);

// ---------------------------------------------------------------------------
// Planning

/// Pre-recorded behaviors keyed by (map label, situation).
class TrajectoryLibrary
{
public:
  void add(MapLabel map, std::string situation, Trajectory trajectory);
  bool has_map(MapLabel map) const;
  /// Throws std::out_of_range when there is no entry.
  const std::vector<Trajectory> & at(MapLabel map, const std::string & situation) const;
  std::vector<std::pair<MapLabel, std::string>> keys() const;

private:
  std::map<std::pair<MapLabel, std::string>, std::vector<Trajectory>> entries_;
};

/// Reads a library file (JSON: {"schema": 1, "trajectories": [...]}).
/// Each record carries behavior_id, map_label, optional situation and rows of
/// [x, y, v_ref]. Throws std::runtime_error with the record index on bad input.
TrajectoryLibrary load_trajectory_library(const std::string & path);
TrajectoryLibrary parse_trajectory_library(const nlohmann::json & doc);

/// Candidate behaviors for the current map, each trimmed so it starts at the
/// ego's projection onto the path. Throws std::out_of_range when the library
/// has no entry for the map label, std::invalid_argument on duplicate ids.
BehaviorSet plan_behaviors(
  const TrajectoryLibrary & library, const VehicleState & state,
  const std::string & situation = "default");

/// Closest point of a polyline trajectory to (x, y).
struct PathProjection
{
  std::size_t segment{0};  // index of the segment start waypoint
  double fraction{0.0};    // position along the segment in [0, 1]
  double px{0.0};
  double py{0.0};
  double heading{0.0};
  double lateral{0.0};  // signed, positive when the point lies left of the path
  double v_ref{0.0};
  double kappa{0.0};
};

PathProjection project_onto(const Trajectory & trajectory, double x, double y);

// ---------------------------------------------------------------------------
// Control

struct PidOutput
{
  double u{0.0};
  PidState state;
};

/// u = Kp e[k] + Ki sum(e[i] dt) + Kd (e[k] - e[k-1]) / dt with the current
/// sample included in the sum and e[-1] = 0. The integral is bounded by
/// +-limits.integral_max and u is saturated to +-limits.a_max.
PidOutput pid_speed_control(
  double error, const PidState & state, const PidGains & gains, const PidLimits & limits = {});

struct LateralError
{
  double e_lat{0.0};
  double e_psi{0.0};
};

struct MpcSolution
{
  std::vector<double> inputs;  // unclamped optimal sequence, length N
  double cost{0.0};
};

/// Unconstrained finite-horizon optimum of the linear time-varying lateral
/// error model, by backward Riccati recursion. Throws std::invalid_argument
/// on N < 1, both state weights zero, or a kappa profile shorter than N.
MpcSolution mpc_solve(
  const LateralError & err0, double v, std::span<const double> kappa_ref,
  const MpcWeights & weights, double wheelbase);

/// First optimal steering input, clamped to [-delta_max, delta_max].
double mpc_lateral_control(
  const LateralError & err0, double v, std::span<const double> kappa_ref,
  const MpcWeights & weights, double wheelbase, double delta_max);

struct TrackerParams
{
  simworld::VehicleParams vehicle;
  PidLimits pid_limits;
};

struct TrackOutput
{
  simworld::ControlCommand command;
  PidState pid_state;
  LateralError error;
  double v_ref{0.0};
};

/// Decoupled tracking: PID on speed error to the nearest reference speed,
/// MPC on lateral/heading error to the local path tangent.
/// Throws std::invalid_argument for an empty or degenerate trajectory.
TrackOutput track(
  const Trajectory & trajectory, const VehicleState & state, const PidGains & gains,
  const MpcWeights & weights, const PidState & pid_state, const TrackerParams & params = {});

}  // namespace vlmtest::autonomy

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

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vlmtest::midlayer
{

/// Ten hertz: every part of a state vector must be at most this old.
inline constexpr double kAggregationWindow = 0.1;

struct PerceptionFeed
{
  autonomy::DetectionSet detections;
  std::string frame_tag;
  std::vector<std::string> summary;
  simworld::WeatherKind weather_hint{simworld::WeatherKind::clear};
  double t_virtual{0.0};
};

struct HumanCommand
{
  std::string text{"none"};
  double t_detected{0.0};
  double t_virtual{0.0};  // when this copy was published
  bool latched{false};

  bool is_none() const { return text == "none"; }
};

/// Sequence numbers of the topic messages a state vector was built from.
struct PartSeq
{
  std::uint64_t f{0};
  std::uint64_t b{0};
  std::uint64_t s{0};
  std::uint64_t h{0};
};

struct DrivingStateVector
{
  PerceptionFeed F;
  autonomy::BehaviorSet B;
  autonomy::VehicleState S;
  HumanCommand H;
  double t_virtual{0.0};
  PartSeq seq;
};

struct ActionVector
{
  std::string behavior;
  std::array<double, 3> lateral{};       // w_lat, w_head, c_speed
  std::array<double, 3> longitudinal{};  // Kp, Ki, Kd
  std::string rationale;

  bool operator==(const ActionVector &) const = default;
};

/// Closed interval for one tunable parameter.
struct ParamRange
{
  double lo{0.0};
  double hi{0.0};
};

/// Safety envelope for the six agent-tunable parameters.
struct SafetyRanges
{
  ParamRange kp{0.0, 3.0};
  ParamRange ki{0.0, 0.5};
  ParamRange kd{0.0, 0.5};
  ParamRange w_lat{0.01, 5.0};
  ParamRange w_head{0.01, 5.0};
  ParamRange c_speed{0.0, 10.0};
};

/// Parameter names in ActionVector order: lateral triple, then longitudinal.
inline constexpr std::array<std::string_view, 6> kParamNames{
  "w_lat", "w_head", "c_speed", "Kp", "Ki", "Kd"};

std::array<ParamRange, 6> ordered(const SafetyRanges & ranges);
std::array<double, 6> ordered(const ActionVector & a);

/// Throws std::invalid_argument unless every range has finite lo <= hi.
void validate_ranges(const SafetyRanges & ranges);

struct ExecutionPlan
{
  autonomy::Trajectory trajectory;
  autonomy::PidGains gains;
  autonomy::MpcWeights weights;
  std::vector<std::string> clamped;
};

struct Violation
{
  double t_virtual{0.0};
  std::string requested;
  std::string reason;
  std::string fallback;
};

class MidlayerError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Information processing

/// "<class> at <range> m, confidence <p>" per detection. Throws MidlayerError
/// when the detection and frame timestamps differ by more than `window`.
PerceptionFeed aggregate_perception(
  const autonomy::DetectionSet & detections, const simworld::SensorFrame & frame,
  double window = kAggregationWindow);

/// Normalizes a localization result: heading wrapped, speed non-negative. Idempotent.
autonomy::VehicleState adapt_localization(const autonomy::VehicleState & raw);

struct ClearanceConfig
{
  double safety_radius{1.5};  // m, actor centre to path
  double lookahead{15.0};     // m of path checked from its start
};

/// Minimum distance from (x, y) to the first `lookahead` metres of the path.
double path_clearance(const autonomy::Trajectory & traj, double x, double y, double lookahead);

/// Flags every behavior whose checked path passes within the safety radius of
/// an actor. If nothing survives, the behavior with the lowest mean reference
/// speed is kept, marked degraded. Throws MidlayerError on an empty set.
autonomy::BehaviorSet acquire_planning(
  const autonomy::BehaviorSet & behaviors, const simworld::WorldState & world,
  const ClearanceConfig & config = {});

/// A new event replaces the previous command; otherwise the previous one is
/// republished as latched.
HumanCommand process_command(
  const std::optional<std::string> & event, const HumanCommand & prev, double t_virtual);

/// Joins the latest copy of each part. Throws MidlayerError when a part is
/// missing ("missing <part>") or older than the window ("stale <part>").
DrivingStateVector assemble_state_vector(
  const std::optional<PerceptionFeed> & F, const std::optional<autonomy::BehaviorSet> & B,
  const std::optional<autonomy::VehicleState> & S, const std::optional<HumanCommand> & H,
  double t, PartSeq seq = {}, double window = kAggregationWindow);

// ---------------------------------------------------------------------------
// Execution

struct SelectionResult
{
  autonomy::Trajectory trajectory;
  std::optional<Violation> violation;
};

/// Returns the requested behavior if it is a safe member of the set, else
/// `current` together with a violation record. Never throws.
SelectionResult select_behavior(
  const ActionVector & action, const autonomy::BehaviorSet & behaviors,
  const autonomy::Trajectory & current, double t_virtual = 0.0);

struct RefinedParams
{
  autonomy::PidGains gains;
  autonomy::MpcWeights weights;
  std::vector<std::string> clamped;
};

/// Clamps the six requested parameters into `ranges`; non-finite requests
/// fall to the lower bound. Horizon, dt and terminal weight come from `base`.
RefinedParams refine_motion_control(
  const ActionVector & action, const SafetyRanges & ranges,
  const autonomy::MpcWeights & base = {});

void to_json(nlohmann::json & j, const PerceptionFeed & f);
void to_json(nlohmann::json & j, const HumanCommand & h);
void to_json(nlohmann::json & j, const DrivingStateVector & v);
void to_json(nlohmann::json & j, const ActionVector & a);
void from_json(const nlohmann::json & j, ActionVector & a);
void to_json(nlohmann::json & j, const ExecutionPlan & p);
void to_json(nlohmann::json & j, const Violation & v);
void from_json(const nlohmann::json & j, Violation & v);
void to_json(nlohmann::json & j, const SafetyRanges & r);
void from_json(const nlohmann::json & j, SafetyRanges & r);

}  // namespace vlmtest::midlayer

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

// Independent output checks behind the accuracy metric. Each one recomputes
// a module's expected output by a different route than the module itself.

#include "vlmtest/harness/harness.hpp"

namespace vlmtest::harness::checks
{

Check perception(
  const autonomy::DetectionSet & detections, const simworld::SensorFrame & frame,
  const midlayer::PerceptionFeed & feed);

Check localization(const autonomy::VehicleState & raw, const autonomy::VehicleState & adapted);

Check planning(
  const autonomy::BehaviorSet & raw, const simworld::WorldState & world,
  const midlayer::ClearanceConfig & clearance, const autonomy::BehaviorSet & acquired);

Check command(
  const std::vector<CommandEvent> & timeline, double t, bool event_now,
  const midlayer::HumanCommand & published);

Check prompt(
  const midlayer::DrivingStateVector & vs, const interface::PromptTemplate & tpl,
  const interface::Prompt & prompt);

Check action(const std::string & reply, const midlayer::ActionVector & parsed);

Check selection(
  const midlayer::ActionVector & action, const autonomy::BehaviorSet & behaviors,
  const autonomy::Trajectory & current, const midlayer::SelectionResult & result);

Check refinement(
  const midlayer::ActionVector & action, const midlayer::SafetyRanges & ranges,
  const autonomy::MpcWeights & base, const midlayer::RefinedParams & refined);

}  // namespace vlmtest::harness::checks

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

#include "checks.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace vlmtest::harness::checks
{

namespace
{
constexpr double kPi = 3.14159265358979323846;

Check make(std::string_view module, double t, bool ok, std::string detail = {})
{
  return Check{std::string(module), t, ok, ok ? std::string{} : std::move(detail)};
}

std::string fixed2(double v)
{
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

std::string fixed1(double v)
{
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << v;
  return os.str();
}

// Minimum distance from (x, y) to the first `lookahead` metres of the path,
// by dense sampling.
double sampled_clearance(const autonomy::Trajectory & traj, double x, double y, double lookahead)
{
  constexpr double kStep = 0.01;
  double best = std::numeric_limits<double>::infinity();
  double s = 0.0;
  const auto & w = traj.waypoints;
  for (std::size_t i = 0; i + 1 < w.size() && s < lookahead; ++i) {
    const double dx = w[i + 1].x - w[i].x;
    const double dy = w[i + 1].y - w[i].y;
    const double len = std::hypot(dx, dy);
    const double keep = std::min(len, lookahead - s);
    const int n = static_cast<int>(std::ceil(keep / kStep));
    for (int k = 0; k <= n; ++k) {
      const double f = std::min(1.0, (k * kStep) / len);
      if (f * len > keep + 1e-12) {
        break;
      }
      best = std::min(best, std::hypot(x - (w[i].x + f * dx), y - (w[i].y + f * dy)));
    }
    s += len;
  }
  return best;
}

double clamp_oracle(double v, double lo, double hi)
{
  if (std::isnan(v)) {
    return lo;
  }
  if (v < lo) {
    return lo;
  }
  if (v > hi) {
    return hi;
  }
  return v;
}
}  // namespace

Check perception(
  const autonomy::DetectionSet & detections, const simworld::SensorFrame & frame,
  const midlayer::PerceptionFeed & feed)
{
  const double t = frame.t_virtual;
  const std::string_view m = kModuleNames[3];
  if (feed.frame_tag != frame.frame_tag || feed.weather_hint != frame.weather) {
    return make(m, t, false, "frame tag or weather hint differs from the frame");
  }
  if (feed.detections.items.size() != detections.items.size() ||
      feed.summary.size() != detections.items.size()) {
    return make(m, t, false, "detection count mismatch");
  }
  for (std::size_t i = 0; i < detections.items.size(); ++i) {
    const auto & d = detections.items[i];
    const double range = std::sqrt(d.box.cx * d.box.cx + d.box.cy * d.box.cy);
    const std::string want = std::string(simworld::to_string(d.cls)) + " at " + fixed1(range) +
                             " m, confidence " + fixed2(d.confidence);
    if (feed.summary[i] != want) {
      return make(m, t, false, "summary '" + feed.summary[i] + "' != '" + want + "'");
    }
  }
  return make(m, t, true);
}

Check localization(const autonomy::VehicleState & raw, const autonomy::VehicleState & s)
{
  const std::string_view m = kModuleNames[4];
  const double t = raw.t_virtual;
  if (!(s.psi > -kPi && s.psi <= kPi) || s.v < 0.0) {
    return make(m, t, false, "heading or speed out of range");
  }
  const double dpsi = std::remainder(s.psi - raw.psi, 2.0 * kPi);
  const double v_want = raw.v < 0.0 ? 0.0 : raw.v;
  if (s.x != raw.x || s.y != raw.y || std::abs(dpsi) > 1e-9 || s.v != v_want || s.map != raw.map) {
    return make(m, t, false, "adapted state does not match the raw fix");
  }
  return make(m, t, true);
}

Check planning(
  const autonomy::BehaviorSet & raw, const simworld::WorldState & world,
  const midlayer::ClearanceConfig & clearance, const autonomy::BehaviorSet & acquired)
{
  const std::string_view m = kModuleNames[5];
  const double t = raw.t_virtual;
  if (acquired.behaviors.size() != raw.behaviors.size()) {
    return make(m, t, false, "behavior count changed");
  }
  constexpr double kBand = 0.01;  // sampling resolution: closer calls are not judged
  std::vector<int> want(raw.behaviors.size(), 1);  // 1 safe, 0 unsafe, -1 undecided
  bool any_safe = false;
  for (std::size_t i = 0; i < raw.behaviors.size(); ++i) {
    const auto & b = raw.behaviors[i];
    if (acquired.behaviors[i].trajectory.behavior_id != b.trajectory.behavior_id) {
      return make(m, t, false, "behavior order changed");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto & a : world.actors) {
      best = std::min(best, sampled_clearance(b.trajectory, a.pose.x, a.pose.y, clearance.lookahead));
    }
    if (std::abs(best - clearance.safety_radius) < kBand) {
      want[i] = -1;
    } else {
      want[i] = best >= clearance.safety_radius ? 1 : 0;
    }
    any_safe = any_safe || want[i] == 1;
  }
  std::size_t n_degraded = 0;
  for (std::size_t i = 0; i < want.size(); ++i) {
    const auto & got = acquired.behaviors[i];
    n_degraded += got.degraded ? 1 : 0;
    if (got.degraded) {
      continue;
    }
    if (want[i] >= 0 && got.safe != (want[i] == 1)) {
      return make(m, t, false, "safety flag of '" + got.trajectory.behavior_id + "' disagrees with clearance");
    }
  }
  if (any_safe && n_degraded != 0) {
    return make(m, t, false, "degraded fallback despite a safe behavior");
  }
  if (n_degraded > 1) {
    return make(m, t, false, "more than one degraded behavior");
  }
  return make(m, t, true);
}

Check command(
  const std::vector<CommandEvent> & timeline, double t, bool event_now,
  const midlayer::HumanCommand & h)
{
  const std::string_view m = kModuleNames[2];
  std::string want = "none";
  for (const auto & c : timeline) {
    if (c.t <= t + 1e-9) {
      want = c.text;
    }
  }
  if (h.text != want || h.latched == event_now) {
    return make(m, t, false, "command '" + h.text + "' expected '" + want + "'");
  }
  return make(m, t, true);
}

Check prompt(
  const midlayer::DrivingStateVector & vs, const interface::PromptTemplate & tpl,
  const interface::Prompt & p)
{
  const std::string_view m = kModuleNames[0];
  const double t = vs.t_virtual;
  std::string behaviors;
  for (const auto & b : vs.B.behaviors) {
    if (b.safe) {
      behaviors += (behaviors.empty() ? "" : ", ") + b.trajectory.behavior_id;
    }
  }
  const std::string lines[4] = {
    "The current vehicle state is [" + fixed2(vs.S.x) + ", " + fixed2(vs.S.y) + ", " + fixed2(vs.S.psi) +
      ", " + fixed2(vs.S.v * 3.6) + ", " + std::string(autonomy::to_string(vs.S.map)) + "]",
    "The front view image captured is [" + vs.F.frame_tag + "]",
    "The possible driving behavior is [" + behaviors + "]",
    "The passenger's command is [" + vs.H.text + "]"};
  if (p.text.rfind(tpl.system_statement, 0) != 0) {
    return make(m, t, false, "prompt does not open with the system statement");
  }
  std::size_t cursor = tpl.system_statement.size();
  for (const auto & ex : tpl.few_shot_examples) {
    const auto at = p.text.find(ex.query, cursor);
    if (at == std::string::npos) {
      return make(m, t, false, "example missing or out of order");
    }
    cursor = at + ex.query.size();
  }
  for (const auto & line : lines) {
    const auto at = p.text.find(line + "\n", cursor);
    if (at == std::string::npos) {
      return make(m, t, false, "status line missing: " + line);
    }
  }
  if (p.source_seq.f != vs.seq.f || p.source_seq.b != vs.seq.b || p.source_seq.s != vs.seq.s ||
      p.source_seq.h != vs.seq.h) {
    return make(m, t, false, "source sequence numbers differ");
  }
  return make(m, t, true);
}

Check action(const std::string & reply, const midlayer::ActionVector & parsed)
{
  const std::string_view m = kModuleNames[1];
  const auto again = interface::parse_action(interface::render_action(parsed));
  if (!std::holds_alternative<midlayer::ActionVector>(again) ||
      !(std::get<midlayer::ActionVector>(again) == parsed)) {
    return make(m, 0.0, false, "action does not survive a render and re-parse");
  }
  for (double v : midlayer::ordered(parsed)) {
    if (!std::isfinite(v)) {
      return make(m, 0.0, false, "non-finite parameter");
    }
  }
  std::string low;
  for (char c : reply) {
    low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (low.find(parsed.behavior) == std::string::npos) {
    return make(m, 0.0, false, "behavior not present in reply");
  }
  return make(m, 0.0, true);
}

Check selection(
  const midlayer::ActionVector & action, const autonomy::BehaviorSet & behaviors,
  const autonomy::Trajectory & current, const midlayer::SelectionResult & result)
{
  const std::string_view m = kModuleNames[6];
  bool requested_safe = false;
  for (const auto & b : behaviors.behaviors) {
    if (b.trajectory.behavior_id == action.behavior && b.safe) {
      requested_safe = true;
    }
  }
  if (requested_safe) {
    if (result.trajectory.behavior_id != action.behavior || result.violation) {
      return make(m, 0.0, false, "safe request not honoured");
    }
  } else if (result.trajectory.behavior_id != current.behavior_id ||
             result.trajectory.waypoints.size() != current.waypoints.size() || !result.violation) {
    return make(m, 0.0, false, "rejected request did not keep the current trajectory");
  }
  return make(m, 0.0, true);
}

Check refinement(
  const midlayer::ActionVector & a, const midlayer::SafetyRanges & r,
  const autonomy::MpcWeights & base, const midlayer::RefinedParams & out)
{
  const std::string_view m = kModuleNames[7];
  const bool ok = out.weights.w_lat == clamp_oracle(a.lateral[0], r.w_lat.lo, r.w_lat.hi) &&
                  out.weights.w_head == clamp_oracle(a.lateral[1], r.w_head.lo, r.w_head.hi) &&
                  out.weights.c_speed == clamp_oracle(a.lateral[2], r.c_speed.lo, r.c_speed.hi) &&
                  out.gains.kp == clamp_oracle(a.longitudinal[0], r.kp.lo, r.kp.hi) &&
                  out.gains.ki == clamp_oracle(a.longitudinal[1], r.ki.lo, r.ki.hi) &&
                  out.gains.kd == clamp_oracle(a.longitudinal[2], r.kd.lo, r.kd.hi) &&
                  out.weights.horizon == base.horizon && out.weights.dt == base.dt &&
                  out.weights.p_terminal == base.p_terminal;
  return make(m, 0.0, ok, "refined parameters differ from the clamped request");
}

}  // namespace vlmtest::harness::checks

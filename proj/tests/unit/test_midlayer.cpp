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
#include "vlmtest/midlayer/midlayer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

namespace ml = vlmtest::midlayer;
namespace av = vlmtest::autonomy;
namespace sw = vlmtest::simworld;

namespace
{
av::Trajectory line(std::string id, double y, double v_ref)
{
  std::vector<av::Waypoint> w;
  for (int i = 0; i <= 20; ++i) {
    w.push_back({2.0 * i, y, v_ref});
  }
  return av::make_trajectory(std::move(id), std::move(w));
}

av::BehaviorSet three_lanes()
{
  av::BehaviorSet b;
  b.behaviors = {{line("overtake", 3.5, 15.0)}, {line("yield", 0.0, 5.0)}, {line("following", 0.0, 10.0)}};
  return b;
}

// Minimum distance to the first `lookahead` metres of the path by dense sampling.
double sampled_clearance(const av::Trajectory & t, double x, double y, double lookahead)
{
  double best = std::numeric_limits<double>::infinity();
  double walked = 0.0;
  const auto & w = t.waypoints;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const double len = std::hypot(w[i + 1].x - w[i].x, w[i + 1].y - w[i].y);
    for (double s = 0.0; s <= len && walked + s <= lookahead; s += 0.001) {
      const double f = s / len;
      best = std::min(best, std::hypot(x - (w[i].x + f * (w[i + 1].x - w[i].x)), y - (w[i].y + f * (w[i + 1].y - w[i].y))));
    }
    walked += len;
    if (walked >= lookahead) {
      break;
    }
  }
  return best;
}

ml::ActionVector action(std::string behavior)
{
  return {std::move(behavior), {0.2, 0.35, 2.0}, {1.1, 0.02, 0.01}, ""};
}
}  // namespace

TEST(Perception, SummaryFormat)
{
  av::DetectionSet d;
  d.t_virtual = 1.0;
  sw::SensorFrame f;
  f.t_virtual = 1.0;
  f.frame_tag = "front_001000";
  f.weather = sw::WeatherKind::rain;
  auto feed = ml::aggregate_perception(d, f);
  EXPECT_TRUE(feed.summary.empty());
  EXPECT_EQ(feed.frame_tag, "front_001000");
  EXPECT_EQ(feed.weather_hint, sw::WeatherKind::rain);

  d.items.push_back({{20.0, 0.0, 4.5, 1.8}, sw::ActorClass::car, 0.9});
  d.items.push_back({{3.0, 4.0, 0.5, 0.5}, sw::ActorClass::pedestrian, 0.123});
  feed = ml::aggregate_perception(d, f);
  ASSERT_EQ(feed.summary.size(), 2u);
  EXPECT_EQ(feed.summary[0], "car at 20.0 m, confidence 0.90");
  EXPECT_EQ(feed.summary[1], "pedestrian at 5.0 m, confidence 0.12");
}

TEST(Perception, RejectsMismatchedTimestamps)
{
  av::DetectionSet d;
  d.t_virtual = 0.0;
  sw::SensorFrame f;
  f.t_virtual = 0.2;
  EXPECT_THROW(ml::aggregate_perception(d, f), ml::MidlayerError);
  f.t_virtual = 0.1;
  EXPECT_NO_THROW(ml::aggregate_perception(d, f));
}

TEST(Localization, WrapsAndIsIdempotent)
{
  av::VehicleState raw{1.0, 2.0, 3.2, 5.5, av::MapLabel::parkinglot, 0.3};
  const auto s = ml::adapt_localization(raw);
  EXPECT_NEAR(s.psi, -3.083185307179586, 1e-12);
  EXPECT_EQ(s.v, 5.5);
  EXPECT_EQ(s.map, av::MapLabel::parkinglot);
  const auto s2 = ml::adapt_localization(s);
  EXPECT_EQ(s2.psi, s.psi);
  EXPECT_EQ(s2.x, s.x);
  EXPECT_EQ(s2.v, s.v);
}

TEST(Planning, NoActorsKeepEverything)
{
  const auto out = ml::acquire_planning(three_lanes(), {});
  for (const auto & b : out.behaviors) {
    EXPECT_TRUE(b.safe);
    EXPECT_FALSE(b.degraded);
  }
  EXPECT_THROW(ml::acquire_planning({}, {}), ml::MidlayerError);
}

TEST(Planning, ActorOnOvertakePathExcludesOnlyOvertake)
{
  sw::WorldState w;
  w.actors.push_back({"p", sw::ActorClass::pedestrian, {8.0, 3.2, 0.0}, 0.0, {}, 0.0});
  const auto out = ml::acquire_planning(three_lanes(), w);
  EXPECT_EQ(out.safe_ids(), (std::vector<std::string>{"yield", "following"}));
}

TEST(Planning, BlockedEverywhereKeepsTheSlowestDegraded)
{
  sw::WorldState w;
  w.actors.push_back({"a", sw::ActorClass::car, {6.0, 0.5, 0.0}, 0.0, {}, 0.0});
  w.actors.push_back({"b", sw::ActorClass::car, {6.0, 3.0, 0.0}, 0.0, {}, 0.0});
  const auto out = ml::acquire_planning(three_lanes(), w);
  EXPECT_EQ(out.safe_ids(), (std::vector<std::string>{"yield"}));
  EXPECT_TRUE(out.find("yield")->degraded);
}

TEST(Planning, ActorsBeyondTheLookaheadAreIgnored)
{
  sw::WorldState w;
  w.actors.push_back({"far", sw::ActorClass::car, {30.0, 0.0, 0.0}, 0.0, {}, 0.0});
  const auto out = ml::acquire_planning(three_lanes(), w);
  EXPECT_EQ(out.safe_ids().size(), 3u);
}

TEST(Planning, ClearanceMatchesDenseSampling)
{
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ux(-5.0, 25.0);
  std::uniform_real_distribution<double> uy(-6.0, 6.0);
  std::vector<av::Waypoint> wp;
  for (int i = 0; i <= 30; ++i) {
    wp.push_back({1.0 * i, 2.0 * std::sin(i / 5.0), 5.0});
  }
  const auto t = av::make_trajectory("curve", wp);
  for (int i = 0; i < 100; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    EXPECT_NEAR(ml::path_clearance(t, x, y, 15.0), sampled_clearance(t, x, y, 15.0), 2e-3);
  }
}

TEST(Planning, BundledHighwayOvertakeBlockedMidLaneChange)
{
  const auto lib = av::load_trajectory_library(VLMTEST_SOURCE_DIR "/data/trajectories/highway.json");
  const auto & raw = lib.at(av::MapLabel::highway, "trip1");
  const av::Trajectory * overtake = nullptr;
  const av::Trajectory * following = nullptr;
  for (const auto & t : raw) {
    if (t.behavior_id == "overtake") {
      overtake = &t;
    } else if (t.behavior_id == "following") {
      following = &t;
    }
  }
  ASSERT_TRUE(overtake && following);
  // Waypoints are every 2 m from s = -10: index 70 is s = 130, 75 is s = 140.
  const auto & ego = following->waypoints[70];
  const auto & block = overtake->waypoints[75];
  const av::VehicleState s{ego.x, ego.y, 0.97, 13.9, av::MapLabel::highway, 0.0};
  const auto planned = av::plan_behaviors(lib, s, "trip1");
  sw::WorldState w;
  w.actors.push_back({"ped", sw::ActorClass::pedestrian, {block.x, block.y, 0.0}, 0.0, {}, 0.0});
  const auto out = ml::acquire_planning(planned, w);
  for (const auto & b : out.behaviors) {
    const double oracle = sampled_clearance(b.trajectory, block.x, block.y, 15.0);
    EXPECT_EQ(b.safe, oracle >= 1.5) << b.trajectory.behavior_id << " clearance " << oracle;
  }
  EXPECT_EQ(out.safe_ids(), (std::vector<std::string>{"yield", "following"}));
}

TEST(Command, NewEventsReplaceAndAbsenceLatches)
{
  ml::HumanCommand h;
  EXPECT_TRUE(h.is_none());
  h = ml::process_command(std::nullopt, h, 0.0);
  EXPECT_EQ(h.text, "none");
  h = ml::process_command(std::string("The traffic is too slow"), h, 5.0);
  EXPECT_EQ(h.text, "The traffic is too slow");
  EXPECT_FALSE(h.latched);
  EXPECT_EQ(h.t_detected, 5.0);
  h = ml::process_command(std::nullopt, ml::HumanCommand{"Drive safely", 1.0, 1.0, false}, 1.1);
  EXPECT_EQ(h.text, "Drive safely");
  EXPECT_TRUE(h.latched);
  EXPECT_EQ(h.t_detected, 1.0);
  EXPECT_EQ(h.t_virtual, 1.1);
}

TEST(Command, TextIsConstantBetweenEvents)
{
  std::mt19937_64 rng(12);
  std::bernoulli_distribution fire(0.05);
  ml::HumanCommand h;
  std::string expected = "none";
  int n = 0;
  for (int k = 0; k < 1000; ++k) {
    std::optional<std::string> ev;
    if (fire(rng)) {
      ev = "command " + std::to_string(n++);
      expected = *ev;
    }
    h = ml::process_command(ev, h, 0.1 * k);
    EXPECT_EQ(h.text, expected);
    EXPECT_EQ(h.latched, !ev.has_value());
  }
}

TEST(StateVector, EchoesFreshParts)
{
  ml::PerceptionFeed f;
  f.t_virtual = 3.0;
  av::BehaviorSet b = three_lanes();
  b.t_virtual = 3.0;
  av::VehicleState s;
  s.t_virtual = 2.95;
  ml::HumanCommand h{"go", 2.0, 3.0, true};
  const auto v = ml::assemble_state_vector(f, b, s, h, 3.0, {4, 5, 6, 7});
  EXPECT_EQ(v.t_virtual, 3.0);
  EXPECT_EQ(v.seq.f, 4u);
  EXPECT_EQ(v.seq.h, 7u);
  EXPECT_EQ(v.H.text, "go");
  EXPECT_EQ(v.B.behaviors.size(), 3u);
}

TEST(StateVector, StaleOrMissingPartsAreErrors)
{
  ml::PerceptionFeed f;
  f.t_virtual = 2.0;
  av::BehaviorSet b;
  b.t_virtual = 3.0;
  av::VehicleState s;
  s.t_virtual = 3.0;
  ml::HumanCommand h;
  h.t_virtual = 3.0;
  try {
    ml::assemble_state_vector(f, b, s, h, 3.0);
    FAIL();
  } catch (const ml::MidlayerError & e) {
    EXPECT_STREQ(e.what(), "stale perception");
  }
  try {
    ml::assemble_state_vector(std::nullopt, b, s, h, 3.0);
    FAIL();
  } catch (const ml::MidlayerError & e) {
    EXPECT_STREQ(e.what(), "missing perception");
  }
}

TEST(StateVector, SlowAssemblyCarriesTheNewestSeq)
{
  // Parts published at 10 Hz; the vector is built every 3 s from the latest copies.
  std::uint64_t seq = 0;
  std::optional<ml::PerceptionFeed> f;
  std::optional<av::BehaviorSet> b;
  std::optional<av::VehicleState> s;
  std::optional<ml::HumanCommand> h;
  for (int k = 0; k <= 100; ++k) {
    const double t = 0.1 * k;
    ++seq;
    f = ml::PerceptionFeed{};
    f->t_virtual = t;
    b = av::BehaviorSet{};
    b->t_virtual = t;
    s = av::VehicleState{};
    s->t_virtual = t;
    h = ml::HumanCommand{};
    h->t_virtual = t;
    if (k > 0 && k % 30 == 0) {
      const auto v = ml::assemble_state_vector(f, b, s, h, t, {seq, seq, seq, seq});
      EXPECT_EQ(v.seq.f, static_cast<std::uint64_t>(k + 1));
      EXPECT_LE(t - v.F.t_virtual, ml::kAggregationWindow);
    }
  }
}

TEST(Selection, SafeMemberIsChosen)
{
  const auto set = three_lanes();
  const auto r = ml::select_behavior(action("overtake"), set, set.behaviors[2].trajectory, 6.0);
  EXPECT_EQ(r.trajectory.behavior_id, "overtake");
  EXPECT_FALSE(r.violation);
}

TEST(Selection, UnsafeOrUnknownKeepsCurrent)
{
  auto set = three_lanes();
  set.behaviors[0].safe = false;
  const auto & current = set.behaviors[2].trajectory;
  auto r = ml::select_behavior(action("overtake"), set, current, 6.0);
  EXPECT_EQ(r.trajectory.behavior_id, "following");
  ASSERT_TRUE(r.violation);
  EXPECT_EQ(r.violation->reason, "behavior flagged unsafe");
  EXPECT_EQ(r.violation->fallback, "following");
  EXPECT_EQ(r.violation->t_virtual, 6.0);
  r = ml::select_behavior(action("teleport"), set, current, 7.0);
  EXPECT_EQ(r.trajectory.behavior_id, "following");
  ASSERT_TRUE(r.violation);
  EXPECT_EQ(r.violation->requested, "teleport");
  EXPECT_EQ(r.violation->reason, "unknown behavior");
}

TEST(Selection, FuzzNeverPicksAnUnsafeTrajectory)
{
  std::mt19937_64 rng(31);
  std::bernoulli_distribution coin(0.5);
  const std::vector<std::string> names{"overtake", "yield", "following", "teleport", ""};
  std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
  for (int i = 0; i < 2000; ++i) {
    auto set = three_lanes();
    for (auto & b : set.behaviors) {
      b.safe = coin(rng);
    }
    const auto current = set.behaviors[pick(rng) % 3].trajectory;
    const auto r = ml::select_behavior(action(names[pick(rng)]), set, current);
    const auto * chosen = set.find(r.trajectory.behavior_id);
    ASSERT_NE(chosen, nullptr);
    if (!r.violation) {
      EXPECT_TRUE(chosen->safe);
    } else {
      EXPECT_EQ(r.trajectory.behavior_id, current.behavior_id);
    }
  }
}

TEST(Refinement, DefaultsPassThrough)
{
  const auto r = ml::refine_motion_control(action("following"), {});
  EXPECT_TRUE(r.clamped.empty());
  EXPECT_EQ(r.gains.kp, 1.1);
  EXPECT_EQ(r.gains.ki, 0.02);
  EXPECT_EQ(r.gains.kd, 0.01);
  EXPECT_EQ(r.weights.w_lat, 0.2);
  EXPECT_EQ(r.weights.w_head, 0.35);
  EXPECT_EQ(r.weights.c_speed, 2.0);
  EXPECT_EQ(r.weights.horizon, 20);
}

TEST(Refinement, ClampsAndRecordsNames)
{
  auto a = action("following");
  a.longitudinal = {50.0, -0.1, std::nan("")};
  const auto r = ml::refine_motion_control(a, {});
  EXPECT_EQ(r.gains.kp, 3.0);
  EXPECT_EQ(r.gains.ki, 0.0);
  EXPECT_EQ(r.gains.kd, 0.0);
  EXPECT_EQ(r.clamped, (std::vector<std::string>{"Kp", "Ki", "Kd"}));
  ml::SafetyRanges bad;
  bad.kp = {2.0, 1.0};
  EXPECT_THROW(ml::refine_motion_control(a, bad), ml::MidlayerError);
}

TEST(Refinement, FuzzStaysInsideTheEnvelope)
{
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> wild(-100.0, 100.0);
  std::uniform_int_distribution<int> special(0, 9);
  const ml::SafetyRanges ranges;
  const auto rs = ml::ordered(ranges);
  for (int i = 0; i < 10000; ++i) {
    ml::ActionVector a = action("following");
    for (auto * arr : {&a.lateral, &a.longitudinal}) {
      for (auto & x : *arr) {
        const int s = special(rng);
        x = s == 0   ? std::numeric_limits<double>::infinity()
            : s == 1 ? std::nan("")
            : s == 2 ? -std::numeric_limits<double>::infinity()
                     : wild(rng);
      }
    }
    const auto r = ml::refine_motion_control(a, ranges);
    const std::array<double, 6> got{r.weights.w_lat, r.weights.w_head, r.weights.c_speed, r.gains.kp, r.gains.ki, r.gains.kd};
    for (std::size_t k = 0; k < 6; ++k) {
      ASSERT_GE(got[k], rs[k].lo);
      ASSERT_LE(got[k], rs[k].hi);
    }
  }
}

TEST(Ranges, JsonRoundTrip)
{
  ml::SafetyRanges r;
  r.kp = {0.5, 2.0};
  const nlohmann::json j = r;
  const auto back = j.get<ml::SafetyRanges>();
  EXPECT_EQ(back.kp.lo, 0.5);
  EXPECT_EQ(back.kp.hi, 2.0);
  EXPECT_EQ(back.c_speed.hi, 10.0);
}

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

#include "mock_vlm_server.hpp"
#include "vlmtest/agents/agents.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <thread>

namespace ag = vlmtest::agents;
namespace in = vlmtest::interface;
namespace ml = vlmtest::midlayer;
namespace av = vlmtest::autonomy;
namespace sw = vlmtest::simworld;
using vlmtest::testing::MockResponse;
using vlmtest::testing::MockVlmServer;
using namespace std::chrono_literals;

namespace
{
av::Trajectory stub(std::string id)
{
  return av::make_trajectory(std::move(id), {{0, 0, 1}, {1, 0, 1}});
}

ml::DrivingStateVector state(av::MapLabel map, std::string command, std::vector<std::string> behaviors)
{
  ml::DrivingStateVector vs;
  vs.S.map = map;
  vs.H.text = std::move(command);
  for (auto & b : behaviors) {
    vs.B.behaviors.push_back({stub(b)});
  }
  return vs;
}

void add_detection(ml::DrivingStateVector & vs, double x, double y)
{
  vs.F.detections.items.push_back({{x, y, 1.0, 1.0}, sw::ActorClass::pedestrian, 0.9});
}

ml::ActionVector parse(const ag::AgentReply & r)
{
  const auto p = in::parse_action(r.text);
  EXPECT_TRUE(std::holds_alternative<ml::ActionVector>(p)) << r.text;
  return std::holds_alternative<ml::ActionVector>(p) ? std::get<ml::ActionVector>(p) : ml::ActionVector{};
}

const std::string kBlock =
  "Thought: mock\nAction: Selected Driving Behavior: [following]\n"
  "Lateral Control Params: [0.2, 0.35, 2]\nLongitudinal Control Params: [1.1, 0.02, 0.01]\n";

ag::AgentRequest request(std::chrono::milliseconds deadline = 2000ms)
{
  ag::AgentRequest r;
  r.prompt.text = "hello";
  r.deadline = deadline;
  r.seq = 1;
  return r;
}

ag::RemoteConfig remote(const std::string & endpoint, int retries = 2)
{
  ag::RemoteConfig c;
  c.endpoint = endpoint;
  c.max_retries = retries;
  c.token_env = "VLMTEST_TEST_TOKEN";
  return c;
}
}  // namespace

TEST(Outcome, NamesRoundTrip)
{
  for (auto o : {ag::Outcome::ok, ag::Outcome::timeout, ag::Outcome::transport_error, ag::Outcome::malformed}) {
    EXPECT_EQ(ag::outcome_from_string(ag::to_string(o)), o);
  }
  EXPECT_THROW(ag::outcome_from_string("bogus"), std::invalid_argument);
  const ag::AgentReply r{"x", 1.5, ag::Outcome::timeout};
  EXPECT_EQ(nlohmann::json(r).get<ag::AgentReply>(), r);
}

TEST(Request, DeadlineMustBePositive)
{
  auto r = request();
  EXPECT_NO_THROW(ag::validate_request(r));
  r.deadline = 0ms;
  EXPECT_THROW(ag::validate_request(r), std::invalid_argument);
}

TEST(RulePolicy, DefaultIsValidAndEndsWithCatchAll)
{
  const auto p = ag::default_policy();
  EXPECT_NO_THROW(ag::validate_policy(p));
  EXPECT_TRUE(p.rules.back().match.empty());
  EXPECT_EQ(p.rules.back().emit.behavior, "following");
}

TEST(RulePolicy, ValidationFailures)
{
  auto p = ag::default_policy();
  p.rules.pop_back();
  EXPECT_THROW(ag::validate_policy(p), std::invalid_argument);
  p = ag::default_policy();
  p.rules.back().emit.longitudinal[0] = 2.0;
  EXPECT_THROW(ag::validate_policy(p), std::invalid_argument);
  p = ag::default_policy();
  p.rules[1].name = p.rules[0].name;
  EXPECT_THROW(ag::validate_policy(p), std::invalid_argument);
  EXPECT_THROW(ag::validate_policy({}), std::invalid_argument);
}

TEST(RulePolicy, JsonRoundTripAndUnknownKeys)
{
  const auto p = ag::default_policy();
  const nlohmann::json j = p;
  const auto back = j.get<ag::RulePolicy>();
  ASSERT_EQ(back.rules.size(), p.rules.size());
  EXPECT_EQ(nlohmann::json(back), j);
  auto bad = j;
  bad["rules"][0]["match"]["colour"] = "red";
  EXPECT_THROW(bad.get<ag::RulePolicy>(), std::exception);
}

TEST(RuleContext, LeadGapAndCrowding)
{
  ag::RuleThresholds t;
  av::DetectionSet d;
  EXPECT_FALSE(ag::lead_gap(d, t));
  d.items.push_back({{30.0, 0.5, 1, 1}, sw::ActorClass::car, 0.9});
  d.items.push_back({{20.0, 3.0, 1, 1}, sw::ActorClass::car, 0.9});
  d.items.push_back({{-5.0, 0.0, 1, 1}, sw::ActorClass::car, 0.9});
  EXPECT_EQ(ag::lead_gap(d, t), 30.0);
  EXPECT_FALSE(ag::is_crowded(d, t));
  d.items.push_back({{10.0, 2.0, 1, 1}, sw::ActorClass::pedestrian, 0.9});
  d.items.push_back({{5.0, -2.0, 1, 1}, sw::ActorClass::pedestrian, 0.9});
  EXPECT_TRUE(ag::is_crowded(d, t));
}

TEST(RuleAgent, SixTripDecisionTable)
{
  const auto p = ag::default_policy();
  const ag::RuleEmit def;

  auto hw1 = state(av::MapLabel::highway, "The traffic is too slow", {"overtake", "yield", "following"});
  auto a = parse(ag::decide_rule(hw1, p));
  EXPECT_EQ(a.behavior, "overtake");

  auto hw2 = state(av::MapLabel::highway, "Drive safely", {"overtake", "yield", "following"});
  hw2.F.weather_hint = sw::WeatherKind::snow;
  a = parse(ag::decide_rule(hw2, p));
  EXPECT_EQ(a.behavior, "following");
  EXPECT_LT(a.longitudinal[0], def.longitudinal[0]);
  EXPECT_GT(a.lateral[2], def.lateral[2]);

  auto ix1 = state(av::MapLabel::intersection, "I need to catch a flight", {"yield", "following"});
  a = parse(ag::decide_rule(ix1, p));
  EXPECT_EQ(a.behavior, "following");
  EXPECT_GT(a.longitudinal[0], def.longitudinal[0]);

  auto ix2 = state(av::MapLabel::intersection, "Keep safe", {"yield", "following"});
  ix2.F.weather_hint = sw::WeatherKind::fog;
  a = parse(ag::decide_rule(ix2, p));
  EXPECT_EQ(a.behavior, "following");
  EXPECT_LT(a.longitudinal[0], def.longitudinal[0]);
  EXPECT_GT(a.lateral[2], def.lateral[2]);

  auto pk1 = state(av::MapLabel::parkinglot, "I am in a hurry", {"yield", "following"});
  for (int i = 0; i < 4; ++i) {
    add_detection(pk1, 5.0 + 2.0 * i, i % 2 == 0 ? 3.0 : -3.0);
  }
  const auto trip1 = parse(ag::decide_rule(pk1, p));
  EXPECT_EQ(trip1.behavior, "following");
  EXPECT_GT(trip1.lateral[0], def.lateral[0]);

  auto pk2 = state(av::MapLabel::parkinglot, "Leave the parking lot quickly", {"yield", "following"});
  add_detection(pk2, 20.0, 4.5);
  const auto trip2 = parse(ag::decide_rule(pk2, p));
  EXPECT_EQ(trip2.behavior, "following");
  EXPECT_LT(trip2.lateral[0], trip1.lateral[0]);
  EXPECT_GT(trip2.longitudinal[0], trip1.longitudinal[0]);
}

TEST(RuleAgent, OvertakeNeedsASafeOvertakePath)
{
  const auto p = ag::default_policy();
  auto vs = state(av::MapLabel::highway, "The traffic is too slow", {"overtake", "yield", "following"});
  vs.B.behaviors[0].safe = false;
  EXPECT_EQ(parse(ag::decide_rule(vs, p)).behavior, "following");
  vs = state(av::MapLabel::highway, "none", {"yield", "following"});
  EXPECT_EQ(p.rules[ag::matching_rule(vs, p)].name, "default");
}

TEST(RuleAgent, Deterministic)
{
  ag::RuleAgent agent;
  const auto vs = state(av::MapLabel::highway, "The traffic is too slow", {"overtake", "following"});
  const auto a = agent.decide(request(), vs);
  const auto b = agent.decide(request(), vs);
  EXPECT_EQ(a.text, b.text);
  EXPECT_EQ(a.outcome, ag::Outcome::ok);
  EXPECT_EQ(b.outcome, ag::Outcome::ok);
  EXPECT_EQ(agent.kind(), "rule");
}

TEST(Scripted, HoldsTheLastReply)
{
  const std::vector<std::string> s{"A", "B"};
  EXPECT_EQ(ag::decide_scripted(0, s).text, "A");
  EXPECT_EQ(ag::decide_scripted(5, s).text, "B");
  EXPECT_THROW(ag::decide_scripted(0, {}), std::invalid_argument);
  auto agent = ag::ScriptedAgent::from_texts(s);
  const ml::DrivingStateVector vs;
  EXPECT_EQ(agent.decide(request(), vs).text, "A");
  EXPECT_EQ(agent.decide(request(), vs).text, "B");
  EXPECT_EQ(agent.decide(request(), vs).text, "B");
  EXPECT_THROW(ag::ScriptedAgent({}), std::invalid_argument);
}

TEST(Scripted, LoadsBothFileForms)
{
  const std::string path = ::testing::TempDir() + "/script.json";
  {
    std::ofstream out(path);
    out << R"(["one", {"text": "", "outcome": "timeout"}, {"text": "three"}])";
  }
  const auto replies = ag::load_script(path);
  ASSERT_EQ(replies.size(), 3u);
  EXPECT_EQ(replies[0].text, "one");
  EXPECT_EQ(replies[1].outcome, ag::Outcome::timeout);
  EXPECT_EQ(replies[2].outcome, ag::Outcome::ok);
  {
    std::ofstream out(path);
    out << "[]";
  }
  EXPECT_THROW(ag::load_script(path), std::runtime_error);
  EXPECT_THROW(ag::load_script(path + ".missing"), std::runtime_error);
}

TEST(ChatSchema, BodiesAndExtraction)
{
  const auto body = ag::chat_request_body("hi", "m1");
  EXPECT_EQ(body["model"], "m1");
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "hi");
  EXPECT_EQ(ag::chat_response_text(R"({"choices":[{"message":{"role":"assistant","content":"x"}}]})"), "x");
  EXPECT_EQ(ag::chat_response_text(R"({"message":{"content":"y"}})"), "y");
  EXPECT_FALSE(ag::chat_response_text("not json"));
  EXPECT_FALSE(ag::chat_response_text(R"({"choices":[]})"));
}

TEST(RemoteConfig, JsonRules)
{
  auto c = nlohmann::json{{"endpoint", "http://x/y"}, {"deadline_ms", 300}}.get<ag::RemoteConfig>();
  EXPECT_EQ(c.deadline, 300ms);
  EXPECT_EQ(c.max_retries, 2);
  EXPECT_THROW((nlohmann::json{{"bogus", 1}}.get<ag::RemoteConfig>()), std::invalid_argument);
  EXPECT_THROW((nlohmann::json{{"deadline_ms", 0}}.get<ag::RemoteConfig>()), std::invalid_argument);
  EXPECT_THROW(ag::RemoteAgent(ag::RemoteConfig{}), std::invalid_argument);
}

TEST(Remote, EchoIsOk)
{
  MockVlmServer server([](std::size_t) { return MockResponse{200, kBlock}; });
  ::setenv("VLMTEST_TEST_TOKEN", "secret", 1);
  const auto r = ag::decide_remote(request(), remote(server.endpoint()));
  ::unsetenv("VLMTEST_TEST_TOKEN");
  EXPECT_EQ(r.outcome, ag::Outcome::ok);
  EXPECT_EQ(r.text, kBlock);
  EXPECT_GE(r.latency_wall_ms, 0.0);
  const auto reqs = server.requests();
  ASSERT_EQ(reqs.size(), 1u);
  EXPECT_EQ(reqs[0].path, "/v1/chat/completions");
  EXPECT_EQ(reqs[0].authorization, "Bearer secret");
  const auto sent = nlohmann::json::parse(reqs[0].body);
  EXPECT_EQ(sent["messages"][0]["content"], "hello");
}

TEST(Remote, SlowServerTimesOutWithoutRetry)
{
  MockVlmServer server([](std::size_t) { return MockResponse{200, kBlock, 800ms}; });
  const auto r = ag::decide_remote(request(250ms), remote(server.endpoint()));
  EXPECT_EQ(r.outcome, ag::Outcome::timeout);
  EXPECT_TRUE(r.text.empty());
  EXPECT_LT(r.latency_wall_ms, 700.0);
  EXPECT_EQ(server.request_count(), 1u);
}

TEST(Remote, UnreachableIsTransportErrorAfterRetries)
{
  const auto endpoint = "http://127.0.0.1:" + std::to_string(vlmtest::testing::unused_port()) + "/v1";
  const auto r = ag::decide_remote(request(), remote(endpoint, 2));
  EXPECT_EQ(r.outcome, ag::Outcome::transport_error);
  EXPECT_TRUE(r.text.empty());
}

TEST(Remote, ServerErrorsAreRetried)
{
  MockVlmServer server([](std::size_t n) { return n < 3 ? MockResponse{500, ""} : MockResponse{200, kBlock}; });
  const auto r = ag::decide_remote(request(), remote(server.endpoint(), 2));
  EXPECT_EQ(r.outcome, ag::Outcome::ok);
  EXPECT_EQ(server.request_count(), 3u);

  MockVlmServer always([](std::size_t) { return MockResponse{503, ""}; });
  const auto f = ag::decide_remote(request(), remote(always.endpoint(), 1));
  EXPECT_EQ(f.outcome, ag::Outcome::transport_error);
  EXPECT_EQ(always.request_count(), 2u);
}

TEST(Remote, EmptyAssistantTextIsMalformed)
{
  MockVlmServer server([](std::size_t) { return MockResponse{200, ""}; });
  const auto r = ag::decide_remote(request(), remote(server.endpoint()));
  EXPECT_EQ(r.outcome, ag::Outcome::malformed);
  EXPECT_EQ(server.request_count(), 1u);
  MockVlmServer junk([](std::size_t) { return MockResponse{200, "<html>", 0ms, true}; });
  EXPECT_EQ(ag::decide_remote(request(), remote(junk.endpoint())).outcome, ag::Outcome::malformed);
}

TEST(Remote, BadEndpointNeverThrows)
{
  EXPECT_EQ(ag::decide_remote(request(), remote("no-scheme")).outcome, ag::Outcome::transport_error);
}

TEST(Async, OneRequestInFlight)
{
  auto scripted = ag::ScriptedAgent::from_texts({"first", "second"});
  ag::AsyncAgent worker(scripted);
  EXPECT_FALSE(worker.pending());
  EXPECT_THROW(worker.collect(), std::logic_error);
  worker.submit(request(), {});
  EXPECT_TRUE(worker.pending());
  EXPECT_THROW(worker.submit(request(), {}), std::logic_error);
  EXPECT_EQ(worker.collect().text, "first");
  EXPECT_FALSE(worker.pending());
  worker.submit(request(), {});
  EXPECT_EQ(worker.collect().text, "second");
}

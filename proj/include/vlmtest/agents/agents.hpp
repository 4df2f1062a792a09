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

#include "vlmtest/interface/interface.hpp"
#include "vlmtest/midlayer/midlayer.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <future>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vlmtest::agents
{

enum class Outcome
{
  ok,
  timeout,
  transport_error,
  malformed
};

std::string_view to_string(Outcome o);
Outcome outcome_from_string(std::string_view s);

struct AgentRequest
{
  interface::Prompt prompt;
  std::chrono::milliseconds deadline{5000};
  std::uint64_t seq{0};
};

/// Throws std::invalid_argument for a non-positive deadline.
void validate_request(const AgentRequest & req);

struct AgentReply
{
  std::string text;
  double latency_wall_ms{0.0};
  Outcome outcome{Outcome::ok};

  bool operator==(const AgentReply &) const = default;
};

void to_json(nlohmann::json & j, const AgentReply & r);
void from_json(const nlohmann::json & j, AgentReply & r);

/// Common contract for every strategic agent. Implementations never throw
/// from decide(); failures are reported through the reply outcome.
class Agent
{
public:
  virtual ~Agent() = default;
  virtual std::string kind() const = 0;
  virtual AgentReply decide(const AgentRequest & req, const midlayer::DrivingStateVector & vs) = 0;
};

// ---------------------------------------------------------------------------
// Rule agent

struct RuleMatch
{
  std::optional<autonomy::MapLabel> map;
  std::vector<std::string> command_any;  // case-insensitive substrings, any may match
  std::optional<double> lead_gap_below;  // m, nearest detection in the ego lane
  std::vector<simworld::WeatherKind> weather_in;
  std::optional<bool> crowded;
  std::vector<std::string> behaviors_available;  // all must be safe members of B

  bool empty() const;
};

struct RuleEmit
{
  std::string behavior;
  std::array<double, 3> lateral{0.2, 0.35, 2.0};
  std::array<double, 3> longitudinal{1.1, 0.02, 0.01};
  std::string thought;
};

struct Rule
{
  std::string name;
  RuleMatch match;
  RuleEmit emit;
};

struct RuleThresholds
{
  double lane_half_width{1.75};  // m, lateral band that counts as the ego lane
  double crowded_radius{15.0};   // m
  std::size_t crowded_count{3};
};

struct RulePolicy
{
  std::vector<Rule> rules;
  RuleThresholds thresholds;
};

/// Throws std::invalid_argument unless the last rule matches everything and
/// emits "following" with the default parameters.
void validate_policy(const RulePolicy & policy);

/// Policy covering the bundled highway, intersection and parking-lot trips.
RulePolicy default_policy();

void to_json(nlohmann::json & j, const RulePolicy & p);
void from_json(const nlohmann::json & j, RulePolicy & p);

/// Distance to the nearest detection ahead within the ego lane, if any.
std::optional<double> lead_gap(const autonomy::DetectionSet & d, const RuleThresholds & t);
bool is_crowded(const autonomy::DetectionSet & d, const RuleThresholds & t);

/// First matching rule, rendered as canonical reply text.
AgentReply decide_rule(const midlayer::DrivingStateVector & vs, const RulePolicy & policy);
/// Index of the rule decide_rule would fire.
std::size_t matching_rule(const midlayer::DrivingStateVector & vs, const RulePolicy & policy);

class RuleAgent : public Agent
{
public:
  explicit RuleAgent(RulePolicy policy = default_policy());
  std::string kind() const override { return "rule"; }
  AgentReply decide(const AgentRequest & req, const midlayer::DrivingStateVector & vs) override;

private:
  RulePolicy policy_;
};

// ---------------------------------------------------------------------------
// Scripted agent

/// script[min(step, len - 1)]. Throws std::invalid_argument on an empty script.
AgentReply decide_scripted(std::size_t step, const std::vector<std::string> & script);

/// Plays back replies in order, holding the last one. The request seq is
/// ignored; each decide() call advances the cursor.
class ScriptedAgent : public Agent
{
public:
  explicit ScriptedAgent(std::vector<AgentReply> replies);
  static ScriptedAgent from_texts(const std::vector<std::string> & texts);
  std::string kind() const override { return "scripted"; }
  AgentReply decide(const AgentRequest & req, const midlayer::DrivingStateVector & vs) override;

private:
  std::vector<AgentReply> replies_;
  std::size_t step_{0};
};

/// Script file: JSON array of reply texts, or of {"text", "outcome"} objects.
std::vector<AgentReply> load_script(const std::string & path);

// ---------------------------------------------------------------------------
// Remote agent

struct RemoteConfig
{
  std::string endpoint;  // e.g. http://127.0.0.1:8080/v1/chat/completions
  std::string model{"gpt-4o"};
  std::string token_env{"VLMTEST_API_TOKEN"};
  int max_retries{2};
  std::chrono::milliseconds deadline{5000};
};

void to_json(nlohmann::json & j, const RemoteConfig & c);
void from_json(const nlohmann::json & j, RemoteConfig & c);

/// One chat-completions exchange. Timeouts are reported at once; transport
/// errors and non-200 statuses are re-sent up to max_retries times within the
/// deadline.
AgentReply decide_remote(const AgentRequest & req, const RemoteConfig & cfg);

/// Request body sent to the endpoint.
nlohmann::json chat_request_body(const std::string & prompt, const std::string & model);
/// Assistant text from a response body, or nullopt when it has none.
std::optional<std::string> chat_response_text(const std::string & body);

class RemoteAgent : public Agent
{
public:
  explicit RemoteAgent(RemoteConfig cfg);
  std::string kind() const override { return "remote"; }
  AgentReply decide(const AgentRequest & req, const midlayer::DrivingStateVector & vs) override;
  const RemoteConfig & config() const { return cfg_; }

private:
  RemoteConfig cfg_;
};

// ---------------------------------------------------------------------------

/// Runs one decide() at a time on a worker thread.
class AsyncAgent
{
public:
  explicit AsyncAgent(Agent & agent);
  ~AsyncAgent();
  AsyncAgent(const AsyncAgent &) = delete;
  AsyncAgent & operator=(const AsyncAgent &) = delete;

  /// Throws std::logic_error when a request is still in flight.
  void submit(AgentRequest req, midlayer::DrivingStateVector vs);
  bool pending() const { return future_.valid(); }
  /// Blocks until the in-flight reply is ready and returns it.
  AgentReply collect();

private:
  Agent & agent_;
  std::future<AgentReply> future_;
};

}  // namespace vlmtest::agents

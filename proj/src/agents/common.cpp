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

#include "vlmtest/agents/agents.hpp"

#include <fstream>
#include <stdexcept>

namespace vlmtest::agents
{

std::string_view to_string(Outcome o)
{
  switch (o) {
    case Outcome::ok:
      return "ok";
    case Outcome::timeout:
      return "timeout";
    case Outcome::transport_error:
      return "transport_error";
    case Outcome::malformed:
      return "malformed";
  }
  return "ok";
}

Outcome outcome_from_string(std::string_view s)
{
  for (auto o : {Outcome::ok, Outcome::timeout, Outcome::transport_error, Outcome::malformed}) {
    if (to_string(o) == s) {
      return o;
    }
  }
  throw std::invalid_argument("unknown agent outcome: " + std::string(s));
}

void validate_request(const AgentRequest & req)
{
  if (req.deadline.count() <= 0) {
    throw std::invalid_argument("agent request deadline must be positive");
  }
}

void to_json(nlohmann::json & j, const AgentReply & r)
{
  j = nlohmann::json{
    {"text", r.text}, {"latency_wall", r.latency_wall_ms}, {"outcome", std::string(to_string(r.outcome))}};
}

void from_json(const nlohmann::json & j, AgentReply & r)
{
  r.text = j.at("text").get<std::string>();
  r.latency_wall_ms = j.value("latency_wall", 0.0);
  r.outcome = outcome_from_string(j.at("outcome").get<std::string>());
}

// ---------------------------------------------------------------------------

AgentReply decide_scripted(std::size_t step, const std::vector<std::string> & script)
{
  if (script.empty()) {
    throw std::invalid_argument("scripted agent: empty script");
  }
  const auto & text = script[std::min(step, script.size() - 1)];
  return AgentReply{text, 0.0, text.empty() ? Outcome::malformed : Outcome::ok};
}

ScriptedAgent::ScriptedAgent(std::vector<AgentReply> replies) : replies_(std::move(replies))
{
  if (replies_.empty()) {
    throw std::invalid_argument("scripted agent: empty script");
  }
}

ScriptedAgent ScriptedAgent::from_texts(const std::vector<std::string> & texts)
{
  std::vector<AgentReply> replies;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    replies.push_back(decide_scripted(i, texts));
  }
  return ScriptedAgent(std::move(replies));
}

AgentReply ScriptedAgent::decide(const AgentRequest &, const midlayer::DrivingStateVector &)
{
  auto reply = replies_[std::min(step_, replies_.size() - 1)];
  ++step_;
  reply.latency_wall_ms = 0.0;
  return reply;
}

std::vector<AgentReply> load_script(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open agent script: " + path);
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error & e) {
    throw std::runtime_error("agent script " + path + ": " + e.what());
  }
  if (!doc.is_array()) {
    throw std::runtime_error("agent script " + path + ": expected an array");
  }
  std::vector<AgentReply> out;
  for (const auto & item : doc) {
    if (item.is_string()) {
      const auto text = item.get<std::string>();
      out.push_back({text, 0.0, text.empty() ? Outcome::malformed : Outcome::ok});
    } else {
      out.push_back({item.at("text").get<std::string>(), 0.0,
                     outcome_from_string(item.value("outcome", std::string("ok")))});
    }
  }
  if (out.empty()) {
    throw std::runtime_error("agent script " + path + ": empty script");
  }
  return out;
}

// ---------------------------------------------------------------------------

AsyncAgent::AsyncAgent(Agent & agent) : agent_(agent) {}

AsyncAgent::~AsyncAgent()
{
  if (future_.valid()) {
    future_.wait();
  }
}

void AsyncAgent::submit(AgentRequest req, midlayer::DrivingStateVector vs)
{
  if (future_.valid()) {
    throw std::logic_error("agent request already in flight");
  }
  future_ = std::async(std::launch::async, [this, req = std::move(req), vs = std::move(vs)] {
    return agent_.decide(req, vs);
  });
}

AgentReply AsyncAgent::collect()
{
  if (!future_.valid()) {
    throw std::logic_error("no agent request in flight");
  }
  return future_.get();
}

}  // namespace vlmtest::agents

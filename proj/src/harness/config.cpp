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

#include "vlmtest/harness/harness.hpp"

#include <filesystem>
#include <fstream>

namespace vlmtest::harness
{

using nlohmann::json;

namespace
{
void reject_unknown(const json & j, std::initializer_list<std::string_view> allowed, const std::string & where)
{
  if (!j.is_object()) {
    throw std::invalid_argument(where + ": expected an object");
  }
  for (const auto & [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw std::invalid_argument(where + ": unknown field '" + key + "'");
    }
  }
}

std::string resolve(const std::string & base, const std::string & p)
{
  std::filesystem::path path(p);
  return path.is_relative() ? (std::filesystem::path(base) / path).string() : p;
}
}  // namespace

HarnessConfig parse_config(const json & doc, const std::string & base_dir)
{
  reject_unknown(doc, {"safety_ranges", "clearance", "mpc", "remote", "agent_mode", "prompt_template", "rule_policy"}, "config");
  HarnessConfig c;
  if (doc.contains("safety_ranges")) {
    c.ranges = doc.at("safety_ranges").get<midlayer::SafetyRanges>();
    midlayer::validate_ranges(c.ranges);
  }
  if (doc.contains("clearance")) {
    const auto & j = doc.at("clearance");
    reject_unknown(j, {"safety_radius", "lookahead"}, "config.clearance");
    c.clearance.safety_radius = j.value("safety_radius", c.clearance.safety_radius);
    c.clearance.lookahead = j.value("lookahead", c.clearance.lookahead);
  }
  if (doc.contains("mpc")) {
    const auto & j = doc.at("mpc");
    reject_unknown(j, {"w_lat", "w_head", "c_speed", "horizon", "dt", "p_terminal"}, "config.mpc");
    c.mpc_base.w_lat = j.value("w_lat", c.mpc_base.w_lat);
    c.mpc_base.w_head = j.value("w_head", c.mpc_base.w_head);
    c.mpc_base.c_speed = j.value("c_speed", c.mpc_base.c_speed);
    c.mpc_base.horizon = j.value("horizon", c.mpc_base.horizon);
    c.mpc_base.dt = j.value("dt", c.mpc_base.dt);
    c.mpc_base.p_terminal = j.value("p_terminal", c.mpc_base.p_terminal);
  }
  if (doc.contains("remote")) {
    c.remote = doc.at("remote").get<agents::RemoteConfig>();
  }
  if (doc.contains("agent_mode")) {
    const auto m = doc.at("agent_mode").get<std::string>();
    if (m == "sync") {
      c.agent_mode = AgentMode::sync;
    } else if (m == "async") {
      c.agent_mode = AgentMode::async;
    } else if (m == "auto") {
      c.agent_mode = AgentMode::automatic;
    } else {
      throw std::invalid_argument("config.agent_mode: expected sync, async or auto");
    }
  }
  if (doc.contains("prompt_template")) {
    c.prompt_template = interface::load_template(resolve(base_dir, doc.at("prompt_template").get<std::string>()));
  }
  if (doc.contains("rule_policy")) {
    const auto path = resolve(base_dir, doc.at("rule_policy").get<std::string>());
    std::ifstream in(path);
    if (!in) {
      throw std::runtime_error("cannot open rule policy: " + path);
    }
    c.rule_policy = json::parse(in).get<agents::RulePolicy>();
  }
  return c;
}

HarnessConfig load_config(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config: " + path);
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error & e) {
    throw std::runtime_error("config " + path + ": " + e.what());
  }
  return parse_config(doc, std::filesystem::path(path).parent_path().string());
}

}  // namespace vlmtest::harness

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

#include "vlmtest/runtime/log_records.hpp"

namespace vlmtest::harness
{

std::string first_difference(const RunLog & a, const RunLog & b)
{
  if (a.decisions.size() != b.decisions.size()) {
    return "decision count " + std::to_string(a.decisions.size()) + " vs " + std::to_string(b.decisions.size());
  }
  for (std::size_t i = 0; i < a.decisions.size(); ++i) {
    const auto ja = runtime::strip_wall_clock(to_json_value(a.decisions[i]));
    const auto jb = runtime::strip_wall_clock(to_json_value(b.decisions[i]));
    if (ja != jb) {
      return "decision " + std::to_string(i) + " differs: " + ja.dump() + " vs " + jb.dump();
    }
  }
  if (a.envelopes.size() != b.envelopes.size()) {
    return "envelope count " + std::to_string(a.envelopes.size()) + " vs " + std::to_string(b.envelopes.size());
  }
  for (std::size_t i = 0; i < a.envelopes.size(); ++i) {
    const auto ja = runtime::strip_wall_clock(runtime::to_record(a.envelopes[i]));
    const auto jb = runtime::strip_wall_clock(runtime::to_record(b.envelopes[i]));
    if (ja != jb) {
      return "envelope " + std::to_string(i) + " on " + a.envelopes[i].header.topic + " differs";
    }
  }
  return {};
}

ReplayResult replay(const RunLog & original, const RunOptions & options)
{
  ReplayResult out{original, {}, load_scenario(original.meta.scenario_path)};
  std::vector<agents::AgentReply> replies;
  for (const auto & d : original.decisions) {
    replies.push_back(d.reply);
  }
  if (replies.empty()) {
    replies.push_back({"", 0.0, agents::Outcome::malformed});  // never consulted
  }
  agents::ScriptedAgent agent(std::move(replies));

  RunOptions opt = options;
  opt.seed = original.meta.seed;
  opt.cadence = original.meta.cadence;
  opt.duration = original.meta.duration;
  opt.config.agent_mode = original.meta.agent_mode == "async" ? AgentMode::async : AgentMode::sync;
  out.replayed = run(out.spec, agent, opt);

  const auto diff = first_difference(original, out.replayed);
  if (!diff.empty()) {
    throw ReplayMismatch("replay diverged from the log: " + diff);
  }
  return out;
}

ReplayResult replay(const std::string & log_path, const RunOptions & options)
{
  return replay(read_run_log(log_path), options);
}

}  // namespace vlmtest::harness

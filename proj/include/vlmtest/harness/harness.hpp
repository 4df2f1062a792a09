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

#include "vlmtest/agents/agents.hpp"
#include "vlmtest/harness/scenario.hpp"
#include "vlmtest/interface/interface.hpp"
#include "vlmtest/midlayer/midlayer.hpp"
#include "vlmtest/runtime/bus.hpp"
#include "vlmtest/runtime/metrics.hpp"
#include "vlmtest/simworld/world.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <chrono>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace vlmtest::harness
{

/// Report rows, in order.
inline constexpr std::array<std::string_view, 8> kModuleNames{
  "Prompt Generation Interface",
  "Action Interface",
  "Speech Command Processor",
  "Vision Perception Aggregator",
  "Localization State Adapter",
  "Planning & Navigation Acquisition",
  "Driving Behavior Selection",
  "Motion Control Refinement"};

enum class AgentMode
{
  sync,   // the reply is applied in the tick that asked for it
  async,  // the reply is applied at the next agent tick
  automatic
};

struct HarnessConfig
{
  midlayer::SafetyRanges ranges;
  midlayer::ClearanceConfig clearance;
  autonomy::MpcWeights mpc_base;
  autonomy::TrackerParams tracker;
  simworld::SensorConfig sensor;
  interface::PromptTemplate prompt_template = interface::default_template();
  agents::RulePolicy rule_policy = agents::default_policy();
  agents::RemoteConfig remote;
  AgentMode agent_mode{AgentMode::automatic};
};

/// JSON config; every field optional, unknown fields rejected. Paths inside
/// (prompt_template, rule_policy) resolve against the file's directory.
HarnessConfig load_config(const std::string & path);
HarnessConfig parse_config(const nlohmann::json & doc, const std::string & base_dir);

struct RunOptions
{
  std::optional<std::uint64_t> seed;
  std::optional<double> cadence;
  std::optional<double> duration;
  HarnessConfig config;
};

struct Decision
{
  double t_virtual{0.0};
  std::uint64_t cycle{0};
  agents::AgentReply reply;
  std::optional<midlayer::ActionVector> action;
  std::string parse_error;
  bool applied{false};
  std::string behavior;  // active behavior after this decision
  autonomy::PidGains gains;
  autonomy::MpcWeights weights;
  std::vector<std::string> clamped;
};

/// Outcome of one independent output check of a module.
struct Check
{
  std::string module;
  double t_virtual{0.0};
  bool ok{true};
  std::string detail;
};

struct TracePoint
{
  double t{0.0};
  double x{0.0};
  double y{0.0};
  double psi{0.0};
  double v{0.0};
  double v_ref{0.0};
  double e_lat{0.0};  // true pose against the active path
  double steer{0.0};
  double accel{0.0};
  std::string behavior;
};

struct RunMeta
{
  std::string scenario;
  std::string scenario_path;
  std::uint64_t seed{0};
  std::string agent;
  std::string agent_mode;
  double cadence{0.0};
  double duration{0.0};
};

struct RunLog
{
  RunMeta meta;
  std::vector<runtime::EnvelopeRecord> envelopes;
  std::vector<runtime::LatencySample> latency;
  std::vector<runtime::ResourceSample> resources;
  std::vector<midlayer::Violation> violations;
  std::vector<Decision> decisions;
  std::vector<Check> checks;
  std::vector<TracePoint> trace;
  std::uint64_t agent_queries{0};
};

/// Closed loop over integer ticks: dynamics every tick, mid-layer every tenth,
/// agent every cadence. Agent failures and rejected actions keep the previous
/// plan in force.
RunLog run(const ScenarioSpec & spec, agents::Agent & agent, const RunOptions & options = {});

/// Builds the agent named on the command line: "rule", "remote" or
/// "scripted:<file>".
std::unique_ptr<agents::Agent> make_agent(const std::string & choice, const HarnessConfig & config);

// ---------------------------------------------------------------------------
// Run log files (one JSON record per line, header first, footer last)

class LogError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

void write_run_log(const RunLog & log, std::ostream & out);
void write_run_log(const RunLog & log, const std::string & path);
/// Throws LogError on malformed, truncated or unknown records.
RunLog read_run_log(std::istream & in);
RunLog read_run_log(const std::string & path);

/// Log lines with host measurements removed; equal for equal seeds.
std::vector<std::string> stripped_lines(const RunLog & log);

nlohmann::json to_json_value(const Decision & d);
Decision decision_from_json(const nlohmann::json & j);

// ---------------------------------------------------------------------------
// Metrics and reports

struct ModuleRow
{
  std::string module;
  runtime::LatencyStats latency;
  std::optional<double> accuracy;  // percent; empty when nothing was checked
  std::size_t checked{0};
  std::size_t correct{0};
  runtime::ResourceSample resources;
};

struct MetricsReport
{
  RunMeta meta;
  std::vector<ModuleRow> rows;
  std::size_t decisions{0};
  std::size_t violations{0};
};

/// Latency statistics, accuracy and resource shares per module. Accuracy
/// counts the run's own checks, the scenario's expected windows and, when a
/// reference decision list is given, decision-by-decision equality with it.
/// Throws std::invalid_argument on an empty log.
MetricsReport compute_metrics(
  const RunLog & log, const ScenarioSpec * spec,
  const std::vector<Decision> * reference = nullptr);

enum class ReportFormat
{
  table,
  csv
};

std::string emit_report(const MetricsReport & report, ReportFormat format);
/// Throws std::runtime_error when the destination cannot be written.
void write_report(const MetricsReport & report, ReportFormat format, const std::string & path);

// ---------------------------------------------------------------------------
// Replay

class ReplayMismatch : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct ReplayResult
{
  RunLog original;
  RunLog replayed;
  ScenarioSpec spec;
};

/// Compares two runs: decisions and host-independent envelope content.
/// Returns an empty string when they agree, else the first difference.
std::string first_difference(const RunLog & a, const RunLog & b);

/// Re-runs the logged scenario and seed with a scripted agent that plays back
/// the logged replies. Throws ReplayMismatch when the runs diverge.
ReplayResult replay(const RunLog & original, const RunOptions & options = {});
ReplayResult replay(const std::string & log_path, const RunOptions & options = {});

}  // namespace vlmtest::harness

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

#include <fstream>

namespace vlmtest::harness
{

using nlohmann::json;

namespace
{
constexpr int kLogSchema = 1;

json gains_json(const autonomy::PidGains & g) { return json{{"Kp", g.kp}, {"Ki", g.ki}, {"Kd", g.kd}}; }

json weights_json(const autonomy::MpcWeights & w)
{
  return json{
    {"w_lat", w.w_lat}, {"w_head", w.w_head}, {"c_speed", w.c_speed},
    {"horizon", w.horizon}, {"dt", w.dt}, {"p_terminal", w.p_terminal}};
}

json header_record(const RunMeta & m, std::uint64_t queries)
{
  return json{
    {"kind", "header"}, {"schema", kLogSchema}, {"scenario", m.scenario},
    {"scenario_path", m.scenario_path}, {"seed", m.seed}, {"agent", m.agent},
    {"agent_mode", m.agent_mode}, {"cadence", m.cadence}, {"duration", m.duration},
    {"agent_queries", queries}};
}

std::vector<json> records(const RunLog & log)
{
  std::vector<json> out;
  out.reserve(log.envelopes.size() + log.latency.size() + log.checks.size() + log.trace.size() + 16);
  out.push_back(header_record(log.meta, log.agent_queries));
  for (const auto & e : log.envelopes) {
    out.push_back(runtime::to_record(e));
  }
  for (const auto & s : log.latency) {
    out.push_back(runtime::to_record(s));
  }
  for (const auto & r : log.resources) {
    out.push_back(runtime::to_record(r));
  }
  for (const auto & v : log.violations) {
    json j = v;
    j["kind"] = "violation";
    out.push_back(std::move(j));
  }
  for (const auto & d : log.decisions) {
    json j = to_json_value(d);
    j["kind"] = "decision";
    out.push_back(std::move(j));
  }
  for (const auto & c : log.checks) {
    out.push_back(json{{"kind", "check"}, {"module", c.module}, {"t_virtual", c.t_virtual}, {"ok", c.ok}, {"detail", c.detail}});
  }
  for (const auto & p : log.trace) {
    out.push_back(json{
      {"kind", "trace"}, {"t", p.t}, {"x", p.x}, {"y", p.y}, {"psi", p.psi}, {"v", p.v},
      {"v_ref", p.v_ref}, {"e_lat", p.e_lat}, {"steer", p.steer}, {"accel", p.accel},
      {"behavior", p.behavior}});
  }
  out.push_back(json{{"kind", "end"}, {"records", out.size() - 1}});
  return out;
}
}  // namespace

json to_json_value(const Decision & d)
{
  json j{
    {"t_virtual", d.t_virtual}, {"cycle", d.cycle}, {"reply", d.reply},
    {"applied", d.applied}, {"behavior", d.behavior}, {"gains", gains_json(d.gains)},
    {"weights", weights_json(d.weights)}, {"clamped", d.clamped}, {"parse_error", d.parse_error}};
  j["action"] = d.action ? json(*d.action) : json(nullptr);
  return j;
}

Decision decision_from_json(const json & j)
{
  Decision d;
  d.t_virtual = j.at("t_virtual").get<double>();
  d.cycle = j.at("cycle").get<std::uint64_t>();
  d.reply = j.at("reply").get<agents::AgentReply>();
  d.applied = j.at("applied").get<bool>();
  d.behavior = j.at("behavior").get<std::string>();
  const auto & g = j.at("gains");
  d.gains = autonomy::PidGains{g.at("Kp").get<double>(), g.at("Ki").get<double>(), g.at("Kd").get<double>()};
  const auto & w = j.at("weights");
  d.weights.w_lat = w.at("w_lat").get<double>();
  d.weights.w_head = w.at("w_head").get<double>();
  d.weights.c_speed = w.at("c_speed").get<double>();
  d.weights.horizon = w.at("horizon").get<int>();
  d.weights.dt = w.at("dt").get<double>();
  d.weights.p_terminal = w.at("p_terminal").get<double>();
  d.clamped = j.at("clamped").get<std::vector<std::string>>();
  d.parse_error = j.at("parse_error").get<std::string>();
  if (!j.at("action").is_null()) {
    d.action = j.at("action").get<midlayer::ActionVector>();
  }
  return d;
}

void write_run_log(const RunLog & log, std::ostream & out)
{
  for (const auto & r : records(log)) {
    out << r.dump() << '\n';
  }
}

void write_run_log(const RunLog & log, const std::string & path)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write run log: " + path);
  }
  write_run_log(log, out);
  if (!out) {
    throw std::runtime_error("error writing run log: " + path);
  }
}

RunLog read_run_log(std::istream & in)
{
  RunLog log;
  std::string line;
  std::size_t lineno = 0;
  std::size_t count = 0;
  bool have_header = false;
  bool have_end = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    if (have_end) {
      throw LogError("run log line " + std::to_string(lineno) + ": record after the end marker");
    }
    const json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object() || !rec.contains("kind")) {
      throw LogError("run log line " + std::to_string(lineno) + ": not a log record");
    }
    try {
      const auto kind = rec.at("kind").get<std::string>();
      if (!have_header) {
        if (kind != "header" || rec.at("schema").get<int>() != kLogSchema) {
          throw LogError("run log: missing or unsupported header");
        }
        log.meta.scenario = rec.at("scenario").get<std::string>();
        log.meta.scenario_path = rec.at("scenario_path").get<std::string>();
        log.meta.seed = rec.at("seed").get<std::uint64_t>();
        log.meta.agent = rec.at("agent").get<std::string>();
        log.meta.agent_mode = rec.at("agent_mode").get<std::string>();
        log.meta.cadence = rec.at("cadence").get<double>();
        log.meta.duration = rec.at("duration").get<double>();
        log.agent_queries = rec.at("agent_queries").get<std::uint64_t>();
        have_header = true;
        continue;
      }
      if (kind == "end") {
        if (rec.at("records").get<std::size_t>() != count) {
          throw LogError("run log: record count differs from the end marker");
        }
        have_end = true;
        continue;
      }
      ++count;
      if (kind == "envelope") {
        log.envelopes.push_back(runtime::envelope_from_record(rec));
      } else if (kind == "latency") {
        log.latency.push_back(runtime::latency_from_record(rec));
      } else if (kind == "resource") {
        log.resources.push_back(runtime::resource_from_record(rec));
      } else if (kind == "violation") {
        log.violations.push_back(rec.get<midlayer::Violation>());
      } else if (kind == "decision") {
        log.decisions.push_back(decision_from_json(rec));
      } else if (kind == "check") {
        log.checks.push_back(Check{
          rec.at("module").get<std::string>(), rec.at("t_virtual").get<double>(),
          rec.at("ok").get<bool>(), rec.at("detail").get<std::string>()});
      } else if (kind == "trace") {
        log.trace.push_back(TracePoint{
          rec.at("t").get<double>(), rec.at("x").get<double>(), rec.at("y").get<double>(),
          rec.at("psi").get<double>(), rec.at("v").get<double>(), rec.at("v_ref").get<double>(),
          rec.at("e_lat").get<double>(), rec.at("steer").get<double>(), rec.at("accel").get<double>(),
          rec.at("behavior").get<std::string>()});
      } else {
        throw LogError("run log line " + std::to_string(lineno) + ": unknown record kind '" + kind + "'");
      }
    } catch (const LogError &) {
      throw;
    } catch (const std::exception & e) {
      throw LogError("run log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) {
    throw LogError("run log: empty");
  }
  if (!have_end) {
    throw LogError("run log: truncated (no end marker)");
  }
  return log;
}

RunLog read_run_log(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw LogError("cannot open run log: " + path);
  }
  return read_run_log(in);
}

std::vector<std::string> stripped_lines(const RunLog & log)
{
  std::vector<std::string> out;
  for (const auto & r : records(log)) {
    out.push_back(runtime::strip_wall_clock(r).dump());
  }
  return out;
}

}  // namespace vlmtest::harness

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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

namespace vlmtest::harness
{

namespace
{
struct Tally
{
  std::size_t checked{0};
  std::size_t correct{0};

  void add(bool ok)
  {
    ++checked;
    correct += ok ? 1 : 0;
  }
};

double param_value(const Decision & d, std::string_view name)
{
  if (name == "w_lat") return d.weights.w_lat;
  if (name == "w_head") return d.weights.w_head;
  if (name == "c_speed") return d.weights.c_speed;
  if (name == "Kp") return d.gains.kp;
  if (name == "Ki") return d.gains.ki;
  return d.gains.kd;
}

bool same_params(const Decision & a, const Decision & b)
{
  return a.gains.kp == b.gains.kp && a.gains.ki == b.gains.ki && a.gains.kd == b.gains.kd &&
         a.weights.w_lat == b.weights.w_lat && a.weights.w_head == b.weights.w_head &&
         a.weights.c_speed == b.weights.c_speed;
}

std::string fmt(const char * spec, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}
}  // namespace

MetricsReport compute_metrics(const RunLog & log, const ScenarioSpec * spec, const std::vector<Decision> * reference)
{
  if (log.envelopes.empty() && log.latency.empty() && log.decisions.empty()) {
    throw std::invalid_argument("compute_metrics: empty run log");
  }
  std::map<std::string, Tally, std::less<>> tally;
  for (const auto & c : log.checks) {
    tally[c.module].add(c.ok);
  }
  const auto & selection = kModuleNames[6];
  const auto & refinement = kModuleNames[7];
  const auto & action = kModuleNames[1];
  if (spec != nullptr) {
    for (const auto & e : spec->expected) {
      for (const auto & d : log.decisions) {
        if (!d.applied || d.t_virtual < e.t0 - 1e-9 || d.t_virtual > e.t1 + 1e-9) {
          continue;
        }
        if (!e.behavior.empty()) {
          tally[std::string(selection)].add(d.behavior == e.behavior);
        }
        for (const auto & p : e.params) {
          const double v = param_value(d, p.name);
          tally[std::string(refinement)].add(p.cmp == ParamExpectation::Cmp::lt ? v < p.value : v > p.value);
        }
      }
    }
  }
  if (reference != nullptr) {
    const std::size_t n = std::max(reference->size(), log.decisions.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= reference->size() || i >= log.decisions.size()) {
        tally[std::string(action)].add(false);
        tally[std::string(selection)].add(false);
        tally[std::string(refinement)].add(false);
        continue;
      }
      const auto & got = log.decisions[i];
      const auto & want = (*reference)[i];
      tally[std::string(action)].add(got.action == want.action && got.parse_error == want.parse_error);
      tally[std::string(selection)].add(got.behavior == want.behavior && got.applied == want.applied);
      tally[std::string(refinement)].add(same_params(got, want));
    }
  }

  MetricsReport r;
  r.meta = log.meta;
  r.decisions = log.decisions.size();
  r.violations = log.violations.size();
  for (auto name : kModuleNames) {
    ModuleRow row;
    row.module = std::string(name);
    const bool sampled = std::any_of(log.latency.begin(), log.latency.end(), [&](const auto & s) { return s.module == name; });
    if (sampled) {
      row.latency = runtime::latency_stats(log.latency, name);
    }
    if (auto it = tally.find(name); it != tally.end() && it->second.checked > 0) {
      row.checked = it->second.checked;
      row.correct = it->second.correct;
      row.accuracy = 100.0 * static_cast<double>(row.correct) / static_cast<double>(row.checked);
    }
    row.resources.module = row.module;
    for (const auto & s : log.resources) {
      if (s.module == name) {
        row.resources = s;
      }
    }
    r.rows.push_back(std::move(row));
  }
  return r;
}

std::string emit_report(const MetricsReport & report, ReportFormat format)
{
  std::string out;
  if (format == ReportFormat::csv) {
    out = "module,avg_latency_ms,std_latency_ms,max_latency_ms,cpu_pct,mem_pct,gpu_pct,accuracy_pct\n";
    for (const auto & row : report.rows) {
      out += "\"" + row.module + "\"," + fmt("%.4f", row.latency.avg) + "," + fmt("%.4f", row.latency.std) +
             "," + fmt("%.4f", row.latency.max) + "," + fmt("%.4f", row.resources.R_cpu) + "," +
             fmt("%.6f", row.resources.R_mem) + "," + fmt("%.2f", row.resources.R_gpu) + "," +
             (row.accuracy ? fmt("%.2f", *row.accuracy) : std::string{}) + "\n";
    }
    return out;
  }

  const std::vector<std::string> head{
    "Module", "Average Latency (ms)", "Latency Standard Deviation (ms)", "Max Latency (ms)",
    "CPU (%)", "Memory (%)", "GPU (%)", "Accuracy (%)"};
  std::vector<std::vector<std::string>> cells;
  for (const auto & row : report.rows) {
    cells.push_back({
      row.module, fmt("%.4f", row.latency.avg), fmt("%.4f", row.latency.std), fmt("%.4f", row.latency.max),
      fmt("%.2f", row.resources.R_cpu), fmt("%.4f", row.resources.R_mem), fmt("%.2f", row.resources.R_gpu),
      row.accuracy ? fmt("%.2f", *row.accuracy) : std::string("n/a")});
  }
  std::vector<std::size_t> width(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) {
    width[c] = head[c].size();
    for (const auto & r : cells) {
      width[c] = std::max(width[c], r[c].size());
    }
  }
  auto line = [&](const std::vector<std::string> & r) {
    std::string s = "|";
    for (std::size_t c = 0; c < r.size(); ++c) {
      s += ' ' + r[c] + std::string(width[c] - r[c].size(), ' ') + " |";
    }
    return s + "\n";
  };
  out += "Scenario: " + report.meta.scenario + "  seed: " + std::to_string(report.meta.seed) +
         "  agent: " + report.meta.agent + "\n";
  out += "Decisions: " + std::to_string(report.decisions) + "  violations: " + std::to_string(report.violations) + "\n";
  out += "Latency standard deviation is the population form.\n\n";
  out += line(head);
  std::string rule = "|";
  for (auto w : width) {
    rule += std::string(w + 2, '-') + "|";
  }
  out += rule + "\n";
  for (const auto & r : cells) {
    out += line(r);
  }
  out += "\nSpeech Command Processor accuracy covers command latching only; no audio is processed.\n";
  return out;
}

void write_report(const MetricsReport & report, ReportFormat format, const std::string & path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write report: " + path);
  }
  out << emit_report(report, format);
  if (!out) {
    throw std::runtime_error("error writing report: " + path);
  }
}

}  // namespace vlmtest::harness

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

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace h = vlmtest::harness;

namespace
{

constexpr int kOk = 0;
constexpr int kScenarioError = 1;
constexpr int kMismatch = 2;

h::HarnessConfig config_from(const std::string & path)
{
  return path.empty() ? h::HarnessConfig{} : h::load_config(path);
}

bool all_correct(const h::MetricsReport & r)
{
  for (const auto & row : r.rows) {
    if (row.correct != row.checked) {
      return false;
    }
  }
  return true;
}

void save_script(const h::RunLog & log, const std::string & path)
{
  nlohmann::json arr = nlohmann::json::array();
  for (const auto & d : log.decisions) {
    arr.push_back({{"text", d.reply.text}, {"outcome", std::string(vlmtest::agents::to_string(d.reply.outcome))}});
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write script: " + path);
  }
  out << arr.dump(2) << '\n';
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Closed-loop scenario harness for language-model driving agents"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Harness configuration (JSON)")->check(CLI::ExistingFile);

  auto * run = app.add_subcommand("run", "Run a scenario and write its log and report");
  std::string scenario_path;
  std::string agent_choice = "rule";
  std::optional<std::uint64_t> seed;
  std::optional<double> cadence;
  std::optional<double> duration;
  std::string out_dir = "out";
  std::string script_out;
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--agent", agent_choice, "rule | remote | scripted:<file>");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--cadence", cadence, "Override the agent cadence (s)");
  run->add_option("--duration", duration, "Override the duration (s)");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--save-script", script_out, "Write the agent replies as a replay script");

  auto * validate = app.add_subcommand("validate", "Check a scenario file");
  std::string validate_path;
  validate->add_option("scenario", validate_path, "Scenario file")->required();

  auto * report = app.add_subcommand("report", "Summarize a run log");
  std::string log_path;
  std::string format = "table";
  std::string report_out;
  report->add_option("runlog", log_path, "Run log")->required();
  report->add_option("--format", format, "table | csv")->check(CLI::IsMember({"table", "csv"}));
  report->add_option("--out", report_out, "Write to a file instead of stdout");

  auto * replay = app.add_subcommand("replay", "Re-run a logged scenario and compare");
  std::string replay_path;
  replay->add_option("runlog", replay_path, "Run log")->required();

  auto * tmpl = app.add_subcommand("template", "Print the prompt template in use");
  std::string template_out;
  tmpl->add_option("--out", template_out, "Write to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const auto spec = h::load_scenario(validate_path);
      std::cout << spec.name << ": ok (" << vlmtest::autonomy::to_string(spec.map_label) << ", "
                << spec.duration << " s, " << spec.actors.size() << " actors, " << spec.commands.size()
                << " commands)\n";
      return kOk;
    }

    if (*run) {
      const auto spec = h::load_scenario(scenario_path);
      h::RunOptions opt;
      opt.config = config_from(config_path);
      opt.seed = seed;
      opt.cadence = cadence;
      opt.duration = duration;
      auto agent = h::make_agent(agent_choice, opt.config);
      const auto log = h::run(spec, *agent, opt);
      std::filesystem::create_directories(out_dir);
      const auto base = std::filesystem::path(out_dir) / spec.name;
      h::write_run_log(log, base.string() + ".ndjson");
      const auto metrics = h::compute_metrics(log, &spec);
      h::write_report(metrics, h::ReportFormat::table, base.string() + ".report.txt");
      h::write_report(metrics, h::ReportFormat::csv, base.string() + ".report.csv");
      if (!script_out.empty()) {
        save_script(log, script_out);
      }
      std::cout << h::emit_report(metrics, h::ReportFormat::table);
      std::cout << "log: " << base.string() << ".ndjson\n";
      return all_correct(metrics) ? kOk : kMismatch;
    }

    if (*report) {
      const auto log = h::read_run_log(log_path);
      std::optional<h::ScenarioSpec> spec;
      try {
        spec = h::load_scenario(log.meta.scenario_path);
      } catch (const std::exception &) {
        std::cerr << "note: scenario " << log.meta.scenario_path << " unavailable; expected windows skipped\n";
      }
      const auto metrics = h::compute_metrics(log, spec ? &*spec : nullptr);
      const auto fmt = format == "csv" ? h::ReportFormat::csv : h::ReportFormat::table;
      if (report_out.empty()) {
        std::cout << h::emit_report(metrics, fmt);
      } else {
        h::write_report(metrics, fmt, report_out);
      }
      return kOk;
    }

    if (*tmpl) {
      const auto text = vlmtest::interface::render_template(config_from(config_path).prompt_template);
      if (template_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(template_out);
        if (!(out << text)) {
          throw std::runtime_error("cannot write template: " + template_out);
        }
      }
      return kOk;
    }

    if (*replay) {
      h::RunOptions opt;
      opt.config = config_from(config_path);
      const auto result = h::replay(replay_path, opt);
      const auto metrics = h::compute_metrics(result.replayed, &result.spec, &result.original.decisions);
      std::cout << "replay ok: " << result.replayed.decisions.size() << " decisions reproduced\n";
      std::cout << h::emit_report(metrics, h::ReportFormat::table);
      return all_correct(metrics) ? kOk : kMismatch;
    }
  } catch (const h::ReplayMismatch & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMismatch;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kScenarioError;
  }
  return kOk;
}

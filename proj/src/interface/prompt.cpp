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

#include "vlmtest/interface/interface.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace vlmtest::interface
{

namespace
{
constexpr double kMpsToKmh = 3.6;

std::string_view field_name(StatusField f)
{
  switch (f) {
    case StatusField::state:
      return "state";
    case StatusField::image:
      return "image";
    case StatusField::behaviors:
      return "behaviors";
    case StatusField::command:
      return "command";
  }
  return "state";
}

StatusField field_from_name(std::string_view s)
{
  for (auto f : {StatusField::state, StatusField::image, StatusField::behaviors, StatusField::command}) {
    if (field_name(f) == s) {
      return f;
    }
  }
  throw std::invalid_argument("unknown status field: " + std::string(s));
}

std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string join(const std::vector<std::string> & items, std::string_view sep)
{
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) {
      out += sep;
    }
    out += items[i];
  }
  return out;
}
}  // namespace

void validate_template(const PromptTemplate & tpl)
{
  std::set<StatusField> seen(tpl.status_format.begin(), tpl.status_format.end());
  if (tpl.status_format.size() != 4 || seen.size() != 4) {
    throw std::invalid_argument(
      "prompt template: status format must list state, image, behaviors and command exactly once");
  }
}

PromptTemplate default_template()
{
  PromptTemplate tpl;
  tpl.system_statement =
    "You drive an autonomous car on public roads.\n"
    "Each query lists the ego state, the latest front camera frame and the passenger request.\n"
    "Only the listed behaviors are currently safe to execute.\n"
    "Pick one of them and tune the lateral (MPC) and longitudinal (PID) controller parameters.\n"
    "Answer with a Thought line, then an Action block laid out like the example.";
  tpl.few_shot_examples.push_back(FewShotExample{
    "The current vehicle state is [120.00, 40.00, 0.95, 40.00, highway]\n"
    "The front view image captured is [front_000000]\n"
    "The possible driving behavior is [yield, overtake, following]\n"
    "The passenger's command is [Please keep the ride smooth]",
    "A smooth ride means staying in lane behind the lead car with gentle speed changes.",
    "Selected Driving Behavior: [following]\n"
    "Lateral Control Params: [0.2, 0.35, 2.0]\n"
    "Longitudinal Control Params: [1.1, 0.02, 0.01]"});
  return tpl;
}

std::string status_line(StatusField field, const midlayer::DrivingStateVector & vs)
{
  char buf[160];
  switch (field) {
    case StatusField::state:
      std::snprintf(
        buf, sizeof buf, "The current vehicle state is [%.2f, %.2f, %.2f, %.2f, %s]", vs.S.x, vs.S.y,
        vs.S.psi, vs.S.v * kMpsToKmh, std::string(autonomy::to_string(vs.S.map)).c_str());
      return buf;
    case StatusField::image:
      return "The front view image captured is [" + vs.F.frame_tag + "]";
    case StatusField::behaviors:
      return "The possible driving behavior is [" + join(vs.B.safe_ids(), ", ") + "]";
    case StatusField::command:
      return "The passenger's command is [" + vs.H.text + "]";
  }
  return {};
}

Prompt build_prompt(const midlayer::DrivingStateVector & vs, const PromptTemplate & tpl)
{
  std::string text;
  text.reserve(1024);
  text += tpl.system_statement;
  text += "\n\n";
  for (const auto & ex : tpl.few_shot_examples) {
    text += "Query: ";
    text += ex.query;
    text += "\nThought: ";
    text += ex.thought;
    text += "\nAction: ";
    text += ex.action;
    text += "\n\n";
  }
  for (std::size_t i = 0; i < tpl.status_format.size(); ++i) {
    if (i > 0) {
      text += '\n';
    }
    text += status_line(tpl.status_format[i], vs);
  }
  text += '\n';

  Prompt p;
  p.token_estimate = (text.size() + 3) / 4;
  p.text = std::move(text);
  p.source_seq = vs.seq;
  return p;
}

void to_json(nlohmann::json & j, const Prompt & p)
{
  j = {
    {"text", p.text},
    {"token_estimate", p.token_estimate},
    {"source_seq", {{"F", p.source_seq.f}, {"B", p.source_seq.b}, {"S", p.source_seq.s}, {"H", p.source_seq.h}}}};
}

// ---------------------------------------------------------------------------
// Template files

PromptTemplate parse_template(std::string_view text)
{
  enum class Section { none, system, examples, status };
  Section section = Section::none;
  std::vector<std::string> system_lines;
  std::vector<std::string> example_blocks(1);
  std::vector<std::string> status_lines;

  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    const std::string t = trim(line);
    if (t == "=== system ===") {
      section = Section::system;
      continue;
    }
    if (t == "=== examples ===") {
      section = Section::examples;
      continue;
    }
    if (t == "=== status ===") {
      section = Section::status;
      continue;
    }
    switch (section) {
      case Section::none:
        if (!t.empty()) {
          throw std::invalid_argument("prompt template: text before the first section");
        }
        break;
      case Section::system:
        system_lines.push_back(line);
        break;
      case Section::examples:
        if (t == "---") {
          example_blocks.emplace_back();
        } else {
          example_blocks.back() += line + "\n";
        }
        break;
      case Section::status:
        if (!t.empty()) {
          status_lines.push_back(t);
        }
        break;
    }
  }

  PromptTemplate tpl;
  tpl.system_statement = trim(join(system_lines, "\n"));
  for (const auto & block : example_blocks) {
    if (trim(block).empty()) {
      continue;
    }
    const auto q = block.find("Query:");
    const auto th = block.find("Thought:");
    const auto ac = block.find("Action:");
    if (q == std::string::npos || th == std::string::npos || ac == std::string::npos || !(q < th && th < ac)) {
      throw std::invalid_argument("prompt template: example needs Query:, Thought:, Action: in order");
    }
    tpl.few_shot_examples.push_back(FewShotExample{
      trim(std::string_view(block).substr(q + 6, th - q - 6)),
      trim(std::string_view(block).substr(th + 8, ac - th - 8)),
      trim(std::string_view(block).substr(ac + 7))});
  }
  tpl.status_format.clear();
  for (const auto & s : status_lines) {
    tpl.status_format.push_back(field_from_name(s));
  }
  validate_template(tpl);
  return tpl;
}

PromptTemplate load_template(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open prompt template: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_template(ss.str());
}

std::string render_template(const PromptTemplate & tpl)
{
  std::string out = "=== system ===\n" + tpl.system_statement + "\n=== examples ===\n";
  for (std::size_t i = 0; i < tpl.few_shot_examples.size(); ++i) {
    const auto & ex = tpl.few_shot_examples[i];
    if (i > 0) {
      out += "---\n";
    }
    out += "Query: " + ex.query + "\nThought: " + ex.thought + "\nAction: " + ex.action + "\n";
  }
  out += "=== status ===\n";
  for (auto f : tpl.status_format) {
    out += std::string(field_name(f)) + "\n";
  }
  return out;
}

}  // namespace vlmtest::interface

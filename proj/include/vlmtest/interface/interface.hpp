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

#include "vlmtest/midlayer/midlayer.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vlmtest::interface
{

struct FewShotExample
{
  std::string query;
  std::string thought;
  std::string action;
};

enum class StatusField
{
  state,
  image,
  behaviors,
  command
};

struct PromptTemplate
{
  std::string system_statement;
  std::vector<FewShotExample> few_shot_examples;
  std::vector<StatusField> status_format{
    StatusField::state, StatusField::image, StatusField::behaviors, StatusField::command};
};

/// Throws std::invalid_argument unless status_format names each field exactly once.
void validate_template(const PromptTemplate & tpl);

/// The stock template: driving-task system statement and one worked example.
PromptTemplate default_template();

/// Template file: three sections introduced by "=== system ===",
/// "=== examples ===" and "=== status ===". Examples are "Query:",
/// "Thought:", "Action:" blocks separated by a line holding "---"; the status
/// section lists the field order one name per line.
PromptTemplate parse_template(std::string_view text);
PromptTemplate load_template(const std::string & path);
std::string render_template(const PromptTemplate & tpl);

struct Prompt
{
  std::string text;
  std::size_t token_estimate{0};
  midlayer::PartSeq source_seq;
};

void to_json(nlohmann::json & j, const Prompt & p);

/// Renders system statement, examples and the status block, in that order.
/// Numbers carry two decimals; speed is shown in km/h.
Prompt build_prompt(const midlayer::DrivingStateVector & vs, const PromptTemplate & tpl);

/// Individual status lines, exposed for golden tests.
std::string status_line(StatusField field, const midlayer::DrivingStateVector & vs);

// ---------------------------------------------------------------------------
// Action codec

inline constexpr std::string_view kBehaviorLabel = "Selected Driving Behavior";
inline constexpr std::string_view kLateralLabel = "Lateral Control Params";
inline constexpr std::string_view kLongitudinalLabel = "Longitudinal Control Params";

struct ParseError
{
  enum class Kind
  {
    missing_field,
    bad_arity,
    non_numeric,
    malformed
  };

  Kind kind{Kind::missing_field};
  std::string field;
  std::size_t arity{0};

  std::string message() const;
  bool operator==(const ParseError &) const = default;
};

using ParseResult = std::variant<midlayer::ActionVector, ParseError>;

/// Extracts the three labelled fields (case-insensitive, any order). Any text
/// after a leading "Thought:" is kept as the rationale. Never throws on any
/// input; failures come back as ParseError.
ParseResult parse_action(std::string_view reply);

/// Canonical reply text: optional Thought line, then behavior, lateral and
/// longitudinal fields. Uses shortest round-trip number formatting.
std::string render_action(const midlayer::ActionVector & action);

struct ActionWarning
{
  enum class Kind
  {
    unknown_behavior,
    unsafe_behavior,
    out_of_range
  };
  Kind kind{Kind::unknown_behavior};
  std::string subject;

  bool operator==(const ActionWarning &) const = default;
};

/// Advisory checks ahead of execution; an empty list means clean.
std::vector<ActionWarning> validate_action(
  const midlayer::ActionVector & action, const autonomy::BehaviorSet & behaviors,
  const midlayer::SafetyRanges & ranges = {});

std::string to_string(const ActionWarning & w);

}  // namespace vlmtest::interface

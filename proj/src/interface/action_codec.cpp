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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>

namespace vlmtest::interface
{

namespace
{
char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string to_lower(std::string_view s)
{
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view trim(std::string_view s)
{
  while (!s.empty() && is_space(s.front())) {
    s.remove_prefix(1);
  }
  while (!s.empty() && is_space(s.back())) {
    s.remove_suffix(1);
  }
  return s;
}

// Content between the brackets following a label, or a malformed error.
std::variant<std::string_view, ParseError> bracket_after(
  std::string_view reply, std::size_t label_end, std::string_view field)
{
  std::size_t i = label_end;
  while (i < reply.size() && (reply[i] == ' ' || reply[i] == '\t')) {
    ++i;
  }
  if (i < reply.size() && reply[i] == ':') {
    ++i;
  }
  while (i < reply.size() && (reply[i] == ' ' || reply[i] == '\t')) {
    ++i;
  }
  if (i >= reply.size() || reply[i] != '[') {
    return ParseError{ParseError::Kind::malformed, std::string(field), 0};
  }
  const auto close = reply.find(']', i + 1);
  const auto nl = reply.find('\n', i + 1);
  if (close == std::string_view::npos || (nl != std::string_view::npos && nl < close)) {
    return ParseError{ParseError::Kind::malformed, std::string(field), 0};
  }
  return reply.substr(i + 1, close - i - 1);
}

std::optional<double> parse_number(std::string_view s)
{
  s = trim(s);
  if (!s.empty() && s.front() == '+') {
    s.remove_prefix(1);
  }
  if (s.empty()) {
    return std::nullopt;
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::variant<std::array<double, 3>, ParseError> parse_triple(
  std::string_view content, std::string_view field)
{
  std::vector<std::string_view> parts;
  if (!trim(content).empty()) {
    std::size_t start = 0;
    while (true) {
      const auto comma = content.find(',', start);
      parts.push_back(content.substr(start, comma == std::string_view::npos ? comma : comma - start));
      if (comma == std::string_view::npos) {
        break;
      }
      start = comma + 1;
    }
  }
  if (parts.size() != 3) {
    return ParseError{ParseError::Kind::bad_arity, std::string(field), parts.size()};
  }
  std::array<double, 3> out{};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto v = parse_number(parts[k]);
    if (!v) {
      return ParseError{ParseError::Kind::non_numeric, std::string(field), 3};
    }
    out[k] = *v;
  }
  return out;
}

void append_number(std::string & out, double v)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ec == std::errc() ? ptr : buf);
}

void append_triple(std::string & out, const std::array<double, 3> & t)
{
  out += '[';
  for (std::size_t k = 0; k < 3; ++k) {
    if (k > 0) {
      out += ", ";
    }
    append_number(out, t[k]);
  }
  out += ']';
}
}  // namespace

std::string ParseError::message() const
{
  switch (kind) {
    case Kind::missing_field:
      return "missing field: " + field;
    case Kind::bad_arity:
      return "bad arity for " + field + ": expected 3, got " + std::to_string(arity);
    case Kind::non_numeric:
      return "non-numeric value in " + field;
    case Kind::malformed:
      return "malformed field: " + field;
  }
  return "parse error";
}

ParseResult parse_action(std::string_view reply)
{
  const std::string low = to_lower(reply);
  const std::array<std::string_view, 3> labels{kBehaviorLabel, kLateralLabel, kLongitudinalLabel};
  std::array<std::size_t, 3> pos{};
  for (std::size_t k = 0; k < 3; ++k) {
    pos[k] = low.find(to_lower(labels[k]));
    if (pos[k] == std::string::npos) {
      return ParseError{ParseError::Kind::missing_field, std::string(labels[k]), 0};
    }
  }

  midlayer::ActionVector a;

  auto beh = bracket_after(reply, pos[0] + labels[0].size(), labels[0]);
  if (auto * e = std::get_if<ParseError>(&beh)) {
    return *e;
  }
  a.behavior = to_lower(trim(std::get<std::string_view>(beh)));
  if (a.behavior.empty()) {
    return ParseError{ParseError::Kind::malformed, std::string(labels[0]), 0};
  }

  for (std::size_t k = 1; k < 3; ++k) {
    auto content = bracket_after(reply, pos[k] + labels[k].size(), labels[k]);
    if (auto * e = std::get_if<ParseError>(&content)) {
      return *e;
    }
    auto triple = parse_triple(std::get<std::string_view>(content), labels[k]);
    if (auto * e = std::get_if<ParseError>(&triple)) {
      return *e;
    }
    (k == 1 ? a.lateral : a.longitudinal) = std::get<std::array<double, 3>>(triple);
  }

  const std::size_t first_label = *std::min_element(pos.begin(), pos.end());
  const auto th = low.find("thought:");
  if (th != std::string::npos && th < first_label) {
    const std::size_t begin = th + 8;
    std::size_t end = std::min(low.find("action:", begin), first_label);
    a.rationale = std::string(trim(reply.substr(begin, end - begin)));
  }
  return a;
}

std::string render_action(const midlayer::ActionVector & action)
{
  std::string out;
  if (!action.rationale.empty()) {
    out += "Thought: " + action.rationale + "\n";
  }
  out += "Action: ";
  out += kBehaviorLabel;
  out += ": [" + action.behavior + "]\n";
  out += kLateralLabel;
  out += ": ";
  append_triple(out, action.lateral);
  out += '\n';
  out += kLongitudinalLabel;
  out += ": ";
  append_triple(out, action.longitudinal);
  out += '\n';
  return out;
}

std::vector<ActionWarning> validate_action(
  const midlayer::ActionVector & action, const autonomy::BehaviorSet & behaviors,
  const midlayer::SafetyRanges & ranges)
{
  std::vector<ActionWarning> out;
  const auto * b = behaviors.find(action.behavior);
  if (b == nullptr) {
    out.push_back({ActionWarning::Kind::unknown_behavior, action.behavior});
  } else if (!b->safe) {
    out.push_back({ActionWarning::Kind::unsafe_behavior, action.behavior});
  }
  const auto r = midlayer::ordered(ranges);
  const auto v = midlayer::ordered(action);
  for (std::size_t k = 0; k < 6; ++k) {
    if (!(v[k] >= r[k].lo && v[k] <= r[k].hi)) {
      out.push_back({ActionWarning::Kind::out_of_range, std::string(midlayer::kParamNames[k])});
    }
  }
  return out;
}

std::string to_string(const ActionWarning & w)
{
  switch (w.kind) {
    case ActionWarning::Kind::unknown_behavior:
      return "unknown behavior: " + w.subject;
    case ActionWarning::Kind::unsafe_behavior:
      return "unsafe behavior: " + w.subject;
    case ActionWarning::Kind::out_of_range:
      return "parameter out of range: " + w.subject;
  }
  return {};
}

}  // namespace vlmtest::interface

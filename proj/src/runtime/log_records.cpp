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

#include "vlmtest/runtime/log_records.hpp"

#include <array>
#include <stdexcept>

namespace vlmtest::runtime
{

using nlohmann::json;

json to_record(const EnvelopeRecord & env)
{
  return json{
    {"kind", "envelope"},
    {"topic", env.header.topic},
    {"seq", env.header.seq},
    {"t_virtual", env.header.t_virtual},
    {"t_wall_in", env.header.t_wall_in_ns},
    {"t_wall_out", env.header.t_wall_out_ns},
    {"payload", env.payload}};
}

json to_record(const LatencySample & s)
{
  return json{{"kind", "latency"}, {"module", s.module}, {"t_virtual", s.t_virtual}, {"L_ms", s.L_ms}};
}

json to_record(const ResourceSample & s)
{
  return json{
    {"kind", "resource"}, {"module", s.module}, {"R_cpu", s.R_cpu}, {"R_mem", s.R_mem},
    {"R_gpu", s.R_gpu}};
}

namespace
{
void expect_kind(const json & rec, std::string_view kind)
{
  if (!rec.is_object() || !rec.contains("kind") || rec.at("kind") != kind) {
    throw std::invalid_argument("run log: expected a '" + std::string(kind) + "' record");
  }
}
}  // namespace

EnvelopeRecord envelope_from_record(const json & rec)
{
  expect_kind(rec, "envelope");
  EnvelopeRecord env;
  env.header.topic = rec.at("topic").get<std::string>();
  env.header.seq = rec.at("seq").get<std::uint64_t>();
  env.header.t_virtual = rec.at("t_virtual").get<double>();
  env.header.t_wall_in_ns = rec.value("t_wall_in", std::int64_t{0});
  env.header.t_wall_out_ns = rec.value("t_wall_out", std::int64_t{0});
  env.payload = rec.at("payload");
  return env;
}

LatencySample latency_from_record(const json & rec)
{
  expect_kind(rec, "latency");
  return LatencySample{
    rec.at("module").get<std::string>(), rec.at("L_ms").get<double>(),
    rec.value("t_virtual", 0.0)};
}

ResourceSample resource_from_record(const json & rec)
{
  expect_kind(rec, "resource");
  return ResourceSample{
    rec.at("module").get<std::string>(), rec.at("R_cpu").get<double>(),
    rec.at("R_mem").get<double>(), rec.at("R_gpu").get<double>()};
}

bool is_wall_clock_field(std::string_view name)
{
  // Host CPU and memory shares vary from run to run just like wall time.
  static constexpr std::array<std::string_view, 7> kFields{
    "t_wall_in", "t_wall_out", "L_ms", "latency_wall", "wall_ms", "R_cpu", "R_mem"};
  for (auto f : kFields) {
    if (f == name) {
      return true;
    }
  }
  return false;
}

json strip_wall_clock(const json & rec)
{
  if (rec.is_object()) {
    json out = json::object();
    for (auto it = rec.begin(); it != rec.end(); ++it) {
      if (!is_wall_clock_field(it.key())) {
        out[it.key()] = strip_wall_clock(it.value());
      }
    }
    return out;
  }
  if (rec.is_array()) {
    json out = json::array();
    for (const auto & v : rec) {
      out.push_back(strip_wall_clock(v));
    }
    return out;
  }
  return rec;
}

}  // namespace vlmtest::runtime

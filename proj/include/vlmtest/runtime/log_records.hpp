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

#include "vlmtest/runtime/bus.hpp"
#include "vlmtest/runtime/metrics.hpp"

#include <nlohmann/json.hpp>

// Line-level encoding of run log records. Every record is one JSON object
// with a "kind" discriminator and the stable field names
// topic, seq, t_virtual, payload, module, L_ms, R_cpu, R_mem, R_gpu.

namespace vlmtest::runtime
{

nlohmann::json to_record(const EnvelopeRecord & env);
nlohmann::json to_record(const LatencySample & sample);
nlohmann::json to_record(const ResourceSample & sample);

EnvelopeRecord envelope_from_record(const nlohmann::json & rec);
LatencySample latency_from_record(const nlohmann::json & rec);
ResourceSample resource_from_record(const nlohmann::json & rec);

/// Field names carrying host measurements (wall time, CPU and memory shares);
/// dropped for determinism checks.
bool is_wall_clock_field(std::string_view name);

/// Copy of `rec` with all wall-clock fields removed, recursively.
nlohmann::json strip_wall_clock(const nlohmann::json & rec);

}  // namespace vlmtest::runtime

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

#include <chrono>
#include <cstdint>

namespace vlmtest::runtime
{

/// Wall-clock nanoseconds from a monotonic source. Only used for latency.
std::int64_t wall_now_ns();

/// CPU time consumed by the calling thread, in nanoseconds.
std::int64_t thread_cpu_ns();

/// CPU time consumed by the whole process, in nanoseconds.
std::int64_t process_cpu_ns();

/// Virtual simulation clock. Starts at zero and never runs backwards.
///
/// Time is kept as an integer tick count so that repeated advances do not
/// accumulate floating-point drift; `now()` converts on demand.
class SimClock
{
public:
  explicit SimClock(double tick_seconds = 0.01);

  double now() const { return static_cast<double>(ticks_) * tick_seconds_; }
  std::int64_t ticks() const { return ticks_; }
  double tick_seconds() const { return tick_seconds_; }
  std::int64_t wall_origin_ns() const { return wall_origin_ns_; }

  void advance(std::int64_t ticks = 1);
  /// Jump to an absolute tick. Throws std::logic_error if that would go backwards.
  void advance_to(std::int64_t tick);
  void reset();

private:
  double tick_seconds_;
  std::int64_t ticks_{0};
  std::int64_t wall_origin_ns_;
};

}  // namespace vlmtest::runtime

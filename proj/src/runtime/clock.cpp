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

#include "vlmtest/runtime/clock.hpp"

#include <ctime>
#include <stdexcept>

namespace vlmtest::runtime
{

namespace
{
std::int64_t read_clock(clockid_t id)
{
  timespec ts{};
  clock_gettime(id, &ts);
  return static_cast<std::int64_t>(ts.tv_sec) * 1'000'000'000 + ts.tv_nsec;
}
}  // namespace

std::int64_t wall_now_ns()
{
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
           std::chrono::steady_clock::now().time_since_epoch())
    .count();
}

std::int64_t thread_cpu_ns() { return read_clock(CLOCK_THREAD_CPUTIME_ID); }

std::int64_t process_cpu_ns() { return read_clock(CLOCK_PROCESS_CPUTIME_ID); }

SimClock::SimClock(double tick_seconds) : tick_seconds_(tick_seconds), wall_origin_ns_(wall_now_ns())
{
  if (!(tick_seconds > 0.0)) {
    throw std::invalid_argument("SimClock: tick must be positive");
  }
}

void SimClock::advance(std::int64_t ticks)
{
  if (ticks < 0) {
    throw std::logic_error("SimClock: virtual time cannot decrease");
  }
  ticks_ += ticks;
}

void SimClock::advance_to(std::int64_t tick)
{
  if (tick < ticks_) {
    throw std::logic_error("SimClock: virtual time cannot decrease");
  }
  ticks_ = tick;
}

void SimClock::reset()
{
  ticks_ = 0;
  wall_origin_ns_ = wall_now_ns();
}

}  // namespace vlmtest::runtime

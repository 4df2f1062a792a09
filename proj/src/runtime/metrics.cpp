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

#include "vlmtest/runtime/metrics.hpp"

#include "vlmtest/runtime/clock.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vlmtest::runtime
{

LatencySample measure_latency(
  std::string module, std::int64_t t_wall_in_ns, std::int64_t t_wall_out_ns, double t_virtual)
{
  if (t_wall_out_ns < t_wall_in_ns) {
    throw std::invalid_argument("measure_latency: negative interval for " + module);
  }
  return LatencySample{
    std::move(module), static_cast<double>(t_wall_out_ns - t_wall_in_ns) / 1.0e6, t_virtual};
}

ResourceSample resource_utilization(
  std::string module, double cpu_seconds, double total_cpu_seconds, double mem_bytes,
  double total_mem_bytes)
{
  if (!(total_cpu_seconds > 0.0) || !(total_mem_bytes > 0.0)) {
    throw std::invalid_argument("resource_utilization: totals must be positive");
  }
  if (cpu_seconds < 0.0 || mem_bytes < 0.0) {
    throw std::invalid_argument("resource_utilization: negative usage");
  }
  if (cpu_seconds > total_cpu_seconds || mem_bytes > total_mem_bytes) {
    throw std::invalid_argument("resource_utilization: part exceeds total");
  }
  return ResourceSample{
    std::move(module), cpu_seconds / total_cpu_seconds * 100.0,
    mem_bytes / total_mem_bytes * 100.0, 0.0};
}

LatencyStats latency_stats(std::span<const LatencySample> samples, std::string_view module)
{
  LatencyStats st;
  double sum = 0.0;
  for (const auto & s : samples) {
    if (s.module != module) {
      continue;
    }
    sum += s.L_ms;
    st.max = st.count == 0 ? s.L_ms : std::max(st.max, s.L_ms);
    ++st.count;
  }
  if (st.count == 0) {
    throw std::invalid_argument("latency_stats: no samples for " + std::string(module));
  }
  st.avg = sum / static_cast<double>(st.count);
  double ss = 0.0;
  for (const auto & s : samples) {
    if (s.module == module) {
      ss += (s.L_ms - st.avg) * (s.L_ms - st.avg);
    }
  }
  st.std = std::sqrt(ss / static_cast<double>(st.count));
  return st;
}

double total_memory_bytes()
{
  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page = sysconf(_SC_PAGE_SIZE);
  if (pages <= 0 || page <= 0) {
    return 1.0;
  }
  return static_cast<double>(pages) * static_cast<double>(page);
}

Instrumentation::Probe::Probe(Instrumentation & owner, std::string module, double t_virtual)
: owner_(&owner),
  module_(std::move(module)),
  t_virtual_(t_virtual),
  wall_in_(wall_now_ns()),
  cpu_in_(thread_cpu_ns())
{
}

Instrumentation::Probe::~Probe() { finish(); }

void Instrumentation::Probe::finish()
{
  if (done_) {
    return;
  }
  done_ = true;
  const std::int64_t cpu_out = thread_cpu_ns();
  const std::int64_t wall_out = wall_now_ns();
  auto & u = owner_->usage_[module_];
  u.cpu_ns += std::max<std::int64_t>(0, cpu_out - cpu_in_);
  u.max_bytes = std::max(u.max_bytes, bytes_);
  ++u.calls;
  owner_->record(measure_latency(module_, wall_in_, wall_out, t_virtual_));
}

void Instrumentation::begin_window()
{
  window_cpu_start_ = process_cpu_ns();
  window_cpu_end_ = -1;
}

void Instrumentation::end_window() { window_cpu_end_ = process_cpu_ns(); }

std::size_t Instrumentation::invocations(std::string_view module) const
{
  auto it = usage_.find(module);
  return it == usage_.end() ? 0 : it->second.calls;
}

std::vector<ResourceSample> Instrumentation::resources() const
{
  const std::int64_t end = window_cpu_end_ >= 0 ? window_cpu_end_ : process_cpu_ns();
  // The window always contains every probe, so total >= sum of parts; the
  // floor only guards a window with no measurable CPU time at all.
  std::int64_t total_ns = std::max<std::int64_t>(1, end - window_cpu_start_);
  std::int64_t parts = 0;
  for (const auto & [name, u] : usage_) {
    parts += u.cpu_ns;
  }
  total_ns = std::max(total_ns, parts);
  const double mem_total = total_memory_bytes();
  std::vector<ResourceSample> out;
  out.reserve(usage_.size());
  for (const auto & [name, u] : usage_) {
    out.push_back(resource_utilization(
      name, static_cast<double>(u.cpu_ns) * 1e-9, static_cast<double>(total_ns) * 1e-9,
      std::min(static_cast<double>(u.max_bytes), mem_total), mem_total));
  }
  return out;
}

}  // namespace vlmtest::runtime

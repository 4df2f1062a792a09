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

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vlmtest::runtime
{

struct LatencySample
{
  std::string module;
  double L_ms{0.0};
  double t_virtual{0.0};
};

struct ResourceSample
{
  std::string module;
  double R_cpu{0.0};
  double R_mem{0.0};
  double R_gpu{0.0};
};

struct LatencyStats
{
  double avg{0.0};
  double std{0.0};  // population standard deviation
  double max{0.0};
  std::size_t count{0};
};

/// L = (t_wall_out - t_wall_in) in milliseconds. Throws std::invalid_argument
/// when the interval is negative.
LatencySample measure_latency(
  std::string module, std::int64_t t_wall_in_ns, std::int64_t t_wall_out_ns,
  double t_virtual = 0.0);

/// CPU and memory shares of one module. GPU share is always zero here since
/// nothing runs on a GPU. Throws std::invalid_argument on non-positive totals
/// or parts exceeding totals.
ResourceSample resource_utilization(
  std::string module, double cpu_seconds, double total_cpu_seconds, double mem_bytes,
  double total_mem_bytes);

/// Mean, population std and max over the samples of `module`.
/// Throws std::invalid_argument if there are none.
LatencyStats latency_stats(std::span<const LatencySample> samples, std::string_view module);

/// Physical memory of the host in bytes.
double total_memory_bytes();

/// Per-run module instrumentation: latency samples plus accumulated CPU time
/// and the largest working-set estimate for each module.
class Instrumentation
{
public:
  /// RAII timer around one module invocation.
  class Probe
  {
  public:
    Probe(Instrumentation & owner, std::string module, double t_virtual);
    Probe(const Probe &) = delete;
    Probe & operator=(const Probe &) = delete;
    ~Probe();

    std::int64_t t_wall_in_ns() const { return wall_in_; }
    /// Bytes of state the module produced; used for the memory share.
    void set_bytes(std::size_t bytes) { bytes_ = bytes; }
    /// Stops the timer early; the destructor then does nothing.
    void finish();

  private:
    Instrumentation * owner_;
    std::string module_;
    double t_virtual_;
    std::int64_t wall_in_;
    std::int64_t cpu_in_;
    std::size_t bytes_{0};
    bool done_{false};
  };

  void begin_window();
  void end_window();

  Probe probe(std::string module, double t_virtual) { return Probe(*this, std::move(module), t_virtual); }
  void record(LatencySample sample) { samples_.push_back(std::move(sample)); }

  const std::vector<LatencySample> & samples() const { return samples_; }
  std::size_t invocations(std::string_view module) const;

  /// Resource shares for every module seen, measured over the current window.
  std::vector<ResourceSample> resources() const;

private:
  struct Usage
  {
    std::int64_t cpu_ns{0};
    std::size_t max_bytes{0};
    std::size_t calls{0};
  };

  std::vector<LatencySample> samples_;
  std::map<std::string, Usage, std::less<>> usage_;
  std::int64_t window_cpu_start_{0};
  std::int64_t window_cpu_end_{-1};
};

}  // namespace vlmtest::runtime

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

#include "vlmtest/runtime/clock.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <typeindex>
#include <utility>
#include <vector>

namespace vlmtest::runtime
{

class BusError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct EnvelopeHeader
{
  std::string topic;
  std::uint64_t seq{0};
  double t_virtual{0.0};
  std::int64_t t_wall_in_ns{0};
  std::int64_t t_wall_out_ns{0};
};

/// A published message. The payload is shared and immutable, so envelopes can
/// be copied across threads freely.
template <class T>
struct Envelope
{
  EnvelopeHeader header;
  std::shared_ptr<const T> payload;
};

/// Type-erased envelope as it appears in the run log.
struct EnvelopeRecord
{
  EnvelopeHeader header;
  nlohmann::json payload;
};

/// In-process typed publish/subscribe bus.
///
/// Each topic is bound to one payload type at registration. Subscribers are
/// invoked synchronously, in subscription order, inside `publish`, so every
/// subscriber observes a topic's envelopes in strictly increasing seq order.
/// An optional tap receives the serialized form of every envelope after the
/// subscribers have run.
class Bus
{
public:
  using Tap = std::function<void(const EnvelopeRecord &)>;

  template <class T>
  void register_topic(const std::string & topic)
  {
    if (channels_.count(topic) != 0) {
      throw BusError("topic already registered: " + topic);
    }
    Channel ch{std::type_index(typeid(T)), 0, {}, {}, {}, {}};
    ch.serialize = [](const void * p) { return nlohmann::json(*static_cast<const T *>(p)); };
    channels_.emplace(topic, std::move(ch));
  }

  bool has_topic(std::string_view topic) const { return channels_.find(topic) != channels_.end(); }

  /// Publishes `payload` and returns its sequence number (1-based per topic).
  /// `t_wall_in_ns` is when the producing module received its input; it
  /// defaults to the publication instant.
  template <class T>
  std::uint64_t publish(
    std::string_view topic, T payload, double t_virtual,
    std::optional<std::int64_t> t_wall_in_ns = std::nullopt)
  {
    Channel & ch = checked_channel(topic, std::type_index(typeid(T)));
    auto shared = std::make_shared<const T>(std::move(payload));
    EnvelopeHeader header;
    header.topic = std::string(topic);
    header.seq = ++ch.seq;
    header.t_virtual = t_virtual;
    header.t_wall_out_ns = wall_now_ns();
    header.t_wall_in_ns = t_wall_in_ns.value_or(header.t_wall_out_ns);
    if (header.t_wall_in_ns > header.t_wall_out_ns) {
      header.t_wall_in_ns = header.t_wall_out_ns;
    }
    ch.latest = shared;
    ch.latest_header = header;
    for (auto & sub : ch.subscribers) {
      sub(header, shared);
    }
    if (tap_) {
      tap_(EnvelopeRecord{header, ch.serialize(shared.get())});
    }
    return header.seq;
  }

  template <class T>
  void subscribe(std::string_view topic, std::function<void(const Envelope<T> &)> fn)
  {
    Channel & ch = checked_channel(topic, std::type_index(typeid(T)));
    ch.subscribers.push_back(
      [fn = std::move(fn)](const EnvelopeHeader & h, const std::shared_ptr<const void> & p) {
        fn(Envelope<T>{h, std::static_pointer_cast<const T>(p)});
      });
  }

  /// Latest envelope on a topic, or nullopt if nothing has been published yet.
  template <class T>
  std::optional<Envelope<T>> latest(std::string_view topic) const
  {
    const Channel & ch = checked_channel(topic, std::type_index(typeid(T)));
    if (!ch.latest) {
      return std::nullopt;
    }
    return Envelope<T>{ch.latest_header, std::static_pointer_cast<const T>(ch.latest)};
  }

  std::uint64_t last_seq(std::string_view topic) const;

  void set_tap(Tap tap) { tap_ = std::move(tap); }

private:
  struct Channel
  {
    std::type_index kind;
    std::uint64_t seq{0};
    std::function<nlohmann::json(const void *)> serialize;
    std::vector<std::function<void(const EnvelopeHeader &, const std::shared_ptr<const void> &)>>
      subscribers;
    std::shared_ptr<const void> latest;
    EnvelopeHeader latest_header;
  };

  Channel & checked_channel(std::string_view topic, std::type_index kind);
  const Channel & checked_channel(std::string_view topic, std::type_index kind) const;

  std::map<std::string, Channel, std::less<>> channels_;
  Tap tap_;
};

}  // namespace vlmtest::runtime

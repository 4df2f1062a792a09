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

#include "vlmtest/runtime/bus.hpp"

namespace vlmtest::runtime
{

Bus::Channel & Bus::checked_channel(std::string_view topic, std::type_index kind)
{
  auto it = channels_.find(topic);
  if (it == channels_.end()) {
    throw BusError("unknown topic: " + std::string(topic));
  }
  if (it->second.kind != kind) {
    throw BusError("payload kind mismatch on topic: " + std::string(topic));
  }
  return it->second;
}

const Bus::Channel & Bus::checked_channel(std::string_view topic, std::type_index kind) const
{
  return const_cast<Bus *>(this)->checked_channel(topic, kind);
}

std::uint64_t Bus::last_seq(std::string_view topic) const
{
  auto it = channels_.find(topic);
  if (it == channels_.end()) {
    throw BusError("unknown topic: " + std::string(topic));
  }
  return it->second.seq;
}

}  // namespace vlmtest::runtime

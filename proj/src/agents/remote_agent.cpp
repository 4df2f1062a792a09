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

#include "vlmtest/agents/agents.hpp"
#include "vlmtest/runtime/clock.hpp"

#include <httplib.h>

#include <cstdlib>
#include <stdexcept>

namespace vlmtest::agents
{

namespace
{
struct Url
{
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Url split_url(const std::string & url)
{
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || scheme_end == 0) {
    throw std::invalid_argument("endpoint needs a scheme: " + url);
  }
  const auto path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) {
    return {url, "/"};
  }
  return {url.substr(0, path_begin), url.substr(path_begin)};
}

double ms_since(std::int64_t t0) { return static_cast<double>(runtime::wall_now_ns() - t0) / 1e6; }
}  // namespace

void to_json(nlohmann::json & j, const RemoteConfig & c)
{
  j = nlohmann::json{
    {"endpoint", c.endpoint}, {"model", c.model}, {"token_env", c.token_env},
    {"max_retries", c.max_retries}, {"deadline_ms", c.deadline.count()}};
}

void from_json(const nlohmann::json & j, RemoteConfig & c)
{
  for (const auto & [key, _] : j.items()) {
    if (key != "endpoint" && key != "model" && key != "token_env" && key != "max_retries" &&
        key != "deadline_ms") {
      throw std::invalid_argument("remote agent config: unknown field '" + key + "'");
    }
  }
  c.endpoint = j.value("endpoint", c.endpoint);
  c.model = j.value("model", c.model);
  c.token_env = j.value("token_env", c.token_env);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.deadline = std::chrono::milliseconds(j.value("deadline_ms", static_cast<long>(c.deadline.count())));
  if (c.max_retries < 0 || c.deadline.count() <= 0) {
    throw std::invalid_argument("remote agent config: max_retries >= 0 and deadline_ms > 0 required");
  }
}

nlohmann::json chat_request_body(const std::string & prompt, const std::string & model)
{
  return nlohmann::json{
    {"model", model}, {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
}

std::optional<std::string> chat_response_text(const std::string & body)
{
  const auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return std::nullopt;
  }
  const nlohmann::json * msg = nullptr;
  if (doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty() &&
      doc["choices"][0].is_object() && doc["choices"][0].contains("message")) {
    msg = &doc["choices"][0]["message"];
  } else if (doc.contains("message")) {
    msg = &doc["message"];
  }
  if (msg == nullptr || !msg->is_object() || !msg->contains("content") || !(*msg)["content"].is_string()) {
    return std::nullopt;
  }
  return (*msg)["content"].get<std::string>();
}

AgentReply decide_remote(const AgentRequest & req, const RemoteConfig & cfg)
{
  const auto t0 = runtime::wall_now_ns();
  const double deadline_ms = static_cast<double>(req.deadline.count());
  AgentReply failure{"", 0.0, Outcome::transport_error};
  try {
    validate_request(req);
    const auto url = split_url(cfg.endpoint);
    httplib::Client cli(url.origin);
    if (!cli.is_valid()) {
      failure.latency_wall_ms = ms_since(t0);
      return failure;
    }
    httplib::Headers headers;
    if (const char * token = std::getenv(cfg.token_env.c_str()); token != nullptr && *token != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    const std::string body = chat_request_body(req.prompt.text, cfg.model).dump();

    for (int attempt = 0;; ++attempt) {
      const double remaining = deadline_ms - ms_since(t0);
      if (remaining <= 0.0) {
        return AgentReply{"", ms_since(t0), Outcome::timeout};
      }
      const auto budget = std::chrono::microseconds(static_cast<std::int64_t>(remaining * 1000.0));
      cli.set_connection_timeout(budget);
      cli.set_read_timeout(budget);
      cli.set_write_timeout(budget);

      auto res = cli.Post(url.path, headers, body, "application/json");
      const double elapsed = ms_since(t0);
      if (res) {
        if (res->status == 200) {
          auto text = chat_response_text(res->body);
          if (text && !text->empty()) {
            return AgentReply{std::move(*text), elapsed, Outcome::ok};
          }
          return AgentReply{"", elapsed, Outcome::malformed};
        }
      } else {
        const auto err = res.error();
        if (err == httplib::Error::ConnectionTimeout ||
            (err == httplib::Error::Read && elapsed >= 0.9 * deadline_ms)) {
          return AgentReply{"", elapsed, Outcome::timeout};
        }
      }
      if (attempt >= cfg.max_retries) {
        failure.latency_wall_ms = elapsed;
        return failure;
      }
    }
  } catch (const std::exception &) {
    failure.latency_wall_ms = ms_since(t0);
    return failure;
  }
}

RemoteAgent::RemoteAgent(RemoteConfig cfg) : cfg_(std::move(cfg))
{
  if (cfg_.endpoint.empty()) {
    throw std::invalid_argument("remote agent: endpoint not configured");
  }
}

AgentReply RemoteAgent::decide(const AgentRequest & req, const midlayer::DrivingStateVector &)
{
  return decide_remote(req, cfg_);
}

}  // namespace vlmtest::agents

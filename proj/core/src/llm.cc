// Copyright 2026 The Tidy Authors.
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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "tidy/llm.h"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include "json.hpp"

#include "tidy/error.h"

namespace tidy {
namespace {

constexpr const char* kSystemMessage =
    "You are a household robot's planner. You decide how to rearrange objects on a "
    "table so that it becomes tidy, and you answer only in the requested format.";

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // request path, always starting with '/'
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::kConfigError, "base_url needs a scheme: '" + url + "'");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorKind::kConfigError, "unsupported URL scheme '" + scheme + "'");
  }
  const auto host_start = scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  if (e.origin.size() == host_start) {
    throw Error(ErrorKind::kConfigError, "base_url has no host: '" + url + "'");
  }
  std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  e.path = prefix + "/chat/completions";
  return e;
}

std::string completion_text(const std::string& body) {
  const auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorKind::kLlmError, "response is not JSON");
  try {
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::kLlmError, "response has no choices[0].message.content");
  }
}

}  // namespace

void validate(const LlmConfig& config) {
  if (config.max_retries < 0) throw Error(ErrorKind::kConfigError, "max_retries must be >= 0");
  if (!(config.timeout_seconds > 0.0) || !std::isfinite(config.timeout_seconds)) {
    throw Error(ErrorKind::kConfigError, "timeout_seconds must be positive");
  }
  if (!(config.backoff_base_seconds >= 0.0)) {
    throw Error(ErrorKind::kConfigError, "backoff_base_seconds must be >= 0");
  }
  if (config.model_name.empty()) throw Error(ErrorKind::kConfigError, "model_name is empty");
  split_url(config.base_url);
}

LlmCompletion llm_complete(const LlmConfig& config, const std::string& prompt) {
  validate(config);
  const char* key = std::getenv(config.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw Error(ErrorKind::kConfigError,
                "environment variable " + config.api_key_env + " is not set");
  }
  const Endpoint endpoint = split_url(config.base_url);

  const nlohmann::json request = {
      {"model", config.model_name},
      {"temperature", config.temperature},
      {"messages",
       {{{"role", "system"}, {"content", kSystemMessage}}, {{"role", "user"}, {"content", prompt}}}}};
  const std::string body = request.dump();

  httplib::Client client(endpoint.origin);
  const auto timeout = std::chrono::duration<double>(config.timeout_seconds);
  const auto timeout_us = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
  client.set_connection_timeout(timeout_us);
  client.set_read_timeout(timeout_us);
  client.set_write_timeout(timeout_us);
  const httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};

  std::string last_failure;
  bool last_was_status = false;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) {
      const double delay = config.backoff_base_seconds * std::ldexp(1.0, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    const auto res = client.Post(endpoint.path, headers, body, "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      last_was_status = false;
      continue;
    }
    if (res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      last_was_status = true;
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw Error(ErrorKind::kLlmError, "HTTP " + std::to_string(res->status));
    }
    return {completion_text(res->body), attempt};
  }
  const std::string detail =
      last_failure + " after " + std::to_string(config.max_retries) + " retries";
  throw Error(last_was_status ? ErrorKind::kLlmError : ErrorKind::kLlmUnavailable, detail);
}

}  // namespace tidy

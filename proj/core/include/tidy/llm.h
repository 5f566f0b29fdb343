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

#ifndef TIDY_LLM_H_
#define TIDY_LLM_H_

#include <string>

namespace tidy {

// OpenAI-compatible chat-completion endpoint. The API key is read from the
// environment variable named by `api_key_env`, never from files.
struct LlmConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_name = "gpt-4";
  std::string api_key_env = "TIDY_LLM_API_KEY";
  double timeout_seconds = 60.0;
  int max_retries = 2;
  double temperature = 0.0;
  double backoff_base_seconds = 1.0;  // retry r (from 1) waits base * 2^(r-1)
};

// Throws kConfigError for retries < 0, non-positive timeout or a malformed URL.
void validate(const LlmConfig& config);

struct LlmCompletion {
  std::string text;
  int retries = 0;
};

// One POST to <base_url>/chat/completions with a fixed system message and the
// prompt as the user message. Transport failures and 5xx responses are
// retried up to max_retries times. Throws kConfigError when the key variable
// is unset (before any network traffic), kLlmUnavailable when the transport
// keeps failing, and kLlmError for other non-2xx statuses or a response
// without completion text.
LlmCompletion llm_complete(const LlmConfig& config, const std::string& prompt);

}  // namespace tidy

#endif  // TIDY_LLM_H_

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

#include "tidy/llm.h"

#include <gtest/gtest.h>

#include "mock_llm.h"
#include "test_util.h"

namespace tidy {
namespace {

using testing::MockLlmServer;
using testing::ScopedEnv;

constexpr char kKeyVar[] = "TIDY_TEST_LLM_KEY";

LlmConfig config_for(const MockLlmServer& server) {
  LlmConfig c;
  c.base_url = server.base_url();
  c.api_key_env = kKeyVar;
  c.timeout_seconds = 5.0;
  c.backoff_base_seconds = 0.0;
  return c;
}

TEST(LlmClientTest, ReturnsCompletionText) {
  MockLlmServer server;
  server.script({}, MockLlmServer::completion("RULES:\n- a\n"));
  ScopedEnv key(kKeyVar, "sk-test");
  const LlmCompletion c = llm_complete(config_for(server), "hello");
  EXPECT_EQ(c.text, "RULES:\n- a\n");
  EXPECT_EQ(c.retries, 0);

  ASSERT_EQ(server.requests().size(), 1u);
  const auto body = nlohmann::json::parse(server.requests()[0]);
  EXPECT_EQ(body["model"], "gpt-4");
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["messages"].back()["role"], "user");
  EXPECT_EQ(body["messages"].back()["content"], "hello");
  EXPECT_EQ(server.authorization()[0], "Bearer sk-test");
}

TEST(LlmClientTest, RetriesServerErrors) {
  MockLlmServer server;
  server.script({{500, "{}"}, {503, "{}"}}, MockLlmServer::completion("ok"));
  ScopedEnv key(kKeyVar, "k");
  const LlmCompletion c = llm_complete(config_for(server), "p");
  EXPECT_EQ(c.text, "ok");
  EXPECT_EQ(c.retries, 2);
  EXPECT_EQ(server.requests().size(), 3u);
}

TEST(LlmClientTest, PersistentServerErrorIsLlmError) {
  MockLlmServer server;
  server.script({}, {502, "{}"});
  ScopedEnv key(kKeyVar, "k");
  LlmConfig c = config_for(server);
  c.max_retries = 1;
  EXPECT_TIDY_ERROR(llm_complete(c, "p"), ErrorKind::kLlmError);
  EXPECT_EQ(server.requests().size(), 2u);
}

TEST(LlmClientTest, ClientErrorIsNotRetried) {
  MockLlmServer server;
  server.script({}, {401, R"({"error":"bad key"})"});
  ScopedEnv key(kKeyVar, "k");
  EXPECT_TIDY_ERROR(llm_complete(config_for(server), "p"), ErrorKind::kLlmError);
  EXPECT_EQ(server.requests().size(), 1u);
}

TEST(LlmClientTest, MalformedBodyIsLlmError) {
  MockLlmServer server;
  server.script({}, {200, R"({"choices":[]})"});
  ScopedEnv key(kKeyVar, "k");
  EXPECT_TIDY_ERROR(llm_complete(config_for(server), "p"), ErrorKind::kLlmError);
  server.script({}, {200, "not json"});
  EXPECT_TIDY_ERROR(llm_complete(config_for(server), "p"), ErrorKind::kLlmError);
}

TEST(LlmClientTest, MissingKeyFailsBeforeAnyRequest) {
  MockLlmServer server;
  server.script({}, MockLlmServer::completion("x"));
  ::unsetenv(kKeyVar);
  EXPECT_TIDY_ERROR(llm_complete(config_for(server), "p"), ErrorKind::kConfigError);
  EXPECT_TRUE(server.requests().empty());
}

TEST(LlmClientTest, UnreachableEndpointIsUnavailable) {
  ScopedEnv key(kKeyVar, "k");
  LlmConfig c;
  c.api_key_env = kKeyVar;
  // Port 1 on loopback refuses connections.
  c.base_url = "http://127.0.0.1:1/v1";
  c.timeout_seconds = 2.0;
  c.max_retries = 1;
  c.backoff_base_seconds = 0.0;
  EXPECT_TIDY_ERROR(llm_complete(c, "p"), ErrorKind::kLlmUnavailable);
}

TEST(LlmConfigTest, Validation) {
  LlmConfig c;
  EXPECT_NO_THROW(validate(c));
  c.max_retries = -1;
  EXPECT_TIDY_ERROR(validate(c), ErrorKind::kConfigError);
  c = {};
  c.timeout_seconds = 0.0;
  EXPECT_TIDY_ERROR(validate(c), ErrorKind::kConfigError);
  c = {};
  c.base_url = "not a url";
  EXPECT_TIDY_ERROR(validate(c), ErrorKind::kConfigError);
}

}  // namespace
}  // namespace tidy

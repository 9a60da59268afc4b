// Copyright 2026 The Pseudokit Authors.
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

// Two-stage LLM pseudonymization: a one-shot extraction prompt returns a
// comma-separated entity list, a one-shot chat exchange rewrites that list,
// and the aligned pairs are spliced back into the text by string search.

#ifndef PSEUDOKIT_LLM_H_
#define PSEUDOKIT_LLM_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pseudokit/corpus.h"
#include "pseudokit/error.h"
#include "pseudokit/rewrite.h"

namespace YAML {
class Node;
}  // namespace YAML

namespace pseudokit {

enum class ChatRole { kSystem, kUser, kAssistant };

std::string_view role_name(ChatRole r);

struct ChatMessage {
  ChatRole role = ChatRole::kUser;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct LlmEndpoint {
  // Full URL of the chat-completions route, e.g.
  // https://api.openai.com/v1/chat/completions.
  std::string url;
  std::string model;
  // Name of the environment variable holding the bearer token. An unset or
  // empty variable sends no Authorization header.
  std::string api_key_env = "LLM_API_KEY";
  double timeout_seconds = 60.0;
  int max_retries = 3;
  int max_in_flight = 4;
  double temperature = 0.0;
};

// Throws UsageError on retries < 0, timeout <= 0 or max_in_flight < 1.
void validate_endpoint(const LlmEndpoint& endpoint);

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Returns choices[0].message.content. Throws TransportError.
  virtual std::string complete(std::span<const ChatMessage> messages) = 0;
  virtual int max_retries() const = 0;
};

nlohmann::ordered_json chat_request_json(const LlmEndpoint& endpoint,
                                         std::span<const ChatMessage> messages);
// Extracts choices[0].message.content; throws TransportError on other shapes.
std::string parse_chat_response(std::string_view body);

// POSTs {model, messages, temperature}; at most endpoint.max_in_flight
// concurrent requests per client.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(LlmEndpoint endpoint);
  std::string complete(std::span<const ChatMessage> messages) override;
  int max_retries() const override { return endpoint_.max_retries; }
  const LlmEndpoint& endpoint() const { return endpoint_; }

 private:
  LlmEndpoint endpoint_;
  std::string scheme_host_port_;
  std::string path_;
  std::counting_semaphore<1024> in_flight_;
};

struct MockRule {
  std::string match;
  std::string response;
};

// Deterministic stand-in for an endpoint. The first rule whose `match` is a
// substring of the last message's content wins; otherwise `default_response`.
class MockChatClient : public ChatClient {
 public:
  MockChatClient(std::vector<MockRule> rules, std::string default_response,
                 int max_retries = 0);

  // YAML: {rules: [{match, response}, ...], default: str}. A bare list of
  // rules is also accepted.
  static std::unique_ptr<MockChatClient> load(std::istream& in);
  static std::unique_ptr<MockChatClient> load_file(const std::string& path);
  static std::unique_ptr<MockChatClient> load_yaml(const YAML::Node& root);

  std::string complete(std::span<const ChatMessage> messages) override;
  int max_retries() const override { return max_retries_; }

  std::size_t calls() const { return calls_.load(); }

 private:
  std::vector<MockRule> rules_;
  std::string default_response_;
  int max_retries_;
  std::atomic<std::size_t> calls_{0};
};

// --- prompt chain -------------------------------------------------------

std::string build_ner_prompt(std::string_view text);

// Split on commas, trim, strip one trailing period from the last item, drop
// empties. Throws EmptyExtraction when nothing is left.
std::vector<std::string> parse_entity_list(std::string_view response);

std::vector<ChatMessage> build_replacement_messages(
    std::span<const std::string> entities);

struct Alignment {
  // Positional pairs, in extraction order, first occurrence of each surface.
  std::vector<std::pair<std::string, std::string>> mapping;
  // Surfaces whose surrogate equals them case-insensitively.
  std::vector<std::string> self_replacements;
  // Surfaces that look like common words rather than names (no uppercase
  // initial in any word), e.g. "family" -> "relatives".
  std::vector<std::string> non_entity_substitutions;
  // Repeated surfaces whose later surrogate disagreed with the first.
  std::vector<std::string> conflicting_duplicates;
};

// Throws AlignmentError when the lists differ in length.
Alignment align_replacements(std::span<const std::string> extracted,
                             std::span<const std::string> replaced);

// An LLM surrogate reintroduced another extracted surface into the text.
class SurrogateCollision : public Error {
 public:
  using Error::Error;
};

struct RetryPolicy {
  double base_delay_seconds = 0.5;
  double max_delay_seconds = 8.0;
  std::uint64_t jitter_seed = 0;
};

struct LlmDiagnostics {
  std::vector<std::string> extracted;
  std::vector<std::string> replaced;
  std::vector<std::string> unmatched;  // extracted but not found in the text
  std::vector<std::string> self_replacements;
  std::vector<std::string> non_entity_substitutions;
  std::vector<std::string> conflicting_duplicates;
  bool empty_extraction = false;
  int extraction_attempts = 0;
  int replacement_attempts = 0;

  nlohmann::ordered_json to_json() const;
};

struct LlmRewrite {
  RewrittenDocument document;
  LlmDiagnostics diagnostics;
};

// Runs the chain for one document. Transport errors, alignment mismatches and
// surrogate collisions are retried up to the client's retry budget; then the
// error propagates (TransportError, AlignmentError, SurrogateCollision). An
// extraction with no entities leaves the document unchanged. Occurrences are
// located by word-boundary search, longest surface first; a span keeps the
// category of an identical gold span and is PER otherwise.
LlmRewrite llm_pseudonymize(const Document& doc, ChatClient& extractor,
                            ChatClient& replacer,
                            const RetryPolicy& policy = {});

struct LlmBatchItem {
  std::string id;
  bool ok = false;
  RewrittenDocument document;
  LlmDiagnostics diagnostics;
  std::string error;
  std::string error_kind;
};

// Per-document failures are recorded, never thrown. Results in input order.
std::vector<LlmBatchItem> llm_pseudonymize_batch(std::span<const Document> docs,
                                                 ChatClient& extractor,
                                                 ChatClient& replacer,
                                                 const RetryPolicy& policy = {},
                                                 std::size_t workers = 1);

}  // namespace pseudokit

#endif  // PSEUDOKIT_LLM_H_

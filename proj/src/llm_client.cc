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

#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "pseudokit/llm.h"

namespace pseudokit {

void validate_endpoint(const LlmEndpoint& endpoint) {
  if (endpoint.max_retries < 0) {
    throw UsageError("endpoint max_retries must be >= 0");
  }
  if (!(endpoint.timeout_seconds > 0)) {
    throw UsageError("endpoint timeout must be > 0");
  }
  if (endpoint.max_in_flight < 1 || endpoint.max_in_flight > 1024) {
    throw UsageError("endpoint max_in_flight must be in [1, 1024]");
  }
}

nlohmann::ordered_json chat_request_json(
    const LlmEndpoint& endpoint, std::span<const ChatMessage> messages) {
  nlohmann::ordered_json j;
  j["model"] = endpoint.model;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& m : messages) {
    nlohmann::ordered_json msg;
    msg["role"] = role_name(m.role);
    msg["content"] = m.content;
    arr.push_back(std::move(msg));
  }
  j["messages"] = std::move(arr);
  j["temperature"] = endpoint.temperature;
  return j;
}

std::string parse_chat_response(std::string_view body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("response is not JSON: ") + e.what());
  }
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw TransportError("response lacks choices[0].message.content: " +
                         std::string(body.substr(0, 200)));
  }
}

// --- HTTP ---------------------------------------------------------------

HttpChatClient::HttpChatClient(LlmEndpoint endpoint)
    : endpoint_(std::move(endpoint)),
      in_flight_(std::max(1, std::min(1024, endpoint_.max_in_flight))) {
  validate_endpoint(endpoint_);
  const std::string& url = endpoint_.url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos ||
      (url.compare(0, scheme_end, "http") != 0 &&
       url.compare(0, scheme_end, "https") != 0)) {
    throw UsageError("endpoint URL must start with http:// or https://: " +
                     url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = url;
    path_ = "/";
  } else {
    scheme_host_port_ = url.substr(0, path_start);
    path_ = url.substr(path_start);
  }
}

std::string HttpChatClient::complete(std::span<const ChatMessage> messages) {
  std::string body = chat_request_json(endpoint_, messages).dump();
  httplib::Headers headers;
  if (const char* key = std::getenv(endpoint_.api_key_env.c_str());
      key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{in_flight_};

  httplib::Client client(scheme_host_port_);
  auto secs = static_cast<time_t>(endpoint_.timeout_seconds);
  auto usecs = static_cast<time_t>(
      (endpoint_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  auto res = client.Post(path_, headers, body, "application/json");
  if (!res) {
    throw TransportError("request to " + endpoint_.url + " failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("endpoint " + endpoint_.url + " returned HTTP " +
                         std::to_string(res->status) + ": " +
                         res->body.substr(0, 200));
  }
  return parse_chat_response(res->body);
}

// --- mock -----------------------------------------------------------------

MockChatClient::MockChatClient(std::vector<MockRule> rules,
                               std::string default_response, int max_retries)
    : rules_(std::move(rules)),
      default_response_(std::move(default_response)),
      max_retries_(max_retries) {}

std::unique_ptr<MockChatClient> MockChatClient::load(std::istream& in) {
  try {
    return load_yaml(YAML::Load(in));
  } catch (const YAML::Exception& e) {
    throw ParseError(e.mark.line + 1, std::string("mock fixture: ") + e.what());
  }
}

std::unique_ptr<MockChatClient> MockChatClient::load_yaml(
    const YAML::Node& root) {
  YAML::Node rules_node = root;
  std::string fallback;
  if (root.IsMap()) {
    rules_node = root["rules"];
    if (root["default"]) fallback = root["default"].as<std::string>();
  }
  std::vector<MockRule> rules;
  if (rules_node && !rules_node.IsNull()) {
    if (!rules_node.IsSequence()) {
      throw ParseError(0, "mock fixture: rules must be a list");
    }
    for (const auto& r : rules_node) {
      if (!r.IsMap() || !r["match"] || !r["response"]) {
        throw ParseError(r.Mark().line + 1,
                         "mock fixture: each rule needs match and response");
      }
      rules.push_back({r["match"].as<std::string>(),
                       r["response"].as<std::string>()});
    }
  }
  return std::make_unique<MockChatClient>(std::move(rules),
                                          std::move(fallback));
}

std::unique_ptr<MockChatClient> MockChatClient::load_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mock fixture '" + path + "'");
  return load(in);
}

std::string MockChatClient::complete(std::span<const ChatMessage> messages) {
  ++calls_;
  std::string_view last = messages.empty() ? std::string_view{}
                                           : messages.back().content;
  for (const auto& rule : rules_) {
    if (last.find(rule.match) != std::string_view::npos) return rule.response;
  }
  return default_response_;
}

}  // namespace pseudokit

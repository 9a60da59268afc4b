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

#include <gtest/gtest.h>

#include <chrono>
#include <future>
#include <string>

#include "pseudokit/detect.h"
#include "pseudokit/error.h"
#include "pseudokit/rewrite.h"

namespace pseudokit {
namespace {

std::string fake(const std::string& args) {
  return std::string(PSEUDOKIT_FAKE_NER) + " " + args;
}

Document doc(std::string id, std::string text) {
  return Document{std::move(id), std::move(text), std::nullopt};
}

TEST(ExternalDetector, ParsesAndResolvesResponses) {
  ExternalDetector d(fake("lexicon York=LOC 'New York=LOC' Zürich=LOC"));
  auto spans = d.detect(doc("a", "From New York to Zürich"));
  EXPECT_EQ(spans,
            (std::vector<EntitySpan>{{5, 13, EntityCategory::kLoc, "New York"},
                                     {17, 23, EntityCategory::kLoc, "Zürich"}}));
  // The worker is reused across documents.
  EXPECT_TRUE(d.detect(doc("b", "nothing")).empty());
  EXPECT_EQ(d.describe().rfind("external:", 0), 0u);
}

TEST(ExternalDetector, PoolServesConcurrentDocuments) {
  ExternalDetector d(fake("lexicon Ann=PER"), {3, 10000});
  std::vector<Document> docs;
  for (int i = 0; i < 40; ++i) {
    docs.push_back(doc("d" + std::to_string(i), "Ann met Ann " + std::to_string(i)));
  }
  std::vector<std::size_t> counts(docs.size());
  parallel_for(docs.size(), 4, [&](std::size_t i) {
    counts[i] = d.detect(docs[i]).size();
  });
  for (auto c : counts) EXPECT_EQ(c, 2u);
}

TEST(ExternalDetector, BadHandshakeFailsAtStartup) {
  EXPECT_THROW(ExternalDetector(fake("nohandshake")), DetectorError);
  try {
    ExternalDetector d(fake("quit"));
    FAIL();
  } catch (const DetectorError& e) {
    EXPECT_NE(std::string(e.what()).find("refusing to start"),
              std::string::npos);
  }
  EXPECT_THROW(ExternalDetector("/nonexistent/ner-binary"), DetectorError);
}

TEST(ExternalDetector, CrashCarriesDiagnostics) {
  ExternalDetector d(fake("crash"));
  try {
    d.detect(doc("a", "text"));
    FAIL();
  } catch (const DetectorError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("segfault simulated"), std::string::npos) << msg;
    EXPECT_NE(msg.find("3"), std::string::npos);
  }
  // A broken worker is replaced on the next call.
  EXPECT_THROW(d.detect(doc("b", "text")), DetectorError);
}

TEST(ExternalDetector, ProtocolViolations) {
  ExternalDetector garbage(fake("garbage"));
  EXPECT_THROW(garbage.detect(doc("a", "x")), DetectorError);
  ExternalDetector wrongid(fake("wrongid"));
  EXPECT_THROW(wrongid.detect(doc("a", "x")), DetectorError);
  ExternalDetector badspan(fake("badspan"));
  EXPECT_THROW(badspan.detect(doc("a", "x")), DetectorError);
}

TEST(ExternalDetector, EmptyTextRejected) {
  ExternalDetector d(fake("lexicon"));
  EXPECT_THROW(d.detect(doc("a", "")), DetectorError);
}

TEST(ExternalDetector, Timeout) {
  ExternalDetector d(fake("slow"), {1, 200});
  auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(d.detect(doc("a", "x")), DetectorError);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(4));
}

}  // namespace
}  // namespace pseudokit

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

#include "pseudokit/eval.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <regex>

#include "pseudokit/detect.h"
#include "pseudokit/error.h"
#include "pseudokit/rewrite.h"
#include "test_util.h"

namespace pseudokit {
namespace {

// Independent oracle for ASCII corpora: std::regex word boundaries.
std::array<LeakageCount, 3> regex_counts(std::span<const Document> gold,
                                         std::span<const Document> rewritten) {
  std::array<LeakageCount, 3> out{};
  for (const auto& g : gold) {
    auto it = std::find_if(rewritten.begin(), rewritten.end(),
                           [&](const Document& r) { return r.id == g.id; });
    for (const auto& s : *g.gold_spans) {
      std::string escaped;
      for (char c : s.surface) {
        if (std::string_view("\\^$.|?*+()[]{}").find(c) != std::string_view::npos) {
          escaped += '\\';
        }
        escaped += c;
      }
      std::regex re("\\b" + escaped + "\\b");
      auto& c = out[static_cast<std::size_t>(s.category)];
      ++c.total;
      if (std::regex_search(it->text, re)) ++c.leaked;
    }
  }
  return out;
}

TEST(Leakage, SingleDocExample) {
  std::string text = "Sarah lives in London.";
  std::vector<Document> gold{{"a", text,
                              std::vector<EntitySpan>{
                                  make_span(text, 0, 5, EntityCategory::kPer),
                                  make_span(text, 15, 21, EntityCategory::kLoc)}}};
  std::vector<Document> rw{{"a", "Sophie lives in London.", std::nullopt}};
  auto r = leakage_report(gold, rw);
  EXPECT_DOUBLE_EQ(r.at(EntityCategory::kPer).rate(), 0.0);
  EXPECT_DOUBLE_EQ(r.at(EntityCategory::kLoc).rate(), 100.0);
  EXPECT_DOUBLE_EQ(r.micro_mean, 50.0);
  EXPECT_DOUBLE_EQ(r.macro_mean, 50.0);
  EXPECT_EQ(r.at(EntityCategory::kOrg).total, 0u);
}

TEST(Leakage, MixedFixture) {
  auto gold = testing::load_docs(testing::data_path("leakage_gold.jsonl"));
  auto rw = testing::load_docs(testing::data_path("leakage_rewritten.jsonl"));
  for (bool fold : {false, true}) {
    auto r = leakage_report(gold, rw, {fold, 2});
    EXPECT_EQ(r.at(EntityCategory::kPer).leaked, 3u);
    EXPECT_EQ(r.at(EntityCategory::kPer).total, 5u);
    EXPECT_EQ(r.at(EntityCategory::kOrg).leaked, 1u);
    EXPECT_EQ(r.at(EntityCategory::kOrg).total, 2u);
    EXPECT_EQ(r.at(EntityCategory::kLoc).leaked, 1u);
    EXPECT_EQ(r.at(EntityCategory::kLoc).total, 4u);
    EXPECT_NEAR(r.micro_mean, 500.0 / 11.0, 1e-9);
    EXPECT_NEAR(r.macro_mean, 45.0, 1e-9);
    auto oracle = regex_counts(gold, rw);
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_EQ(r.per_category[c].leaked, oracle[c].leaked);
      EXPECT_EQ(r.per_category[c].total, oracle[c].total);
    }
  }
}

TEST(Leakage, FoldCase) {
  std::string text = "Berlin";
  std::vector<Document> gold{
      {"a", text,
       std::vector<EntitySpan>{make_span(text, 0, 6, EntityCategory::kLoc)}}};
  std::vector<Document> rw{{"a", "visit BERLIN", std::nullopt}};
  EXPECT_EQ(leakage_report(gold, rw).micro_mean, 0.0);
  EXPECT_EQ(leakage_report(gold, rw, {true, 1}).micro_mean, 100.0);
}

TEST(Leakage, SanitizedGoldDoesNotLeak) {
  auto docs = testing::load_docs(testing::data_path("fixture_corpus.jsonl"));
  docs.resize(300);
  std::vector<Document> rw;
  for (const auto& d : docs) rw.push_back(sanitize(d, *d.gold_spans).as_document());
  auto r = leakage_report(docs, rw, {false, 4});
  for (const auto& c : r.per_category) EXPECT_EQ(c.leaked, 0u);
  EXPECT_EQ(r.micro_mean, 0.0);
  auto identity = leakage_report(docs, docs);
  EXPECT_EQ(identity.micro_mean, 100.0);
}

TEST(Leakage, Errors) {
  std::vector<Document> gold{{"a", "x", std::vector<EntitySpan>{}},
                             {"b", "y", std::vector<EntitySpan>{}}};
  std::vector<Document> rw{{"a", "x", std::nullopt}, {"c", "z", std::nullopt}};
  try {
    leakage_report(gold, rw);
    FAIL();
  } catch (const Error& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("b (gold only)"), std::string::npos);
    EXPECT_NE(msg.find("c (rewritten only)"), std::string::npos);
  }
  std::vector<Document> nospans{{"a", "x", std::nullopt}};
  std::vector<Document> rw1{{"a", "x", std::nullopt}};
  EXPECT_THROW(leakage_report(nospans, rw1), Error);
}

TEST(Leakage, EmptyCorpus) {
  auto r = leakage_report({}, {});
  EXPECT_EQ(r.micro_mean, 0.0);
  EXPECT_EQ(r.macro_mean, 0.0);
}

TEST(LeakageProperty, MatchesOracleAndBounds) {
  std::mt19937 gen(17);
  const std::vector<std::string> words = {"Ann", "Bo", "Cyd", "ann", "Annex",
                                          "the", "Bo-Cyd", "X"};
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<Document> gold, rw;
    for (int d = 0, nd = 1 + static_cast<int>(gen() % 5); d < nd; ++d) {
      std::string text;
      std::vector<EntitySpan> spans;
      for (int w = 0, nw = 1 + static_cast<int>(gen() % 8); w < nw; ++w) {
        if (!text.empty()) text += ' ';
        const auto& word = words[gen() % words.size()];
        if (gen() % 2) {
          spans.push_back(make_span(text + word, text.size(),
                                    text.size() + word.size(),
                                    static_cast<EntityCategory>(gen() % 3)));
        }
        text += word;
      }
      std::string other;
      for (int w = 0, nw = static_cast<int>(gen() % 8); w < nw; ++w) {
        other += words[gen() % words.size()] + (gen() % 2 ? " " : ".");
      }
      std::string id = "d" + std::to_string(d);
      gold.push_back({id, text, spans});
      rw.push_back({id, other, std::nullopt});
    }
    std::shuffle(rw.begin(), rw.end(), gen);
    auto r = leakage_report(gold, rw, {false, 1 + gen() % 3});
    auto oracle = regex_counts(gold, rw);
    double lo = 100, hi = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      ASSERT_EQ(r.per_category[c].leaked, oracle[c].leaked);
      ASSERT_EQ(r.per_category[c].total, oracle[c].total);
      ASSERT_LE(r.per_category[c].leaked, r.per_category[c].total);
      if (r.per_category[c].total > 0) {
        lo = std::min(lo, r.per_category[c].rate());
        hi = std::max(hi, r.per_category[c].rate());
      }
    }
    if (hi >= lo) {
      EXPECT_GE(r.micro_mean, lo - 1e-9);
      EXPECT_LE(r.micro_mean, hi + 1e-9);
      EXPECT_GE(r.macro_mean, lo - 1e-9);
      EXPECT_LE(r.macro_mean, hi + 1e-9);
    }
  }
}

TEST(LeakageJson, RowAndTable) {
  auto gold = testing::load_docs(testing::data_path("leakage_gold.jsonl"));
  auto rw = testing::load_docs(testing::data_path("leakage_rewritten.jsonl"));
  auto r = leakage_report(gold, rw);
  auto row = leakage_row_json(r, "sys");
  std::vector<std::string> keys;
  for (auto it = row.begin(); it != row.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"system", "PER", "ORG", "LOC",
                                            "micro", "macro", "counts"}));
  EXPECT_DOUBLE_EQ(row["LOC"].get<double>(), 25.0);
  EXPECT_EQ(row["counts"]["PER"]["leaked"], 3);
  std::vector<std::pair<std::string, LeakageReport>> rows{{"a", r}, {"b", r}};
  auto table = leakage_table_json(rows);
  EXPECT_EQ(table["rows"].size(), 2u);
  EXPECT_EQ(table["columns"][0], "PER");
}

}  // namespace
}  // namespace pseudokit

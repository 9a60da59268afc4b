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

#include "pseudokit/detect.h"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "pseudokit/error.h"
#include "pseudokit/text.h"
#include "test_util.h"

namespace pseudokit {
namespace {

constexpr auto kPer = EntityCategory::kPer;
constexpr auto kLoc = EntityCategory::kLoc;
constexpr auto kOrg = EntityCategory::kOrg;

Document worked_example() {
  return testing::load_docs(testing::data_path("worked_example.jsonl")).at(0);
}

TEST(Oracle, ReplaysGoldSpans) {
  Document d = worked_example();
  OracleDetector oracle;
  auto spans = oracle.detect(d);
  EXPECT_EQ(spans, *d.gold_spans);
  ASSERT_EQ(spans.size(), 5u);
  EXPECT_EQ(spans[1].surface, "The Times");
  EXPECT_EQ(oracle.detect(d), spans);
}

TEST(Oracle, RequiresGold) {
  EXPECT_THROW(OracleDetector().detect(Document{"x", "text", std::nullopt}),
               DetectorError);
}

TEST(Gazetteer, FindsEveryOccurrence) {
  Gazetteer g({{"London", kLoc}});
  auto spans = g.match("London calling from London");
  EXPECT_EQ(spans, (std::vector<EntitySpan>{{0, 6, kLoc, "London"},
                                            {20, 26, kLoc, "London"}}));
}

TEST(Gazetteer, NoHits) {
  Gazetteer g({{"London", kLoc}});
  EXPECT_TRUE(g.match("nothing here").empty());
}

TEST(Gazetteer, LongestMatchShadows) {
  Gazetteer g({{"New York", kLoc}, {"York", kLoc}});
  EXPECT_EQ(g.match("New York"),
            (std::vector<EntitySpan>{{0, 8, kLoc, "New York"}}));
}

TEST(Gazetteer, WordBoundary) {
  Gazetteer on({{"Ann", kPer}});
  EXPECT_TRUE(on.match("Annual").empty());
  Gazetteer off({{"Ann", kPer}}, {true, false});
  EXPECT_EQ(off.match("Annual").size(), 1u);
}

TEST(Gazetteer, CaseInsensitive) {
  Gazetteer g({{"google", kOrg}}, {false, true});
  EXPECT_EQ(g.match("Google"),
            (std::vector<EntitySpan>{{0, 6, kOrg, "Google"}}));
  Gazetteer strict({{"google", kOrg}});
  EXPECT_TRUE(strict.match("Google").empty());
}

TEST(Gazetteer, RejectsBadEntries) {
  EXPECT_THROW(Gazetteer({{"", kPer}}), Error);
  EXPECT_THROW(Gazetteer({{"Paris", kPer}, {"Paris", kLoc}}), Error);
  EXPECT_THROW(Gazetteer({{"Paris", kPer}, {"PARIS", kLoc}}, {false, true}),
               Error);
  EXPECT_NO_THROW(Gazetteer({{"Paris", kPer}, {"PARIS", kLoc}}));
}

TEST(Gazetteer, LoadsTsv) {
  std::istringstream in("# comment\nLondon\tLOC\n\nThe Times\tORG\n");
  Gazetteer g = Gazetteer::load(in);
  EXPECT_EQ(g.size(), 2u);
  std::istringstream bad("London LOC\n");
  EXPECT_THROW(Gazetteer::load(bad), ParseError);
  std::istringstream badcat("London\tCITY\n");
  EXPECT_THROW(Gazetteer::load(badcat), ParseError);
}

TEST(Gazetteer, ShippedLexiconCoversWorkedExample) {
  Gazetteer g = Gazetteer::load_file(testing::data_path("lexicon.tsv"));
  Document d = worked_example();
  EXPECT_EQ(g.match(d.text), *d.gold_spans);
}

// Matching is invariant under unrelated padding, modulo the offset shift.
TEST(Gazetteer, ShiftInvariance) {
  Gazetteer g({{"New York", kLoc}, {"York", kLoc}, {"Ann", kPer},
               {"Annabel", kPer}, {"Bank of England", kOrg},
               {"England", kLoc}, {"Zürich", kLoc}});
  const std::vector<std::string> words = {
      "New", "York", "Ann", "Annabel", "Bank", "of", "England", "Zürich",
      "the", "and", ",", "."};
  std::mt19937 gen(3);
  for (int iter = 0; iter < 500; ++iter) {
    std::string text;
    for (int i = 0, n = 1 + static_cast<int>(gen() % 10); i < n; ++i) {
      if (i) text += ' ';
      text += words[gen() % words.size()];
    }
    std::string pad = gen() % 2 ? "zzz qq é " : "- ";
    std::string post = gen() % 2 ? " tail text" : "";
    auto base = g.match(text);
    auto shifted = g.match(pad + text + post);
    const std::size_t delta = utf8_length(pad);
    ASSERT_EQ(base.size(), shifted.size()) << text;
    for (std::size_t i = 0; i < base.size(); ++i) {
      EXPECT_EQ(base[i].start + delta, shifted[i].start);
      EXPECT_EQ(base[i].end + delta, shifted[i].end);
      EXPECT_EQ(base[i].surface, shifted[i].surface);
    }
    EXPECT_NO_THROW(validate_sorted_spans(text, base));
  }
}

TEST(ResolveOverlaps, LongerWins) {
  EXPECT_EQ(resolve_overlaps({{0, 8, kOrg, "Acme Ltd"}, {4, 8, kLoc, " Ltd"}}),
            (std::vector<EntitySpan>{{0, 8, kOrg, "Acme Ltd"}}));
}

TEST(ResolveOverlaps, DisjointUnchanged) {
  std::vector<EntitySpan> s = {{0, 2, kPer, "ab"}, {3, 5, kLoc, "cd"}};
  EXPECT_EQ(resolve_overlaps({s[1], s[0]}), s);
}

TEST(ResolveOverlaps, CategoryTieBreak) {
  EXPECT_EQ(resolve_overlaps({{0, 4, kLoc, "John"}, {0, 4, kPer, "John"}}),
            (std::vector<EntitySpan>{{0, 4, kPer, "John"}}));
  EXPECT_EQ(resolve_overlaps({{0, 4, kOrg, "John"}, {0, 4, kLoc, "John"}}),
            (std::vector<EntitySpan>{{0, 4, kLoc, "John"}}));
}

TEST(ResolveOverlaps, EarlierStartTieBreak) {
  EXPECT_EQ(resolve_overlaps({{2, 5, kPer, "cde"}, {0, 3, kPer, "abc"}}),
            (std::vector<EntitySpan>{{0, 3, kPer, "abc"}}));
}

TEST(ResolveOverlaps, RandomOutputIsValid) {
  std::mt19937 gen(9);
  for (int iter = 0; iter < 1000; ++iter) {
    std::vector<EntitySpan> spans;
    for (int i = 0, n = static_cast<int>(gen() % 8); i < n; ++i) {
      std::size_t s = gen() % 20, len = 1 + gen() % 6;
      spans.push_back({s, s + len, static_cast<EntityCategory>(gen() % 3), ""});
    }
    auto out = resolve_overlaps(spans);
    for (std::size_t i = 1; i < out.size(); ++i) {
      EXPECT_LE(out[i - 1].end, out[i].start);
    }
    // Every dropped span overlaps a kept span that is at least as long.
    for (const auto& s : spans) {
      bool ok = false;
      for (const auto& k : out) {
        if (k == s || (overlaps(k, s) && k.length() >= s.length())) ok = true;
      }
      EXPECT_TRUE(ok);
    }
  }
}

TEST(DetectorSpec, Parses) {
  EXPECT_EQ(parse_detector_spec("oracle").kind, DetectorKind::kOracle);
  auto g = parse_detector_spec("gazetteer:/tmp/lex.tsv");
  EXPECT_EQ(g.kind, DetectorKind::kGazetteer);
  EXPECT_EQ(g.argument, "/tmp/lex.tsv");
  auto x = parse_detector_spec("external:python3 ner.py --x");
  EXPECT_EQ(x.kind, DetectorKind::kExternal);
  EXPECT_EQ(x.argument, "python3 ner.py --x");
  EXPECT_THROW(parse_detector_spec("spacy"), UsageError);
  EXPECT_THROW(parse_detector_spec("gazetteer:"), UsageError);
}

TEST(DetectorSpec, MakesGazetteerDetector) {
  auto d = make_detector(
      parse_detector_spec("gazetteer:" + testing::data_path("lexicon.tsv")));
  Document doc = worked_example();
  EXPECT_EQ(detect(doc, *d), *doc.gold_spans);
}

}  // namespace
}  // namespace pseudokit

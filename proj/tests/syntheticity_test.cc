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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "pseudokit/error.h"
#include "pseudokit/eval.h"
#include "pseudokit/text.h"

namespace pseudokit {
namespace {

constexpr auto kOrig = SynthLabel::kOriginal;
constexpr auto kRew = SynthLabel::kRewritten;

std::vector<LabeledText> toy_set() {
  std::vector<LabeledText> out;
  const char* frames[] = {"I went to %s today", "%s is lovely in May",
                          "we met near %s", "a letter from %s arrived",
                          "rain again over %s"};
  for (int i = 0; i < 40; ++i) {
    std::string f = frames[i % 5];
    auto at = f.find("%s");
    out.push_back({f.substr(0, at) + "London" + f.substr(at + 2), kOrig});
    out.push_back({f.substr(0, at) + "PERSON_1" + f.substr(at + 2), kRew});
  }
  return out;
}

TEST(Features, NgramCountsAreNormalized) {
  TrainConfig c;
  c.hash_bits = 20;
  auto f = extract_features("abab", c);
  // Grams: ab, ba, ab, aba, bab, abab -> counts {2,1,1,1,1}.
  std::map<std::uint32_t, double> want;
  for (std::string g : {"ab", "ba", "ab", "aba", "bab", "abab"}) {
    want[static_cast<std::uint32_t>(fnv1a64(g)) & ((1u << 20) - 1)] += 1;
  }
  double norm = std::sqrt(4.0 + 4.0);
  ASSERT_EQ(f.size(), want.size());
  for (const auto& sf : f) {
    EXPECT_NEAR(sf.value, want.at(sf.index) / norm, 1e-12);
  }
  EXPECT_TRUE(std::is_sorted(f.begin(), f.end(),
                             [](auto& a, auto& b) { return a.index < b.index; }));
  EXPECT_TRUE(extract_features("", c).empty());
  EXPECT_TRUE(extract_features("x", c).empty());
  // Code points, not bytes: "éé" is one bigram.
  EXPECT_EQ(extract_features("éé", c).size(), 1u);
}

TEST(Config, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(validate_config(c));
  c.hash_bits = 30;
  EXPECT_THROW(validate_config(c), UsageError);
  c = {};
  c.learning_rate = 0;
  EXPECT_THROW(validate_config(c), UsageError);
  c = {};
  c.min_n = 3;
  c.max_n = 2;
  EXPECT_THROW(validate_config(c), UsageError);
}

TEST(Train, SeparableToySet) {
  auto data = toy_set();
  auto m = train_syntheticity(data, TrainConfig{}, 5);
  ASSERT_EQ(m.epoch_losses.size(), 20u);
  for (std::size_t i = 1; i < m.epoch_losses.size(); ++i) {
    EXPECT_LE(m.epoch_losses[i], m.epoch_losses[i - 1] + 1e-12);
  }
  auto r = evaluate_syntheticity(m, data);
  EXPECT_EQ(r.tp + r.tn, data.size());
  EXPECT_GT(classify_syntheticity(m, "I went to PERSON_1 today").probability,
            0.9);
  EXPECT_EQ(classify_syntheticity(m, "I went to London today").label, kOrig);
}

TEST(Train, Deterministic) {
  auto data = toy_set();
  TrainConfig c;
  auto a = train_syntheticity(data, c, 9, 1);
  auto b = train_syntheticity(data, c, 9, 4);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(Train, SingleClassRejected) {
  std::vector<LabeledText> data{{"a", kOrig}, {"b", kOrig}};
  EXPECT_THROW(train_syntheticity(data, TrainConfig{}, 1), Error);
}

// Full-batch training is order free, so a dense reference implementation must
// agree with it.
TEST(Train, MatchesDenseReferenceFullBatch) {
  auto data = toy_set();
  TrainConfig c;
  c.hash_bits = 10;
  c.epochs = 5;
  c.learning_rate = 0.7;
  c.batch_size = static_cast<int>(data.size());
  auto m = train_syntheticity(data, c, 3);

  const std::size_t width = 1u << 10;
  std::vector<std::vector<double>> x;
  for (const auto& d : data) {
    std::vector<double> row(width, 0.0);
    auto cps = utf8_decode(d.text);
    for (int n = 2; n <= 4; ++n) {
      for (std::size_t i = 0; i + n <= cps.size(); ++i) {
        auto g = utf8_encode(std::u32string_view(cps).substr(i, n));
        row[fnv1a64(g) & (width - 1)] += 1;
      }
    }
    double norm = 0;
    for (double v : row) norm += v * v;
    for (double& v : row) v /= std::sqrt(norm);
    x.push_back(row);
  }
  std::vector<double> w(width, 0.0);
  double b = 0;
  for (int epoch = 1; epoch <= 5; ++epoch) {
    double lr = 0.7 / std::sqrt(epoch);
    std::vector<double> gw(width, 0.0);
    double gb = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      double z = b;
      for (std::size_t j = 0; j < width; ++j) z += w[j] * x[i][j];
      double r = 1 / (1 + std::exp(-z)) - (data[i].label == kRew ? 1 : 0);
      for (std::size_t j = 0; j < width; ++j) gw[j] += r * x[i][j];
      gb += r;
    }
    for (std::size_t j = 0; j < width; ++j) w[j] -= lr * gw[j];
    b -= lr * gb;
  }
  for (std::size_t j = 0; j < width; ++j) ASSERT_NEAR(m.weights[j], w[j], 1e-9);
  EXPECT_NEAR(m.bias, b, 1e-9);
}

TEST(Train, DuplicatedDataKeepsSignPattern) {
  auto data = toy_set();
  auto doubled = data;
  doubled.insert(doubled.end(), data.begin(), data.end());
  TrainConfig c;
  c.hash_bits = 12;
  c.batch_size = static_cast<int>(data.size());
  c.epochs = 10;
  c.learning_rate = 0.05;
  auto a = train_syntheticity(data, c, 1);
  // Same summed gradient at half the step.
  c.batch_size *= 2;
  c.learning_rate /= 2;
  auto b = train_syntheticity(doubled, c, 1);
  for (std::size_t j = 0; j < a.weights.size(); ++j) {
    if (std::abs(a.weights[j]) < 1e-9) continue;
    EXPECT_EQ(std::signbit(a.weights[j]), std::signbit(b.weights[j])) << j;
  }
}

TEST(Train, RandomLabelsGiveChanceAccuracy) {
  std::mt19937 gen(8);
  std::vector<LabeledText> data;
  for (int i = 0; i < 2000; ++i) {
    data.push_back({"the same sentence", gen() % 2 ? kRew : kOrig});
  }
  auto exp = run_synth_experiment(data, TrainConfig{}, 13, 0.5);
  ASSERT_EQ(exp.heldout_items, 1000u);
  const auto& h = exp.heldout;
  double acc = 100.0 * static_cast<double>(h.tp + h.tn) / 1000.0;
  EXPECT_NEAR(acc, 50.0, 5.0);
}

TEST(Classify, ZeroModel) {
  auto m = SyntheticityModel::zeros(TrainConfig{});
  auto c = classify_syntheticity(m, "anything");
  EXPECT_EQ(c.probability, 0.5);
  EXPECT_EQ(c.label, kOrig);
  m.bias = 1.5;
  EXPECT_NEAR(classify_syntheticity(m, "").probability,
              1 / (1 + std::exp(-1.5)), 1e-12);
  EXPECT_EQ(classify_syntheticity(m, "").label, kRew);
}

TEST(Model, SaveLoadRoundTrip) {
  auto m = train_syntheticity(toy_set(), TrainConfig{}, 2);
  std::stringstream ss;
  m.save(ss);
  auto back = SyntheticityModel::load(ss);
  EXPECT_EQ(back.weights, m.weights);
  EXPECT_EQ(back.bias, m.bias);
  EXPECT_EQ(back.epoch_losses, m.epoch_losses);
  EXPECT_EQ(back.config.hash_bits, m.config.hash_bits);
  std::stringstream bad(R"({"format":"other"})");
  EXPECT_THROW(SyntheticityModel::load(bad), Error);
}

TEST(Prf, Examples) {
  std::vector<SynthLabel> pred{kRew, kRew, kRew, kRew, kOrig, kOrig};
  std::vector<SynthLabel> gold{kRew, kRew, kRew, kOrig, kRew, kOrig};
  auto r = prf(pred, gold);
  EXPECT_EQ(r.tp, 3u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn, 1u);
  EXPECT_EQ(r.tn, 1u);
  EXPECT_DOUBLE_EQ(r.precision, 75.0);
  EXPECT_DOUBLE_EQ(r.recall, 75.0);
  EXPECT_DOUBLE_EQ(r.f_score, 75.0);
  EXPECT_FALSE(r.degenerate);

  std::vector<SynthLabel> none(4, kOrig);
  auto d = prf(none, none);
  EXPECT_TRUE(d.degenerate);
  EXPECT_EQ(d.f_score, 0.0);
  std::vector<SynthLabel> short_pred(3, kOrig);
  EXPECT_THROW(prf(short_pred, none), Error);
}

TEST(Prf, PermutationInvariant) {
  std::mt19937 gen(3);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<std::pair<SynthLabel, SynthLabel>> v(1 + gen() % 30);
    for (auto& [p, g] : v) {
      p = gen() % 2 ? kRew : kOrig;
      g = gen() % 2 ? kRew : kOrig;
    }
    auto score = [&] {
      std::vector<SynthLabel> p, g;
      for (auto& [a, b] : v) {
        p.push_back(a);
        g.push_back(b);
      }
      return prf(p, g);
    };
    auto a = score();
    std::shuffle(v.begin(), v.end(), gen);
    auto b = score();
    EXPECT_EQ(a.f_score, b.f_score);
    EXPECT_EQ(a.tp, b.tp);
  }
}

TEST(Split, DeterministicPartition) {
  auto [tr, te] = split_indices(100, 0.9, 4);
  EXPECT_EQ(tr.size(), 90u);
  EXPECT_EQ(te.size(), 10u);
  std::vector<std::size_t> all = tr;
  all.insert(all.end(), te.begin(), te.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(all[i], i);
  EXPECT_EQ(split_indices(100, 0.9, 4).first, tr);
  EXPECT_NE(split_indices(100, 0.9, 5).first, tr);
  EXPECT_EQ(split_indices(10, 1.0, 1).second.size(), 0u);
  EXPECT_THROW(split_indices(10, 0.0, 1), Error);
}

TEST(Experiment, PairsStayTogether) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < 50; ++i) {
    pairs.emplace_back("Alice " + std::to_string(i) + " met Bob",
                       "PERSON_1 " + std::to_string(i) + " met PERSON_2");
  }
  auto exp = run_synth_experiment(pairs, TrainConfig{}, 6, 0.8);
  EXPECT_EQ(exp.train_items, 80u);
  EXPECT_EQ(exp.heldout_items, 20u);
  EXPECT_EQ(exp.heldout.tp + exp.heldout.fn, 10u);
  EXPECT_EQ(exp.heldout.tn + exp.heldout.fp, 10u);
}

TEST(LabeledJsonl, RoundTripAndErrors) {
  std::vector<LabeledText> data{{"a\"b", kOrig}, {"ü", kRew}};
  std::stringstream ss;
  write_labeled_jsonl(ss, data);
  auto back = read_labeled_jsonl(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].text, "a\"b");
  EXPECT_EQ(back[1].label, kRew);
  std::stringstream bad(R"({"text":"x","label":"maybe"})");
  EXPECT_THROW(read_labeled_jsonl(bad), Error);
  std::stringstream extra(R"({"text":"x","label":"original","z":1})");
  EXPECT_THROW(read_labeled_jsonl(extra), Error);
}

}  // namespace
}  // namespace pseudokit

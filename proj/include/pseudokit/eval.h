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

// Privacy leakage (false-negative rate per entity type) and a hashed
// character n-gram logistic-regression detector for rewritten text.

#ifndef PSEUDOKIT_EVAL_H_
#define PSEUDOKIT_EVAL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pseudokit/corpus.h"

namespace pseudokit {

// --- leakage ----------------------------------------------------------------

struct LeakageCount {
  std::size_t leaked = 0;
  std::size_t total = 0;
  // Percent; 0 when total == 0.
  double rate() const;
};

struct LeakageReport {
  // Indexed by EntityCategory.
  std::array<LeakageCount, 3> per_category;
  // Total leaked / total entities, in percent.
  double micro_mean = 0;
  // Unweighted mean over categories that have at least one entity.
  double macro_mean = 0;

  const LeakageCount& at(EntityCategory c) const {
    return per_category[static_cast<std::size_t>(c)];
  }
};

struct LeakageOptions {
  bool fold_case = false;
  std::size_t workers = 1;
};

// A gold span leaks when its surface is a word-boundary substring of the
// rewritten text with the same id. Every gold span counts once. Throws Error
// listing ids present in only one corpus, or when a gold doc has no spans
// field.
LeakageReport leakage_report(std::span<const Document> gold,
                             std::span<const Document> rewritten,
                             LeakageOptions options = {});

// One row of a leakage report: {"system", "PER", "ORG", "LOC", "micro",
// "macro", "counts": {...}}.
nlohmann::ordered_json leakage_row_json(const LeakageReport& report,
                                        std::string_view system);
// {"columns": [...], "rows": [row...]}
nlohmann::ordered_json leakage_table_json(
    std::span<const std::pair<std::string, LeakageReport>> rows);

// --- syntheticity -----------------------------------------------------------

enum class SynthLabel { kOriginal = 0, kRewritten = 1 };

std::string_view synth_label_name(SynthLabel l);

struct LabeledText {
  std::string text;
  SynthLabel label = SynthLabel::kOriginal;
};

// JSONL {"text": str, "label": "original"|"rewritten"}.
std::vector<LabeledText> read_labeled_jsonl(std::istream& in);
void write_labeled_jsonl(std::ostream& out, std::span<const LabeledText> data);

struct TrainConfig {
  double learning_rate = 0.1;  // decays as lr / sqrt(epoch)
  int epochs = 20;
  int batch_size = 16;
  int hash_bits = 18;
  int min_n = 2;
  int max_n = 4;
};

// Throws UsageError on out-of-range settings.
void validate_config(const TrainConfig& config);

struct SparseFeature {
  std::uint32_t index;
  double value;
};

// Counts of hashed code-point n-grams (min_n..max_n), L2-normalized, sorted by
// index with duplicates merged.
std::vector<SparseFeature> extract_features(std::string_view text,
                                            const TrainConfig& config);

struct SyntheticityModel {
  TrainConfig config;
  std::vector<double> weights;  // size 2^hash_bits
  double bias = 0;
  std::vector<double> epoch_losses;  // mean log-loss after each epoch

  double final_loss() const {
    return epoch_losses.empty() ? 0.0 : epoch_losses.back();
  }
  std::size_t hash_width() const { return weights.size(); }

  static SyntheticityModel zeros(const TrainConfig& config);

  // JSON with the non-zero weights only.
  void save(std::ostream& out) const;
  static SyntheticityModel load(std::istream& in);
};

// Mini-batch SGD; each step follows the log-loss gradient summed over the
// batch. Records the mean log-loss after every epoch. Shuffles with a
// generator seeded from `seed`. Throws Error when only one label is present. `workers` > 1 extracts
// features in parallel; the result does not depend on it.
SyntheticityModel train_syntheticity(std::span<const LabeledText> data,
                                     const TrainConfig& config,
                                     std::uint64_t seed,
                                     std::size_t workers = 1);

struct Classification {
  SynthLabel label = SynthLabel::kOriginal;
  double probability = 0.5;  // P(rewritten)
};

Classification classify_syntheticity(const SyntheticityModel& model,
                                     std::string_view text);

struct PrfResult {
  double precision = 0;  // percent
  double recall = 0;
  double f_score = 0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  bool degenerate = false;  // some denominator was zero
};

// Precision / recall / F for the rewritten class. Throws Error on a length
// mismatch.
PrfResult prf(std::span<const SynthLabel> predictions,
              std::span<const SynthLabel> gold);

// Deterministic train/held-out split of indices [0, n): a seeded shuffle, the
// first round(n * train_fraction) go to training.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed);

// Predicts every item and scores against its label.
PrfResult evaluate_syntheticity(const SyntheticityModel& model,
                                std::span<const LabeledText> data);

// Texts of documents paired by id, in the order of `originals`. Throws Error
// listing ids present in only one corpus.
std::vector<std::pair<std::string, std::string>> pair_texts(
    std::span<const Document> originals, std::span<const Document> rewritten);

struct SynthExperiment {
  SyntheticityModel model;
  PrfResult heldout;
  std::size_t train_items = 0;
  std::size_t heldout_items = 0;
};

// Splits (original, rewritten) pairs with split_indices so that both sides of
// a pair land in the same fold, trains on the training fold and scores the
// held-out fold.
SynthExperiment run_synth_experiment(
    std::span<const std::pair<std::string, std::string>> pairs,
    const TrainConfig& config, std::uint64_t seed, double train_fraction,
    std::size_t workers = 1);

// Same, splitting individual labeled items.
SynthExperiment run_synth_experiment(std::span<const LabeledText> data,
                                     const TrainConfig& config,
                                     std::uint64_t seed, double train_fraction,
                                     std::size_t workers = 1);

}  // namespace pseudokit

#endif  // PSEUDOKIT_EVAL_H_

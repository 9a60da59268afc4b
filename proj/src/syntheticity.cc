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

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "pseudokit/error.h"
#include "pseudokit/eval.h"
#include "pseudokit/random.h"
#include "pseudokit/rewrite.h"
#include "pseudokit/text.h"

namespace pseudokit {
namespace {

constexpr std::string_view kModelFormat = "pseudokit-syntheticity";
constexpr int kModelVersion = 1;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-z)) without overflow.
double log1pexp_neg(double z) {
  return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double score(const SyntheticityModel& m,
             const std::vector<SparseFeature>& features) {
  double z = m.bias;
  for (const auto& f : features) z += m.weights[f.index] * f.value;
  return z;
}

double log_loss(double z, SynthLabel label) {
  return label == SynthLabel::kRewritten ? log1pexp_neg(z) : log1pexp_neg(-z);
}

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_index(rng, i)]);
  }
}

}  // namespace

std::string_view synth_label_name(SynthLabel l) {
  return l == SynthLabel::kRewritten ? "rewritten" : "original";
}

std::vector<LabeledText> read_labeled_jsonl(std::istream& in) {
  std::vector<LabeledText> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(lineno, "expected an object");
    for (const auto& [key, value] : j.items()) {
      if (key != "text" && key != "label") {
        throw SchemaError(lineno, key, "unknown field");
      }
    }
    if (!j.contains("text") || !j["text"].is_string()) {
      throw SchemaError(lineno, "text", "missing or not a string");
    }
    if (!j.contains("label") || !j["label"].is_string()) {
      throw SchemaError(lineno, "label", "missing or not a string");
    }
    LabeledText item;
    item.text = j["text"].get<std::string>();
    const auto& label = j["label"].get_ref<const std::string&>();
    if (label == "original") {
      item.label = SynthLabel::kOriginal;
    } else if (label == "rewritten") {
      item.label = SynthLabel::kRewritten;
    } else {
      throw SchemaError(lineno, "label",
                        "expected \"original\" or \"rewritten\", got \"" +
                            label + "\"");
    }
    out.push_back(std::move(item));
  }
  return out;
}

void write_labeled_jsonl(std::ostream& out,
                         std::span<const LabeledText> data) {
  for (const auto& item : data) {
    nlohmann::ordered_json j;
    j["text"] = item.text;
    j["label"] = synth_label_name(item.label);
    out << j.dump() << '\n';
  }
}

void validate_config(const TrainConfig& c) {
  if (!(c.learning_rate > 0) || !std::isfinite(c.learning_rate)) {
    throw UsageError("learning rate must be > 0");
  }
  if (c.epochs < 1) throw UsageError("epochs must be >= 1");
  if (c.batch_size < 1) throw UsageError("batch size must be >= 1");
  if (c.hash_bits < 4 || c.hash_bits > 26) {
    throw UsageError("hash bits must be in [4, 26]");
  }
  if (c.min_n < 1 || c.max_n < c.min_n) {
    throw UsageError("n-gram range must satisfy 1 <= min_n <= max_n");
  }
}

std::vector<SparseFeature> extract_features(std::string_view text,
                                            const TrainConfig& config) {
  const auto bounds = utf8_boundaries(text);
  const std::size_t n_cp = bounds.size() - 1;
  const std::uint32_t mask = (1u << config.hash_bits) - 1;
  std::vector<std::uint32_t> hashes;
  for (int n = config.min_n; n <= config.max_n; ++n) {
    const auto un = static_cast<std::size_t>(n);
    if (n_cp < un) break;
    for (std::size_t i = 0; i + un <= n_cp; ++i) {
      auto gram = text.substr(bounds[i], bounds[i + un] - bounds[i]);
      hashes.push_back(static_cast<std::uint32_t>(fnv1a64(gram)) & mask);
    }
  }
  std::sort(hashes.begin(), hashes.end());
  std::vector<SparseFeature> out;
  for (auto h : hashes) {
    if (!out.empty() && out.back().index == h) {
      out.back().value += 1.0;
    } else {
      out.push_back({h, 1.0});
    }
  }
  double norm = 0;
  for (const auto& f : out) norm += f.value * f.value;
  norm = std::sqrt(norm);
  if (norm > 0) {
    for (auto& f : out) f.value /= norm;
  }
  return out;
}

SyntheticityModel SyntheticityModel::zeros(const TrainConfig& config) {
  validate_config(config);
  SyntheticityModel m;
  m.config = config;
  m.weights.assign(std::size_t{1} << config.hash_bits, 0.0);
  return m;
}

void SyntheticityModel::save(std::ostream& out) const {
  nlohmann::ordered_json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["config"] = {{"learning_rate", config.learning_rate},
                 {"epochs", config.epochs},
                 {"batch_size", config.batch_size},
                 {"hash_bits", config.hash_bits},
                 {"min_n", config.min_n},
                 {"max_n", config.max_n}};
  j["hash_width"] = weights.size();
  j["bias"] = bias;
  auto w = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] != 0.0) w.push_back({i, weights[i]});
  }
  j["weights"] = std::move(w);
  j["epoch_losses"] = epoch_losses;
  out << j.dump() << '\n';
}

SyntheticityModel SyntheticityModel::load(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("model file is not JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kModelFormat) {
      throw SchemaError(0, "format", "not a syntheticity model");
    }
    if (j.at("version").get<int>() != kModelVersion) {
      throw SchemaError(0, "version", "unsupported model version");
    }
    TrainConfig c;
    const auto& jc = j.at("config");
    c.learning_rate = jc.at("learning_rate").get<double>();
    c.epochs = jc.at("epochs").get<int>();
    c.batch_size = jc.at("batch_size").get<int>();
    c.hash_bits = jc.at("hash_bits").get<int>();
    c.min_n = jc.at("min_n").get<int>();
    c.max_n = jc.at("max_n").get<int>();
    SyntheticityModel m = zeros(c);
    if (j.at("hash_width").get<std::size_t>() != m.weights.size()) {
      throw SchemaError(0, "hash_width", "does not match hash_bits");
    }
    m.bias = j.at("bias").get<double>();
    for (const auto& pair : j.at("weights")) {
      auto i = pair.at(0).get<std::size_t>();
      if (i >= m.weights.size()) {
        throw SchemaError(0, "weights", "index out of range");
      }
      m.weights[i] = pair.at(1).get<double>();
    }
    m.epoch_losses = j.at("epoch_losses").get<std::vector<double>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("malformed model file: ") + e.what());
  } catch (const UsageError& e) {
    throw SchemaError(0, "config", e.what());
  }
}

SyntheticityModel train_syntheticity(std::span<const LabeledText> data,
                                     const TrainConfig& config,
                                     std::uint64_t seed, std::size_t workers) {
  validate_config(config);
  bool has_original = false, has_rewritten = false;
  for (const auto& d : data) {
    (d.label == SynthLabel::kRewritten ? has_rewritten : has_original) = true;
  }
  if (!has_original || !has_rewritten) {
    throw Error("training corpus needs both original and rewritten texts");
  }

  std::vector<std::vector<SparseFeature>> features(data.size());
  parallel_for(data.size(), workers, [&](std::size_t i) {
    features[i] = extract_features(data[i].text, config);
  });

  SyntheticityModel m = SyntheticityModel::zeros(config);
  Rng rng(seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> residual;
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle(order, rng);
    const double lr = config.learning_rate / std::sqrt(static_cast<double>(epoch));
    for (std::size_t b = 0; b < order.size(); b += batch) {
      const std::size_t e = std::min(order.size(), b + batch);
      // Gradients are taken at the weights from before this batch.
      residual.clear();
      for (std::size_t k = b; k < e; ++k) {
        const std::size_t i = order[k];
        double y = data[i].label == SynthLabel::kRewritten ? 1.0 : 0.0;
        residual.push_back(sigmoid(score(m, features[i])) - y);
      }
      // Summed, not averaged, over the batch.
      for (std::size_t k = b; k < e; ++k) {
        const double r = residual[k - b];
        for (const auto& f : features[order[k]]) {
          m.weights[f.index] -= lr * r * f.value;
        }
        m.bias -= lr * r;
      }
    }
    double loss = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      loss += log_loss(score(m, features[i]), data[i].label);
    }
    m.epoch_losses.push_back(loss / static_cast<double>(data.size()));
  }
  return m;
}

Classification classify_syntheticity(const SyntheticityModel& model,
                                     std::string_view text) {
  double p = sigmoid(score(model, extract_features(text, model.config)));
  return {p > 0.5 ? SynthLabel::kRewritten : SynthLabel::kOriginal, p};
}

PrfResult prf(std::span<const SynthLabel> predictions,
              std::span<const SynthLabel> gold) {
  if (predictions.size() != gold.size()) {
    throw Error("prf: " + std::to_string(predictions.size()) +
                " predictions vs " + std::to_string(gold.size()) +
                " gold labels");
  }
  PrfResult r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    bool p = predictions[i] == SynthLabel::kRewritten;
    bool g = gold[i] == SynthLabel::kRewritten;
    if (p && g) ++r.tp;
    else if (p) ++r.fp;
    else if (g) ++r.fn;
    else ++r.tn;
  }
  auto ratio = [&](std::size_t num, std::size_t den) {
    if (den == 0) {
      r.degenerate = true;
      return 0.0;
    }
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  r.precision = ratio(r.tp, r.tp + r.fp);
  r.recall = ratio(r.tp, r.tp + r.fn);
  if (r.precision + r.recall == 0) {
    r.degenerate = true;
    r.f_score = 0;
  } else {
    r.f_score = 2 * r.precision * r.recall / (r.precision + r.recall);
  }
  return r;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0 && train_fraction <= 1)) {
    throw UsageError("train fraction must be in (0, 1]");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(order, rng);
  auto n_train = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * train_fraction));
  std::vector<std::size_t> train(order.begin(), order.begin() + n_train);
  std::vector<std::size_t> held(order.begin() + n_train, order.end());
  return {std::move(train), std::move(held)};
}

PrfResult evaluate_syntheticity(const SyntheticityModel& model,
                                std::span<const LabeledText> data) {
  std::vector<SynthLabel> predicted, gold;
  predicted.reserve(data.size());
  gold.reserve(data.size());
  for (const auto& item : data) {
    predicted.push_back(classify_syntheticity(model, item.text).label);
    gold.push_back(item.label);
  }
  return prf(predicted, gold);
}

std::vector<std::pair<std::string, std::string>> pair_texts(
    std::span<const Document> originals, std::span<const Document> rewritten) {
  std::map<std::string_view, const Document*> by_id;
  for (const auto& d : rewritten) by_id.emplace(d.id, &d);
  std::vector<std::pair<std::string, std::string>> out;
  std::string missing;
  std::set<std::string_view> seen;
  for (const auto& d : originals) {
    seen.insert(d.id);
    auto it = by_id.find(d.id);
    if (it == by_id.end()) {
      missing += " " + d.id + " (original only)";
      continue;
    }
    out.emplace_back(d.text, it->second->text);
  }
  for (const auto& d : rewritten) {
    if (!seen.contains(d.id)) missing += " " + d.id + " (rewritten only)";
  }
  if (!missing.empty()) throw Error("document ids do not match:" + missing);
  return out;
}

namespace {

SynthExperiment train_and_score(const std::vector<LabeledText>& train,
                                const std::vector<LabeledText>& held,
                                const TrainConfig& config, std::uint64_t seed,
                                std::size_t workers) {
  SynthExperiment ex;
  ex.model = train_syntheticity(train, config, derive_seed(seed, "train"),
                                workers);
  ex.heldout = evaluate_syntheticity(ex.model, held);
  ex.train_items = train.size();
  ex.heldout_items = held.size();
  return ex;
}

}  // namespace

SynthExperiment run_synth_experiment(
    std::span<const std::pair<std::string, std::string>> pairs,
    const TrainConfig& config, std::uint64_t seed, double train_fraction,
    std::size_t workers) {
  auto [train_idx, held_idx] =
      split_indices(pairs.size(), train_fraction, derive_seed(seed, "split"));
  auto expand = [&](const std::vector<std::size_t>& idx) {
    std::vector<LabeledText> out;
    for (auto i : idx) {
      out.push_back({pairs[i].first, SynthLabel::kOriginal});
      out.push_back({pairs[i].second, SynthLabel::kRewritten});
    }
    return out;
  };
  return train_and_score(expand(train_idx), expand(held_idx), config, seed,
                         workers);
}

SynthExperiment run_synth_experiment(std::span<const LabeledText> data,
                                     const TrainConfig& config,
                                     std::uint64_t seed, double train_fraction,
                                     std::size_t workers) {
  auto [train_idx, held_idx] =
      split_indices(data.size(), train_fraction, derive_seed(seed, "split"));
  std::vector<LabeledText> train, held;
  for (auto i : train_idx) train.push_back(data[i]);
  for (auto i : held_idx) held.push_back(data[i]);
  return train_and_score(train, held, config, seed, workers);
}

}  // namespace pseudokit

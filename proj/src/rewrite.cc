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

#include "pseudokit/rewrite.h"

#include <atomic>
#include <exception>
#include <optional>
#include <ostream>
#include <set>
#include <thread>

#include "pseudokit/error.h"
#include "pseudokit/random.h"
#include "pseudokit/text.h"

namespace pseudokit {

std::string_view mode_name(RewriteMode m) {
  return m == RewriteMode::kSanitize ? "sanitize" : "pseudonymize";
}

ConsistencyKey consistency_key(const EntitySpan& span) {
  return {fold_case(std::string_view(span.surface)), span.category};
}

Document RewrittenDocument::as_document() const {
  return Document{id, text, new_spans};
}

SpliceResult apply_replacements(std::string_view text,
                                std::span<const Assignment> assignments) {
  auto bounds = utf8_boundaries(text);
  const std::size_t len = bounds.size() - 1;
  SpliceResult out;
  out.text.reserve(text.size());
  std::size_t cursor = 0;     // code points consumed from `text`
  std::size_t out_len = 0;    // code points written to out.text
  for (const auto& a : assignments) {
    const auto& s = a.span;
    if (s.start >= s.end || s.end > len) {
      throw SpanError("assignment span [" + std::to_string(s.start) + ", " +
                      std::to_string(s.end) + ") outside text of length " +
                      std::to_string(len));
    }
    if (s.start < cursor) {
      throw SpanError("assignment spans overlap or are unsorted at offset " +
                      std::to_string(s.start));
    }
    out.text.append(text.substr(bounds[cursor], bounds[s.start] - bounds[cursor]));
    out_len += s.start - cursor;
    std::size_t sur_len = utf8_length(a.surrogate);
    out.text += a.surrogate;
    out.new_spans.push_back(
        EntitySpan{out_len, out_len + sur_len, s.category, a.surrogate});
    out_len += sur_len;
    cursor = s.end;
  }
  out.text.append(text.substr(bounds[cursor]));
  return out;
}

// --- SurrogateTable -------------------------------------------------------

std::string SurrogateTable::get_or_assign(
    const ConsistencyKey& key, const std::function<std::string()>& make) {
  std::lock_guard lock(mu_);
  auto it = map_.find(key);
  if (it != map_.end()) return it->second;
  std::string value = make();
  map_.emplace(key, value);
  return value;
}

std::string SurrogateTable::next_placeholder(EntityCategory category) {
  int k = ++counters_[static_cast<std::size_t>(category)];
  return std::string(placeholder_word(category)) + "_" + std::to_string(k);
}

std::map<ConsistencyKey, std::string> SurrogateTable::snapshot() const {
  std::lock_guard lock(mu_);
  return map_;
}

// --- sanitize / pseudonymize ------------------------------------------------

namespace {

template <typename MakeSurrogate>
RewrittenDocument rewrite(const Document& doc,
                          std::span<const EntitySpan> spans, RewriteMode mode,
                          std::uint64_t seed, SurrogateTable* shared,
                          MakeSurrogate&& make) {
  validate_sorted_spans(doc.text, spans);
  SurrogateTable local;
  SurrogateTable& table = shared ? *shared : local;

  RewrittenDocument out;
  out.id = doc.id;
  out.plan.mode = mode;
  out.plan.seed = seed;
  for (const auto& span : spans) {
    ConsistencyKey key = consistency_key(span);
    std::string surrogate =
        table.get_or_assign(key, [&] { return make(span, table); });
    out.plan.consistency_map.emplace(key, surrogate);
    out.plan.assignments.push_back(Assignment{span, std::move(surrogate)});
  }
  auto spliced = apply_replacements(doc.text, out.plan.assignments);
  out.text = std::move(spliced.text);
  out.new_spans = std::move(spliced.new_spans);
  return out;
}

}  // namespace

RewrittenDocument sanitize(const Document& doc,
                           std::span<const EntitySpan> spans,
                           SurrogateTable* shared) {
  return rewrite(doc, spans, RewriteMode::kSanitize, 0, shared,
                 [](const EntitySpan& span, SurrogateTable& table) {
                   return table.next_placeholder(span.category);
                 });
}

RewrittenDocument pseudonymize(const Document& doc,
                               std::span<const EntitySpan> spans,
                               const KnowledgeGraph& kg, std::uint64_t seed,
                               SurrogateTable* shared) {
  Rng rng(derive_seed(seed, doc.id));
  // A surrogate equal to another mention of the same document would put that
  // mention back into the text.
  std::set<std::string> mentioned;
  for (const auto& s : spans) mentioned.insert(fold_case(std::string_view(s.surface)));

  return rewrite(
      doc, spans, RewriteMode::kPseudonymize, seed, shared,
      [&](const EntitySpan& span, SurrogateTable& table) -> std::string {
        if (const KgNode* leaf = find_leaf(kg, span.surface, span.category)) {
          auto candidates = candidate_set(kg, *leaf);
          auto filtered = filter_candidates(candidates, *leaf);
          try {
            return sample_replacement(filtered, span.surface, rng, mentioned);
          } catch (const NoSurrogate&) {
          }
        }
        return table.next_placeholder(span.category);
      });
}

// --- parallel corpus -------------------------------------------------------

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::jthread> threads;
  std::size_t count = std::min(workers, n);
  threads.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  threads.clear();
  if (first_error) std::rethrow_exception(first_error);
}

ParallelCorpus generate_parallel_corpus(std::span<const Document> docs,
                                        const Detector& detector,
                                        const KnowledgeGraph& kg,
                                        std::uint64_t seed,
                                        std::size_t workers) {
  std::vector<std::optional<std::string>> targets(docs.size());
  std::vector<std::string> errors(docs.size());
  parallel_for(docs.size(), workers, [&](std::size_t i) {
    try {
      auto spans = detector.detect(docs[i]);
      targets[i] = pseudonymize(docs[i], spans, kg, seed).text;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  ParallelCorpus out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (targets[i]) {
      out.pairs.emplace_back(docs[i].text, std::move(*targets[i]));
    } else {
      out.failures.push_back({docs[i].id, errors[i]});
    }
  }
  if (!docs.empty() && out.pairs.empty()) {
    throw Error("parallel corpus: all " + std::to_string(docs.size()) +
                " documents failed; first error: " + out.failures[0].error);
  }
  return out;
}

std::string escape_tsv_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\n':
        out += "\\n";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string unescape_tsv_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      char n = s[++i];
      out += n == 't' ? '\t' : n == 'n' ? '\n' : n;
    } else {
      out += s[i];
    }
  }
  return out;
}

void write_parallel_tsv(
    std::ostream& out,
    std::span<const std::pair<std::string, std::string>> pairs) {
  for (const auto& [src, dst] : pairs) {
    out << escape_tsv_field(src) << '\t' << escape_tsv_field(dst) << '\n';
  }
}

}  // namespace pseudokit

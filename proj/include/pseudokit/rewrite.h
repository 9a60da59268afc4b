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

// Sanitization (PERSON_1, LOCATION_2, ...) and knowledge-graph
// pseudonymization of detected spans.

#ifndef PSEUDOKIT_REWRITE_H_
#define PSEUDOKIT_REWRITE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pseudokit/corpus.h"
#include "pseudokit/detect.h"
#include "pseudokit/kg.h"

namespace pseudokit {

enum class RewriteMode { kSanitize, kPseudonymize };

std::string_view mode_name(RewriteMode m);

// (case-folded surface, category).
using ConsistencyKey = std::pair<std::string, EntityCategory>;

ConsistencyKey consistency_key(const EntitySpan& span);

struct Assignment {
  EntitySpan span;
  std::string surrogate;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct ReplacementPlan {
  std::vector<Assignment> assignments;  // sorted by span start
  std::map<ConsistencyKey, std::string> consistency_map;
  RewriteMode mode = RewriteMode::kSanitize;
  std::uint64_t seed = 0;
};

struct RewrittenDocument {
  std::string id;
  std::string text;
  ReplacementPlan plan;
  // Location of each surrogate in `text`; one per assignment.
  std::vector<EntitySpan> new_spans;

  // Document view with `entities` set to new_spans.
  Document as_document() const;
};

struct SpliceResult {
  std::string text;
  std::vector<EntitySpan> new_spans;
};

// Splices each surrogate over its span. Assignments must be sorted,
// non-overlapping, and valid for `text`; throws SpanError otherwise.
SpliceResult apply_replacements(std::string_view text,
                                std::span<const Assignment> assignments);

// Consistency map shared by the documents of one link scope. A fresh table
// per document gives document scope; one table for a whole run gives corpus
// scope. Thread-safe and insert-only.
class SurrogateTable {
 public:
  // Returns the surrogate stored for `key`, calling `make` on first sight.
  // `make` runs under the table lock.
  std::string get_or_assign(const ConsistencyKey& key,
                            const std::function<std::string()>& make);

  // Next enumerated placeholder for `category`: "PERSON_1", "PERSON_2", ...
  // Only call from inside a `make` callback.
  std::string next_placeholder(EntityCategory category);

  std::map<ConsistencyKey, std::string> snapshot() const;

 private:
  mutable std::mutex mu_;
  std::map<ConsistencyKey, std::string> map_;
  std::array<int, 3> counters_{0, 0, 0};
};

// Every distinct key gets `<CATEGORY-WORD>_<k>`, k counting distinct keys of
// that category in first-appearance order from 1. Throws SpanError on invalid
// or overlapping spans.
RewrittenDocument sanitize(const Document& doc,
                           std::span<const EntitySpan> spans,
                           SurrogateTable* shared = nullptr);

// Every distinct key gets a knowledge-graph surrogate (find_leaf ->
// candidate_set -> filter_candidates -> sample_replacement); keys without a
// leaf or an eligible surrogate fall back to the sanitize placeholder. The
// RNG is seeded with derive_seed(seed, doc.id), so output is a pure function
// of (doc, spans, kg, seed) under document scope.
RewrittenDocument pseudonymize(const Document& doc,
                               std::span<const EntitySpan> spans,
                               const KnowledgeGraph& kg, std::uint64_t seed,
                               SurrogateTable* shared = nullptr);

struct DocumentFailure {
  std::string id;
  std::string error;
};

struct ParallelCorpus {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<DocumentFailure> failures;
};

// (original, pseudonymized) per document in input order. Failed documents are
// recorded and skipped; throws Error only if every document fails.
ParallelCorpus generate_parallel_corpus(std::span<const Document> docs,
                                        const Detector& detector,
                                        const KnowledgeGraph& kg,
                                        std::uint64_t seed,
                                        std::size_t workers = 1);

// Escapes '\\', tab and newline as \\, \t, \n.
std::string escape_tsv_field(std::string_view s);
std::string unescape_tsv_field(std::string_view s);
void write_parallel_tsv(
    std::ostream& out,
    std::span<const std::pair<std::string, std::string>> pairs);

// Runs fn(i) for i in [0, n) on up to `workers` threads. Exceptions thrown by
// fn are not caught.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace pseudokit

#endif  // PSEUDOKIT_REWRITE_H_

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

// Documents, entity spans and the two corpus formats: JSONL documents and
// CoNLL-2003 column files.

#ifndef PSEUDOKIT_CORPUS_H_
#define PSEUDOKIT_CORPUS_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pseudokit {

// Declaration order is the tie-break order used by resolve_overlaps.
enum class EntityCategory : std::uint8_t { kPer = 0, kLoc = 1, kOrg = 2 };

inline constexpr EntityCategory kAllCategories[] = {
    EntityCategory::kPer, EntityCategory::kLoc, EntityCategory::kOrg};

std::string_view category_name(EntityCategory c);         // "PER"
std::string_view placeholder_word(EntityCategory c);      // "PERSON"
std::optional<EntityCategory> parse_category(std::string_view name);

// [start, end) in code points.
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  EntityCategory category = EntityCategory::kPer;
  std::string surface;

  std::size_t length() const { return end - start; }
  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

bool overlaps(const EntitySpan& a, const EntitySpan& b);

struct Document {
  std::string id;
  std::string text;
  std::optional<std::vector<EntitySpan>> gold_spans;

  friend bool operator==(const Document&, const Document&) = default;
};

// Checks 0 <= start < end <= len(text) and surface == text[start, end) for
// every span. Throws SpanError naming the offending span.
void validate_spans(std::string_view text, std::span<const EntitySpan> spans);

// validate_spans plus sorted / pairwise non-overlapping.
void validate_sorted_spans(std::string_view text,
                           std::span<const EntitySpan> spans);

// Builds a span from offsets, filling in the surface from `text`.
EntitySpan make_span(std::string_view text, std::size_t start, std::size_t end,
                     EntityCategory category);

// --- CoNLL-2003 -----------------------------------------------------------

// Reads 4-column CoNLL-2003 (token POS chunk NE). Accepts IOB1 and BIO2 tags.
// Tokens are joined with single spaces and sentences with newlines; MISC
// runs are dropped. Documents are split on -DOCSTART- lines and get ids
// "conll-1", "conll-2", ... in stream order.
std::vector<Document> parse_conll(std::istream& in);
std::vector<Document> parse_conll(std::string_view raw);

// Writes documents back as CoNLL with BIO2 tags. Spans must align to the
// whitespace tokenisation of the text. POS and chunk columns are "_".
void write_conll(std::ostream& out, std::span<const Document> docs);

// --- JSONL ----------------------------------------------------------------

nlohmann::ordered_json document_to_json(const Document& doc);
// `line` is only used for error messages.
Document document_from_json(const nlohmann::json& j, std::size_t line = 0);

// One Document per line. Blank lines are skipped. Throws ParseError or
// SchemaError naming the line (and field). Ids must be unique.
std::vector<Document> read_jsonl(std::istream& in);
std::vector<Document> read_jsonl(std::string_view raw);

void write_jsonl(std::ostream& out, std::span<const Document> docs);
std::string write_jsonl(std::span<const Document> docs);

}  // namespace pseudokit

#endif  // PSEUDOKIT_CORPUS_H_

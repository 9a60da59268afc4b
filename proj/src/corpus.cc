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

#include "pseudokit/corpus.h"

#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "pseudokit/error.h"
#include "pseudokit/text.h"

namespace pseudokit {

std::string_view category_name(EntityCategory c) {
  switch (c) {
    case EntityCategory::kPer:
      return "PER";
    case EntityCategory::kLoc:
      return "LOC";
    case EntityCategory::kOrg:
      return "ORG";
  }
  return "?";
}

std::string_view placeholder_word(EntityCategory c) {
  switch (c) {
    case EntityCategory::kPer:
      return "PERSON";
    case EntityCategory::kLoc:
      return "LOCATION";
    case EntityCategory::kOrg:
      return "ORGANIZATION";
  }
  return "?";
}

std::optional<EntityCategory> parse_category(std::string_view name) {
  if (name == "PER") return EntityCategory::kPer;
  if (name == "LOC") return EntityCategory::kLoc;
  if (name == "ORG") return EntityCategory::kOrg;
  return std::nullopt;
}

bool overlaps(const EntitySpan& a, const EntitySpan& b) {
  return a.start < b.end && b.start < a.end;
}

namespace {

std::string describe(const EntitySpan& s) {
  return "(" + std::to_string(s.start) + "," + std::to_string(s.end) + "," +
         std::string(category_name(s.category)) + ",\"" + s.surface + "\")";
}

}  // namespace

void validate_spans(std::string_view text, std::span<const EntitySpan> spans) {
  auto bounds = utf8_boundaries(text);
  std::size_t len = bounds.size() - 1;
  for (const auto& s : spans) {
    if (s.start >= s.end || s.end > len) {
      throw SpanError("span " + describe(s) + " outside text of length " +
                      std::to_string(len));
    }
    std::string_view sub =
        text.substr(bounds[s.start], bounds[s.end] - bounds[s.start]);
    if (sub != s.surface) {
      throw SpanError("span " + describe(s) + " surface does not match text \"" +
                      std::string(sub) + "\"");
    }
  }
}

void validate_sorted_spans(std::string_view text,
                           std::span<const EntitySpan> spans) {
  validate_spans(text, spans);
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].start < spans[i - 1].end) {
      throw SpanError("spans " + describe(spans[i - 1]) + " and " +
                      describe(spans[i]) + " overlap or are unsorted");
    }
  }
}

EntitySpan make_span(std::string_view text, std::size_t start, std::size_t end,
                     EntityCategory category) {
  return EntitySpan{start, end, category, utf8_substr(text, start, end)};
}

// --- CoNLL ----------------------------------------------------------------

namespace {

struct Token {
  std::string word;
  // 'O', 'B' or 'I'.
  char prefix = 'O';
  std::string type;
};

struct DocBuilder {
  std::vector<std::vector<Token>> sentences;
  std::vector<Token> current;

  void end_sentence() {
    if (!current.empty()) sentences.push_back(std::move(current));
    current.clear();
  }
  bool empty() const { return sentences.empty() && current.empty(); }
};

Document build_document(DocBuilder& b, std::size_t index) {
  b.end_sentence();
  Document doc;
  doc.id = "conll-" + std::to_string(index);
  std::vector<EntitySpan> spans;
  std::size_t offset = 0;  // code points
  for (std::size_t si = 0; si < b.sentences.size(); ++si) {
    if (si > 0) {
      doc.text += '\n';
      ++offset;
    }
    const auto& sent = b.sentences[si];
    // Open run: type and start offset.
    std::string run_type;
    std::size_t run_start = 0;
    std::size_t run_end = 0;
    auto close_run = [&]() {
      if (run_type.empty()) return;
      if (auto cat = parse_category(run_type)) {
        spans.push_back(make_span(doc.text, run_start, run_end, *cat));
      }
      run_type.clear();
    };
    for (std::size_t ti = 0; ti < sent.size(); ++ti) {
      if (ti > 0) {
        doc.text += ' ';
        ++offset;
      }
      const Token& tok = sent[ti];
      std::size_t tok_start = offset;
      doc.text += tok.word;
      offset += utf8_length(tok.word);
      // A run continues only on I-X directly after a token of type X; this
      // reads IOB1 and BIO2 identically.
      if (tok.prefix == 'O') {
        close_run();
      } else if (tok.prefix == 'I' && run_type == tok.type) {
        run_end = offset;
      } else {
        close_run();
        run_type = tok.type;
        run_start = tok_start;
        run_end = offset;
      }
    }
    close_run();
  }
  doc.gold_spans = std::move(spans);
  return doc;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::vector<Document> parse_conll(std::istream& in) {
  std::vector<Document> docs;
  DocBuilder builder;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&]() {
    if (!builder.empty()) {
      docs.push_back(build_document(builder, docs.size() + 1));
    }
    builder = DocBuilder{};
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view body = trim(line);
    if (body.empty()) {
      builder.end_sentence();
      continue;
    }
    auto cols = split_ws(body);
    if (cols[0] == "-DOCSTART-") {
      flush();
      continue;
    }
    if (cols.size() != 4) {
      throw ParseError(line_no, "expected 4 columns, found " +
                                    std::to_string(cols.size()));
    }
    try {
      utf8_decode(cols[0]);
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    std::string_view tag = cols[3];
    Token tok;
    tok.word = std::string(cols[0]);
    if (tag == "O") {
      tok.prefix = 'O';
    } else if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') &&
               tag[1] == '-') {
      std::string_view type = tag.substr(2);
      if (type != "PER" && type != "LOC" && type != "ORG" && type != "MISC") {
        throw ParseError(line_no, "unknown NE tag '" + std::string(tag) + "'");
      }
      tok.prefix = tag[0];
      tok.type = std::string(type);
    } else {
      throw ParseError(line_no, "unknown NE tag '" + std::string(tag) + "'");
    }
    builder.current.push_back(std::move(tok));
  }
  flush();
  return docs;
}

std::vector<Document> parse_conll(std::string_view raw) {
  std::istringstream in{std::string(raw)};
  return parse_conll(in);
}

void write_conll(std::ostream& out, std::span<const Document> docs) {
  for (const auto& doc : docs) {
    out << "-DOCSTART- -X- -X- O\n\n";
    std::u32string text = utf8_decode(doc.text);
    const auto& spans = doc.gold_spans ? *doc.gold_spans
                                       : std::vector<EntitySpan>{};
    std::size_t si = 0;
    std::size_t pos = 0;
    bool sentence_open = false;
    while (pos <= text.size()) {
      std::size_t end = pos;
      while (end < text.size() && text[end] != U' ' && text[end] != U'\n') {
        ++end;
      }
      if (end > pos) {
        while (si < spans.size() && spans[si].end <= pos) ++si;
        std::string tag = "O";
        if (si < spans.size() && spans[si].start <= pos) {
          if (end > spans[si].end) {
            throw SpanError("document " + doc.id +
                            ": span does not align with token boundaries");
          }
          tag = std::string(spans[si].start == pos ? "B-" : "I-") +
                std::string(category_name(spans[si].category));
        } else if (si < spans.size() && spans[si].start < end) {
          throw SpanError("document " + doc.id +
                          ": span does not align with token boundaries");
        }
        out << utf8_encode(text.substr(pos, end - pos)) << " _ _ " << tag
            << '\n';
        sentence_open = true;
      }
      if (end >= text.size() || text[end] == U'\n') {
        if (sentence_open) out << '\n';
        sentence_open = false;
      }
      pos = end + 1;
    }
  }
}

// --- JSONL ----------------------------------------------------------------

nlohmann::ordered_json document_to_json(const Document& doc) {
  nlohmann::ordered_json j;
  j["id"] = doc.id;
  j["text"] = doc.text;
  if (doc.gold_spans) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& s : *doc.gold_spans) {
      nlohmann::ordered_json e;
      e["start"] = s.start;
      e["end"] = s.end;
      e["category"] = category_name(s.category);
      e["surface"] = s.surface;
      arr.push_back(std::move(e));
    }
    j["entities"] = std::move(arr);
  }
  return j;
}

namespace {

const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                              std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(line, key, "missing");
  return *it;
}

std::size_t require_offset(const nlohmann::json& obj, const char* key,
                           std::size_t line) {
  const auto& v = require(obj, key, line);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw SchemaError(line, key, "must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

Document document_from_json(const nlohmann::json& j, std::size_t line) {
  if (!j.is_object()) throw SchemaError(line, "<root>", "must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "id" && it.key() != "text" && it.key() != "entities") {
      throw SchemaError(line, it.key(), "unknown field");
    }
  }
  Document doc;
  const auto& id = require(j, "id", line);
  if (!id.is_string() || id.get<std::string>().empty()) {
    throw SchemaError(line, "id", "must be a non-empty string");
  }
  doc.id = id.get<std::string>();
  const auto& text = require(j, "text", line);
  if (!text.is_string()) throw SchemaError(line, "text", "must be a string");
  doc.text = text.get<std::string>();

  if (auto it = j.find("entities"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) {
      throw SchemaError(line, "entities", "must be an array");
    }
    std::vector<EntitySpan> spans;
    for (const auto& e : *it) {
      if (!e.is_object()) {
        throw SchemaError(line, "entities", "items must be objects");
      }
      EntitySpan s;
      s.start = require_offset(e, "start", line);
      s.end = require_offset(e, "end", line);
      const auto& cat = require(e, "category", line);
      std::optional<EntityCategory> parsed;
      if (cat.is_string()) parsed = parse_category(cat.get<std::string>());
      if (!parsed) {
        throw SchemaError(line, "category", "must be one of PER, LOC, ORG");
      }
      s.category = *parsed;
      const auto& surface = require(e, "surface", line);
      if (!surface.is_string()) {
        throw SchemaError(line, "surface", "must be a string");
      }
      s.surface = surface.get<std::string>();
      spans.push_back(std::move(s));
    }
    try {
      validate_sorted_spans(doc.text, spans);
    } catch (const SpanError& e) {
      throw SchemaError(line, "entities", e.what());
    }
    doc.gold_spans = std::move(spans);
  }
  return doc;
}

std::vector<Document> read_jsonl(std::istream& in) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    Document doc = document_from_json(j, line_no);
    if (!seen.insert(doc.id).second) {
      throw SchemaError(line_no, "id", "duplicate id '" + doc.id + "'");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> read_jsonl(std::string_view raw) {
  std::istringstream in{std::string(raw)};
  return read_jsonl(in);
}

void write_jsonl(std::ostream& out, std::span<const Document> docs) {
  for (const auto& doc : docs) out << document_to_json(doc).dump() << '\n';
}

std::string write_jsonl(std::span<const Document> docs) {
  std::ostringstream out;
  write_jsonl(out, docs);
  return out.str();
}

}  // namespace pseudokit

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

#include "pseudokit/llm.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <thread>

#include "pseudokit/random.h"
#include "pseudokit/text.h"

namespace pseudokit {

namespace {

std::string join(std::span<const std::string> items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

constexpr std::string_view kNerInstruction =
    "Find all the locations, names and organizations in the following text. "
    "Write them separated by commas:";
constexpr std::string_view kNerExampleText =
    "Daniel worked in Google for five years before moving from America to "
    "France. Daniel is now working with Emma in Danone and living in Paris.";
constexpr std::string_view kNerExampleAnswer =
    "Daniel, Google, America, France, Emma, Danone, Paris.";

constexpr std::string_view kReplaceInstruction =
    "Change following named entities using different named entities of the "
    "same type.";
constexpr std::string_view kReplaceExampleInput =
    "Africa, James Potter, Google, Poland, Lily Jameson, Danone";
constexpr std::string_view kReplaceExampleOutput =
    "Asia, John Lennon, Microsoft, Germany, Anna Smith, Starbucks";

}  // namespace

AlignmentError::AlignmentError(std::vector<std::string> extracted,
                               std::vector<std::string> replaced)
    : Error("alignment mismatch: " + std::to_string(extracted.size()) +
            " extracted [" + join(extracted, ", ") + "] vs " +
            std::to_string(replaced.size()) + " replaced [" +
            join(replaced, ", ") + "]"),
      extracted_(std::move(extracted)),
      replaced_(std::move(replaced)) {}

std::string_view role_name(ChatRole r) {
  switch (r) {
    case ChatRole::kSystem:
      return "system";
    case ChatRole::kUser:
      return "user";
    case ChatRole::kAssistant:
      return "assistant";
  }
  return "?";
}

std::string build_ner_prompt(std::string_view text) {
  std::string out;
  out += kNerInstruction;
  out += "\nText: ";
  out += kNerExampleText;
  out += "\nAnswer: ";
  out += kNerExampleAnswer;
  out += "\nText: ";
  out += text;
  out += "\nAnswer:";
  return out;
}

std::vector<std::string> parse_entity_list(std::string_view response) {
  std::vector<std::string> items;
  std::size_t pos = 0;
  while (pos <= response.size()) {
    std::size_t comma = response.find(',', pos);
    if (comma == std::string_view::npos) comma = response.size();
    items.emplace_back(trim(response.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  // Only the final non-empty item carries the sentence period.
  for (auto it = items.rbegin(); it != items.rend(); ++it) {
    if (it->empty()) continue;
    if (it->back() == '.') {
      it->pop_back();
      *it = std::string(trim(*it));
    }
    break;
  }
  std::erase_if(items, [](const std::string& s) { return s.empty(); });
  if (items.empty()) {
    throw EmptyExtraction("no entities in response \"" +
                          std::string(response) + "\"");
  }
  return items;
}

std::vector<ChatMessage> build_replacement_messages(
    std::span<const std::string> entities) {
  return {
      {ChatRole::kSystem, std::string(kReplaceInstruction)},
      {ChatRole::kUser, std::string(kReplaceExampleInput)},
      {ChatRole::kAssistant, std::string(kReplaceExampleOutput)},
      {ChatRole::kUser, join(entities, ", ")},
  };
}

namespace {

bool looks_like_name(std::string_view surface) {
  std::u32string s = utf8_decode(surface);
  bool word_start = true;
  for (char32_t c : s) {
    if (is_word_char(c)) {
      if (word_start && fold_case(c) != c) return true;
      if (word_start && c >= '0' && c <= '9') return true;
      word_start = false;
    } else {
      word_start = true;
    }
  }
  return false;
}

}  // namespace

Alignment align_replacements(std::span<const std::string> extracted,
                             std::span<const std::string> replaced) {
  if (extracted.size() != replaced.size()) {
    throw AlignmentError({extracted.begin(), extracted.end()},
                         {replaced.begin(), replaced.end()});
  }
  Alignment out;
  std::map<std::string, std::string> seen;
  for (std::size_t i = 0; i < extracted.size(); ++i) {
    const auto& src = extracted[i];
    const auto& dst = replaced[i];
    auto [it, inserted] = seen.emplace(src, dst);
    if (!inserted) {
      if (it->second != dst) out.conflicting_duplicates.push_back(src);
      continue;
    }
    out.mapping.emplace_back(src, dst);
    if (fold_case(std::string_view(src)) == fold_case(std::string_view(dst))) {
      out.self_replacements.push_back(src);
    }
    if (!looks_like_name(src)) out.non_entity_substitutions.push_back(src);
  }
  return out;
}

nlohmann::ordered_json LlmDiagnostics::to_json() const {
  nlohmann::ordered_json j;
  j["extracted"] = extracted;
  j["replaced"] = replaced;
  j["unmatched"] = unmatched;
  j["self_replacements"] = self_replacements;
  j["non_entity_substitutions"] = non_entity_substitutions;
  j["conflicting_duplicates"] = conflicting_duplicates;
  j["empty_extraction"] = empty_extraction;
  j["extraction_attempts"] = extraction_attempts;
  j["replacement_attempts"] = replacement_attempts;
  return j;
}

// --- chain ------------------------------------------------------------------

namespace {

class Backoff {
 public:
  Backoff(const RetryPolicy& policy, std::string_view doc_id)
      : policy_(policy), rng_(derive_seed(policy.jitter_seed, doc_id)) {}

  void wait(int attempt) {
    double delay = std::min(policy_.max_delay_seconds,
                            policy_.base_delay_seconds * std::pow(2.0, attempt));
    delay *= 0.5 + 0.5 * uniform_unit(rng_);
    if (delay > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
  }

 private:
  const RetryPolicy& policy_;
  Rng rng_;
};

std::string call_with_retries(ChatClient& client,
                              std::span<const ChatMessage> messages,
                              Backoff& backoff, int& attempts) {
  const int budget = std::max(0, client.max_retries());
  for (int attempt = 0;; ++attempt) {
    ++attempts;
    try {
      return client.complete(messages);
    } catch (const TransportError&) {
      if (attempt >= budget) throw;
      backoff.wait(attempt);
    }
  }
}

struct Splice {
  RewrittenDocument document;
  std::vector<std::string> unmatched;
};

Splice splice_surfaces(const Document& doc, const Alignment& alignment) {
  std::u32string text = utf8_decode(doc.text);
  std::vector<std::size_t> order(alignment.mapping.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<std::u32string> surfaces;
  for (const auto& [src, dst] : alignment.mapping) {
    surfaces.push_back(utf8_decode(src));
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return surfaces[a].size() > surfaces[b].size();
  });

  std::vector<bool> claimed(text.size(), false);
  std::vector<Assignment> assignments;
  Splice out;
  for (std::size_t idx : order) {
    const auto& [src, dst] = alignment.mapping[idx];
    const auto& needle = surfaces[idx];
    bool any = false;
    for (std::size_t pos : find_word_occurrences(text, needle)) {
      std::size_t end = pos + needle.size();
      bool free = std::none_of(claimed.begin() + pos, claimed.begin() + end,
                               [](bool c) { return c; });
      if (!free) continue;
      std::fill(claimed.begin() + pos, claimed.begin() + end, true);
      EntityCategory category = EntityCategory::kPer;
      if (doc.gold_spans) {
        for (const auto& g : *doc.gold_spans) {
          if (g.start == pos && g.end == end) category = g.category;
        }
      }
      assignments.push_back(
          Assignment{EntitySpan{pos, end, category, src}, dst});
      any = true;
    }
    if (!any) out.unmatched.push_back(src);
  }
  std::sort(assignments.begin(), assignments.end(),
            [](const Assignment& a, const Assignment& b) {
              return a.span.start < b.span.start;
            });

  auto& rd = out.document;
  rd.id = doc.id;
  rd.plan.mode = RewriteMode::kPseudonymize;
  for (const auto& a : assignments) {
    rd.plan.consistency_map.emplace(consistency_key(a.span), a.surrogate);
  }
  auto spliced = apply_replacements(doc.text, assignments);
  rd.plan.assignments = std::move(assignments);
  rd.text = std::move(spliced.text);
  rd.new_spans = std::move(spliced.new_spans);
  return out;
}

// First extracted surface (with a distinct surrogate) still present in the
// rewritten text, or empty.
std::string reintroduced_surface(const Alignment& alignment,
                                 std::string_view rewritten) {
  std::u32string text = utf8_decode(rewritten);
  for (const auto& [src, dst] : alignment.mapping) {
    if (fold_case(std::string_view(src)) == fold_case(std::string_view(dst))) {
      continue;
    }
    if (contains_word(text, utf8_decode(src))) return src;
  }
  return {};
}

}  // namespace

LlmRewrite llm_pseudonymize(const Document& doc, ChatClient& extractor,
                            ChatClient& replacer, const RetryPolicy& policy) {
  LlmRewrite result;
  auto& diag = result.diagnostics;
  auto unchanged = [&] {
    result.document.id = doc.id;
    result.document.text = doc.text;
    result.document.plan.mode = RewriteMode::kPseudonymize;
    return result;
  };
  if (trim(doc.text).empty()) return unchanged();

  Backoff backoff(policy, doc.id);
  std::vector<ChatMessage> prompt{{ChatRole::kUser, build_ner_prompt(doc.text)}};
  std::string extraction =
      call_with_retries(extractor, prompt, backoff, diag.extraction_attempts);
  try {
    diag.extracted = parse_entity_list(extraction);
  } catch (const EmptyExtraction&) {
    diag.empty_extraction = true;
    return unchanged();
  }

  auto messages = build_replacement_messages(diag.extracted);
  const int budget = std::max(0, replacer.max_retries());
  for (int attempt = 0;; ++attempt) {
    std::string reply =
        call_with_retries(replacer, messages, backoff, diag.replacement_attempts);
    try {
      diag.replaced = parse_entity_list(reply);
    } catch (const EmptyExtraction&) {
      diag.replaced.clear();
    }
    try {
      Alignment alignment = align_replacements(diag.extracted, diag.replaced);
      Splice splice = splice_surfaces(doc, alignment);
      std::string leaked = reintroduced_surface(alignment, splice.document.text);
      if (!leaked.empty()) {
        throw SurrogateCollision("surrogates reintroduce extracted surface '" +
                                 leaked + "'");
      }
      diag.unmatched = std::move(splice.unmatched);
      diag.self_replacements = std::move(alignment.self_replacements);
      diag.non_entity_substitutions =
          std::move(alignment.non_entity_substitutions);
      diag.conflicting_duplicates = std::move(alignment.conflicting_duplicates);
      result.document = std::move(splice.document);
      return result;
    } catch (const Error&) {
      if (attempt >= budget) throw;
    }
  }
}

std::vector<LlmBatchItem> llm_pseudonymize_batch(std::span<const Document> docs,
                                                 ChatClient& extractor,
                                                 ChatClient& replacer,
                                                 const RetryPolicy& policy,
                                                 std::size_t workers) {
  std::vector<LlmBatchItem> items(docs.size());
  parallel_for(docs.size(), workers, [&](std::size_t i) {
    auto& item = items[i];
    item.id = docs[i].id;
    auto fail = [&](std::string_view kind, const std::exception& e) {
      item.ok = false;
      item.error_kind = std::string(kind);
      item.error = e.what();
    };
    try {
      auto r = llm_pseudonymize(docs[i], extractor, replacer, policy);
      item.document = std::move(r.document);
      item.diagnostics = std::move(r.diagnostics);
      item.ok = true;
    } catch (const AlignmentError& e) {
      fail("AlignmentError", e);
    } catch (const TransportError& e) {
      fail("TransportError", e);
    } catch (const EmptyExtraction& e) {
      fail("EmptyExtraction", e);
    } catch (const SurrogateCollision& e) {
      fail("SurrogateCollision", e);
    } catch (const std::exception& e) {
      fail("Error", e);
    }
  });
  return items;
}

}  // namespace pseudokit

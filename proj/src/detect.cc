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

#include <algorithm>
#include <fstream>
#include <istream>
#include <queue>

#include "pseudokit/error.h"
#include "pseudokit/text.h"

namespace pseudokit {

std::vector<EntitySpan> resolve_overlaps(std::vector<EntitySpan> spans) {
  std::sort(spans.begin(), spans.end(),
            [](const EntitySpan& a, const EntitySpan& b) {
              if (a.length() != b.length()) return a.length() > b.length();
              if (a.start != b.start) return a.start < b.start;
              return a.category < b.category;
            });
  std::vector<EntitySpan> kept;
  for (auto& s : spans) {
    bool clash = std::any_of(kept.begin(), kept.end(), [&](const EntitySpan& k) {
      return overlaps(k, s);
    });
    if (!clash) kept.push_back(std::move(s));
  }
  std::sort(kept.begin(), kept.end(),
            [](const EntitySpan& a, const EntitySpan& b) {
              return a.start < b.start;
            });
  return kept;
}

// --- Gazetteer ------------------------------------------------------------

Gazetteer::Gazetteer(
    const std::vector<std::pair<std::string, EntityCategory>>& entries,
    GazetteerOptions options)
    : options_(options) {
  std::map<std::u32string, EntityCategory> seen;
  for (const auto& [surface, category] : entries) {
    if (surface.empty()) throw Error("gazetteer entry with empty surface");
    std::u32string key = utf8_decode(surface);
    if (!options_.case_sensitive) key = fold_case(std::u32string_view(key));
    auto [it, inserted] = seen.emplace(key, category);
    if (!inserted && it->second != category) {
      throw Error("gazetteer surface '" + surface +
                  "' mapped to two categories");
    }
  }
  entries_.assign(seen.begin(), seen.end());
  build();
}

void Gazetteer::build() {
  nodes_.assign(1, Node{});
  for (int idx = 0; idx < static_cast<int>(entries_.size()); ++idx) {
    int cur = 0;
    for (char32_t c : entries_[idx].first) {
      auto it = nodes_[cur].next.find(c);
      if (it == nodes_[cur].next.end()) {
        nodes_.push_back(Node{});
        int created = static_cast<int>(nodes_.size()) - 1;
        nodes_[cur].next.emplace(c, created);
        cur = created;
      } else {
        cur = it->second;
      }
    }
    nodes_[cur].outputs.push_back(idx);
  }
  // Breadth-first failure links.
  std::queue<int> queue;
  for (auto& [c, child] : nodes_[0].next) {
    nodes_[child].fail = 0;
    queue.push(child);
  }
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop();
    for (auto& [c, v] : nodes_[u].next) {
      int f = nodes_[u].fail;
      while (f != 0 && !nodes_[f].next.contains(c)) f = nodes_[f].fail;
      auto it = nodes_[f].next.find(c);
      nodes_[v].fail = (it != nodes_[f].next.end() && it->second != v)
                           ? it->second
                           : 0;
      const auto& inherited = nodes_[nodes_[v].fail].outputs;
      nodes_[v].outputs.insert(nodes_[v].outputs.end(), inherited.begin(),
                               inherited.end());
      queue.push(v);
    }
  }
}

std::vector<EntitySpan> Gazetteer::match(std::string_view text) const {
  std::u32string original = utf8_decode(text);
  std::u32string haystack = options_.case_sensitive
                                ? original
                                : fold_case(std::u32string_view(original));
  std::vector<EntitySpan> found;
  int state = 0;
  for (std::size_t i = 0; i < haystack.size(); ++i) {
    char32_t c = haystack[i];
    while (state != 0 && !nodes_[state].next.contains(c)) {
      state = nodes_[state].fail;
    }
    if (auto it = nodes_[state].next.find(c); it != nodes_[state].next.end()) {
      state = it->second;
    }
    for (int idx : nodes_[state].outputs) {
      const auto& [pattern, category] = entries_[idx];
      std::size_t end = i + 1;
      std::size_t start = end - pattern.size();
      if (options_.word_boundary && !at_word_boundary(original, start, end)) {
        continue;
      }
      found.push_back(EntitySpan{
          start, end, category,
          utf8_encode(std::u32string_view(original).substr(start,
                                                           end - start))});
    }
  }
  return resolve_overlaps(std::move(found));
}

Gazetteer Gazetteer::load(std::istream& in, GazetteerOptions options) {
  std::vector<std::pair<std::string, EntityCategory>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    auto tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw ParseError(line_no, "expected surface<TAB>CATEGORY");
    }
    std::string surface(trim(std::string_view(line).substr(0, tab)));
    auto category = parse_category(trim(std::string_view(line).substr(tab + 1)));
    if (!category) {
      throw ParseError(line_no, "category must be one of PER, LOC, ORG");
    }
    if (surface.empty()) throw ParseError(line_no, "empty surface");
    try {
      utf8_decode(surface);
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    entries.emplace_back(std::move(surface), *category);
  }
  return Gazetteer(entries, options);
}

Gazetteer Gazetteer::load_file(const std::string& path,
                               GazetteerOptions options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon '" + path + "'");
  return load(in, options);
}

std::vector<EntitySpan> gazetteer_match(std::string_view text,
                                        const Gazetteer& gazetteer) {
  return gazetteer.match(text);
}

// --- Detectors ------------------------------------------------------------

std::vector<EntitySpan> OracleDetector::detect(const Document& doc) const {
  if (!doc.gold_spans) {
    throw DetectorError("oracle detector: document '" + doc.id +
                        "' has no gold spans");
  }
  return *doc.gold_spans;
}

std::vector<EntitySpan> GazetteerDetector::detect(const Document& doc) const {
  return gazetteer_->match(doc.text);
}

DetectorSpec parse_detector_spec(std::string_view spec) {
  if (spec == "oracle") return {DetectorKind::kOracle, ""};
  auto colon = spec.find(':');
  if (colon != std::string_view::npos && colon + 1 < spec.size()) {
    std::string_view head = spec.substr(0, colon);
    std::string arg(spec.substr(colon + 1));
    if (head == "gazetteer") return {DetectorKind::kGazetteer, arg};
    if (head == "external") return {DetectorKind::kExternal, arg};
  }
  throw UsageError("invalid detector '" + std::string(spec) +
                   "' (expected oracle, gazetteer:<lexicon> or "
                   "external:<cmd>)");
}

std::unique_ptr<Detector> make_detector(
    const DetectorSpec& spec, GazetteerOptions gazetteer_options,
    ExternalDetectorOptions external_options) {
  switch (spec.kind) {
    case DetectorKind::kOracle:
      return std::make_unique<OracleDetector>();
    case DetectorKind::kGazetteer:
      return std::make_unique<GazetteerDetector>(
          std::make_shared<const Gazetteer>(
              Gazetteer::load_file(spec.argument, gazetteer_options)),
          spec.argument);
    case DetectorKind::kExternal:
      return std::make_unique<ExternalDetector>(spec.argument,
                                                external_options);
  }
  throw UsageError("unknown detector kind");
}

}  // namespace pseudokit

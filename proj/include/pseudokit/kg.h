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

// Wikidata-style knowledge graph and surrogate candidate generation.
//
// A mention is replaced by: finding its leaf node, collecting the siblings
// that share a membership parent (instance_of P31, subclass_of P279,
// part_of P361), keeping the siblings whose category-specific attributes
// match the leaf, and sampling one of them uniformly.

#ifndef PSEUDOKIT_KG_H_
#define PSEUDOKIT_KG_H_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pseudokit/corpus.h"
#include "pseudokit/random.h"

namespace pseudokit {

enum class MembershipProp { kInstanceOf, kSubclassOf, kPartOf };

std::string_view prop_name(MembershipProp p);  // "P31", "P279", "P361"

// The two attribute keys compared for a category, in relaxation order: the
// second key is dropped first.
std::array<std::string_view, 2> attribute_keys(EntityCategory c);

struct KgNode {
  std::string id;
  std::string label;
  EntityCategory category = EntityCategory::kPer;
  std::map<std::string, std::string> attrs;

  friend bool operator==(const KgNode&, const KgNode&) = default;
};

struct KgEdge {
  std::string src;  // child
  std::string dst;  // parent
  MembershipProp prop = MembershipProp::kInstanceOf;

  friend bool operator==(const KgEdge&, const KgEdge&) = default;
};

class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  // Validates node and edge invariants. Throws ParseError (line 0).
  KnowledgeGraph(std::vector<KgNode> nodes, std::vector<KgEdge> edges);

  // JSONL: {"node": {"id","label","category","attrs"}} and
  // {"edge": {"src","dst","prop"}} lines in any order. Edges are validated
  // after the whole file is read; errors name the offending line.
  static KnowledgeGraph load(std::istream& in);
  static KnowledgeGraph load_file(const std::string& path);

  // Normalized dump: nodes sorted by id, then edges sorted by
  // (src, dst, prop), attrs keys sorted.
  void dump(std::ostream& out) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const KgNode> nodes() const { return nodes_; }
  std::span<const KgEdge> edges() const { return edges_; }

  const KgNode* node(std::string_view id) const;
  // Nodes whose case-folded label equals the case-folded `label`.
  std::vector<const KgNode*> nodes_with_label(std::string_view label) const;
  // Distinct parents over all membership properties, sorted by id.
  std::vector<const KgNode*> parents(const KgNode& n) const;
  std::vector<const KgNode*> children(const KgNode& n) const;
  // Parents of `n` via one property.
  std::vector<const KgNode*> parents(const KgNode& n, MembershipProp p) const;

 private:
  std::size_t index_of(const KgNode& n) const;

  std::vector<KgNode> nodes_;  // sorted by id
  std::vector<KgEdge> edges_;  // sorted
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_label_;
  // child index -> (prop, parent index)
  std::vector<std::vector<std::pair<MembershipProp, std::size_t>>> up_;
  std::vector<std::vector<std::size_t>> down_;
};

inline KnowledgeGraph load_kg(const std::string& path) {
  return KnowledgeGraph::load_file(path);
}

// Case-insensitive label match restricted to `category`. Among several
// matches, the node with most distinct membership parents wins, then the
// smallest id. Returns nullptr when nothing matches.
const KgNode* find_leaf(const KnowledgeGraph& kg, std::string_view surface,
                        EntityCategory category);

// Same-category nodes other than `leaf` sharing at least one membership
// parent, sorted by id.
std::vector<const KgNode*> candidate_set(const KnowledgeGraph& kg,
                                         const KgNode& leaf);

// Attribute filter with relaxation ladder: both keys equal, then first key
// only, then no filter. A key missing on either side is a mismatch.
std::vector<const KgNode*> filter_candidates(
    std::span<const KgNode* const> candidates, const KgNode& leaf);

// Number of keys the ladder had to drop for `candidates` (0, 1 or 2).
int filter_relaxation(std::span<const KgNode* const> candidates,
                      const KgNode& leaf);

// Uniformly samples a label from `filtered`, skipping nodes whose label
// case-folds to `original_surface` or to any folded string in `exclude`.
// Throws NoSurrogate when nothing is eligible.
std::string sample_replacement(std::span<const KgNode* const> filtered,
                               std::string_view original_surface, Rng& rng,
                               const std::set<std::string>& exclude = {});

}  // namespace pseudokit

#endif  // PSEUDOKIT_KG_H_

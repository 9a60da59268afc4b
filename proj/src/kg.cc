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

#include "pseudokit/kg.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <tuple>

#include "json.hpp"
#include "pseudokit/error.h"
#include "pseudokit/text.h"

namespace pseudokit {

std::string_view prop_name(MembershipProp p) {
  switch (p) {
    case MembershipProp::kInstanceOf:
      return "P31";
    case MembershipProp::kSubclassOf:
      return "P279";
    case MembershipProp::kPartOf:
      return "P361";
  }
  return "?";
}

namespace {

std::optional<MembershipProp> parse_prop(std::string_view s) {
  if (s == "P31") return MembershipProp::kInstanceOf;
  if (s == "P279") return MembershipProp::kSubclassOf;
  if (s == "P361") return MembershipProp::kPartOf;
  return std::nullopt;
}

}  // namespace

std::array<std::string_view, 2> attribute_keys(EntityCategory c) {
  switch (c) {
    case EntityCategory::kPer:
      return {"gender", "language_of_origin"};
    case EntityCategory::kOrg:
      return {"industry", "country"};
    case EntityCategory::kLoc:
      return {"location_type", "country"};
  }
  return {"", ""};
}

// --- construction -----------------------------------------------------------

namespace {

void check_node(const KgNode& n, std::size_t line) {
  if (n.id.empty()) throw SchemaError(line, "id", "must be non-empty");
  if (n.label.empty()) throw SchemaError(line, "label", "must be non-empty");
  auto keys = attribute_keys(n.category);
  for (const auto& [k, v] : n.attrs) {
    if (k != keys[0] && k != keys[1]) {
      throw SchemaError(line, "attrs",
                        "key '" + k + "' not allowed for category " +
                            std::string(category_name(n.category)));
    }
  }
}

}  // namespace

KnowledgeGraph::KnowledgeGraph(std::vector<KgNode> nodes,
                               std::vector<KgEdge> edges) {
  std::vector<std::size_t> node_order(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) node_order[i] = i;
  std::sort(node_order.begin(), node_order.end(),
            [&](std::size_t a, std::size_t b) {
              return nodes[a].id < nodes[b].id;
            });
  for (const auto& n : nodes) check_node(n, 0);
  std::vector<KgNode> sorted;
  sorted.reserve(nodes.size());
  for (std::size_t i : node_order) sorted.push_back(std::move(nodes[i]));
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].id == sorted[i - 1].id) {
      throw SchemaError(0, "id", "duplicate node id '" + sorted[i].id + "'");
    }
  }
  nodes_ = std::move(sorted);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    by_id_.emplace(nodes_[i].id, i);
    by_label_[fold_case(std::string_view(nodes_[i].label))].push_back(i);
  }
  for (const auto& e : edges) {
    if (e.src == e.dst) {
      throw SchemaError(0, "edge", "self-loop on '" + e.src + "'");
    }
    if (!by_id_.contains(e.src)) {
      throw SchemaError(0, "src", "unknown node '" + e.src + "'");
    }
    if (!by_id_.contains(e.dst)) {
      throw SchemaError(0, "dst", "unknown node '" + e.dst + "'");
    }
  }
  std::sort(edges.begin(), edges.end(), [](const KgEdge& a, const KgEdge& b) {
    return std::tie(a.src, a.dst, a.prop) < std::tie(b.src, b.dst, b.prop);
  });
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] == edges[i - 1]) {
      throw SchemaError(0, "edge",
                        "duplicate edge " + edges[i].src + " -> " +
                            edges[i].dst);
    }
  }
  edges_ = std::move(edges);
  up_.assign(nodes_.size(), {});
  down_.assign(nodes_.size(), {});
  for (const auto& e : edges_) {
    std::size_t child = by_id_.at(e.src);
    std::size_t parent = by_id_.at(e.dst);
    up_[child].emplace_back(e.prop, parent);
    down_[parent].push_back(child);
  }
  for (auto& d : down_) {
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
  }
}

KnowledgeGraph KnowledgeGraph::load(std::istream& in) {
  std::vector<KgNode> nodes;
  std::vector<std::size_t> node_lines;
  std::vector<KgEdge> edges;
  std::vector<std::size_t> edge_lines;
  std::string line;
  std::size_t line_no = 0;

  auto get_string = [&](const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(line_no, key, "missing");
    if (!it->is_string()) throw SchemaError(line_no, key, "must be a string");
    return it->get<std::string>();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (j.is_object() && j.size() == 1 && j.contains("node") &&
        j["node"].is_object()) {
      const auto& o = j["node"];
      KgNode n;
      n.id = get_string(o, "id");
      n.label = get_string(o, "label");
      auto cat = parse_category(get_string(o, "category"));
      if (!cat) {
        throw SchemaError(line_no, "category", "must be one of PER, LOC, ORG");
      }
      n.category = *cat;
      if (auto it = o.find("attrs"); it != o.end()) {
        if (!it->is_object()) {
          throw SchemaError(line_no, "attrs", "must be an object");
        }
        for (auto a = it->begin(); a != it->end(); ++a) {
          if (!a->is_string()) {
            throw SchemaError(line_no, "attrs", "values must be strings");
          }
          n.attrs.emplace(a.key(), a->get<std::string>());
        }
      }
      check_node(n, line_no);
      nodes.push_back(std::move(n));
      node_lines.push_back(line_no);
    } else if (j.is_object() && j.size() == 1 && j.contains("edge") &&
               j["edge"].is_object()) {
      const auto& o = j["edge"];
      KgEdge e;
      e.src = get_string(o, "src");
      e.dst = get_string(o, "dst");
      auto prop = parse_prop(get_string(o, "prop"));
      if (!prop) {
        throw SchemaError(line_no, "prop", "must be one of P31, P279, P361");
      }
      e.prop = *prop;
      edges.push_back(std::move(e));
      edge_lines.push_back(line_no);
    } else {
      throw SchemaError(line_no, "<root>",
                        "expected a single \"node\" or \"edge\" object");
    }
  }

  // Re-check with line numbers before handing to the constructor.
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto [it, inserted] = seen.emplace(nodes[i].id, node_lines[i]);
    if (!inserted) {
      throw SchemaError(node_lines[i], "id",
                        "duplicate node id '" + nodes[i].id +
                            "' (first defined on line " +
                            std::to_string(it->second) + ")");
    }
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (!seen.contains(e.src)) {
      throw SchemaError(edge_lines[i], "src", "unknown node '" + e.src + "'");
    }
    if (!seen.contains(e.dst)) {
      throw SchemaError(edge_lines[i], "dst", "unknown node '" + e.dst + "'");
    }
    if (e.src == e.dst) {
      throw SchemaError(edge_lines[i], "dst", "self-loop on '" + e.src + "'");
    }
  }
  return KnowledgeGraph(std::move(nodes), std::move(edges));
}

KnowledgeGraph KnowledgeGraph::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open knowledge graph '" + path + "'");
  return load(in);
}

void KnowledgeGraph::dump(std::ostream& out) const {
  for (const auto& n : nodes_) {
    nlohmann::ordered_json o;
    o["id"] = n.id;
    o["label"] = n.label;
    o["category"] = category_name(n.category);
    o["attrs"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : n.attrs) o["attrs"][k] = v;
    nlohmann::ordered_json line;
    line["node"] = std::move(o);
    out << line.dump() << '\n';
  }
  for (const auto& e : edges_) {
    nlohmann::ordered_json o;
    o["src"] = e.src;
    o["dst"] = e.dst;
    o["prop"] = prop_name(e.prop);
    nlohmann::ordered_json line;
    line["edge"] = std::move(o);
    out << line.dump() << '\n';
  }
}

// --- queries ----------------------------------------------------------------

std::size_t KnowledgeGraph::index_of(const KgNode& n) const {
  auto it = by_id_.find(n.id);
  if (it == by_id_.end() || &nodes_[it->second] != &n) {
    throw Error("node '" + n.id + "' does not belong to this graph");
  }
  return it->second;
}

const KgNode* KnowledgeGraph::node(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &nodes_[it->second];
}

std::vector<const KgNode*> KnowledgeGraph::nodes_with_label(
    std::string_view label) const {
  std::vector<const KgNode*> out;
  auto it = by_label_.find(fold_case(label));
  if (it == by_label_.end()) return out;
  for (std::size_t i : it->second) out.push_back(&nodes_[i]);
  return out;
}

std::vector<const KgNode*> KnowledgeGraph::parents(const KgNode& n) const {
  std::vector<std::size_t> idx;
  for (const auto& [prop, p] : up_[index_of(n)]) idx.push_back(p);
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  std::vector<const KgNode*> out;
  for (std::size_t i : idx) out.push_back(&nodes_[i]);
  return out;
}

std::vector<const KgNode*> KnowledgeGraph::parents(const KgNode& n,
                                                   MembershipProp p) const {
  std::vector<const KgNode*> out;
  for (const auto& [prop, parent] : up_[index_of(n)]) {
    if (prop == p) out.push_back(&nodes_[parent]);
  }
  return out;
}

std::vector<const KgNode*> KnowledgeGraph::children(const KgNode& n) const {
  std::vector<const KgNode*> out;
  for (std::size_t i : down_[index_of(n)]) out.push_back(&nodes_[i]);
  return out;
}

const KgNode* find_leaf(const KnowledgeGraph& kg, std::string_view surface,
                        EntityCategory category) {
  const KgNode* best = nullptr;
  std::size_t best_parents = 0;
  for (const KgNode* n : kg.nodes_with_label(surface)) {
    if (n->category != category) continue;
    std::size_t np = kg.parents(*n).size();
    if (best == nullptr || np > best_parents ||
        (np == best_parents && n->id < best->id)) {
      best = n;
      best_parents = np;
    }
  }
  return best;
}

std::vector<const KgNode*> candidate_set(const KnowledgeGraph& kg,
                                         const KgNode& leaf) {
  std::vector<const KgNode*> out;
  for (const KgNode* parent : kg.parents(leaf)) {
    for (const KgNode* sibling : kg.children(*parent)) {
      if (sibling != &leaf && sibling->category == leaf.category) {
        out.push_back(sibling);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const KgNode* a, const KgNode* b) {
    return a->id < b->id;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

bool attr_equal(const KgNode& a, const KgNode& b, std::string_view key) {
  auto ia = a.attrs.find(std::string(key));
  auto ib = b.attrs.find(std::string(key));
  return ia != a.attrs.end() && ib != b.attrs.end() && ia->second == ib->second;
}

std::vector<const KgNode*> filter_by(std::span<const KgNode* const> cands,
                                     const KgNode& leaf,
                                     std::span<const std::string_view> keys) {
  std::vector<const KgNode*> out;
  for (const KgNode* c : cands) {
    bool ok = std::all_of(keys.begin(), keys.end(), [&](std::string_view k) {
      return attr_equal(*c, leaf, k);
    });
    if (ok) out.push_back(c);
  }
  return out;
}

}  // namespace

int filter_relaxation(std::span<const KgNode* const> candidates,
                      const KgNode& leaf) {
  auto keys = attribute_keys(leaf.category);
  for (int dropped = 0; dropped < 2; ++dropped) {
    std::span<const std::string_view> active(keys.data(), 2 - dropped);
    if (!filter_by(candidates, leaf, active).empty()) return dropped;
  }
  return 2;
}

std::vector<const KgNode*> filter_candidates(
    std::span<const KgNode* const> candidates, const KgNode& leaf) {
  auto keys = attribute_keys(leaf.category);
  int dropped = filter_relaxation(candidates, leaf);
  return filter_by(candidates, leaf,
                   std::span<const std::string_view>(keys.data(), 2 - dropped));
}

std::string sample_replacement(std::span<const KgNode* const> filtered,
                               std::string_view original_surface, Rng& rng,
                               const std::set<std::string>& exclude) {
  std::string original = fold_case(original_surface);
  std::vector<const KgNode*> eligible;
  for (const KgNode* n : filtered) {
    std::string label = fold_case(std::string_view(n->label));
    if (label != original && !exclude.contains(label)) eligible.push_back(n);
  }
  if (eligible.empty()) {
    throw NoSurrogate("no surrogate other than '" +
                      std::string(original_surface) + "' in candidate pool");
  }
  return eligible[uniform_index(rng, eligible.size())]->label;
}

}  // namespace pseudokit

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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pseudokit/cli.h"
#include "pseudokit/corpus.h"
#include "pseudokit/detect.h"
#include "pseudokit/error.h"
#include "pseudokit/eval.h"
#include "pseudokit/kg.h"
#include "pseudokit/rewrite.h"

namespace py = pybind11;
using namespace pybind11::literals;

namespace pseudokit {
namespace {

EntityCategory category_arg(const std::string& name) {
  auto c = parse_category(name);
  if (!c) throw UsageError("unknown category '" + name + "'");
  return *c;
}

py::dict rewritten_dict(const RewrittenDocument& r) {
  py::dict mapping;
  for (const auto& [key, surrogate] : r.plan.consistency_map) {
    mapping[py::make_tuple(std::string(category_name(key.second)), key.first)] =
        surrogate;
  }
  return py::dict("id"_a = r.id, "text"_a = r.text, "spans"_a = r.new_spans,
                  "mapping"_a = mapping);
}

py::dict leakage_dict(const LeakageReport& r) {
  py::dict d;
  for (auto c : {EntityCategory::kPer, EntityCategory::kOrg,
                 EntityCategory::kLoc}) {
    d[py::str(std::string(category_name(c)))] = py::dict(
        "leaked"_a = r.at(c).leaked, "total"_a = r.at(c).total,
        "rate"_a = r.at(c).rate());
  }
  d["micro"] = r.micro_mean;
  d["macro"] = r.macro_mean;
  return d;
}

}  // namespace
}  // namespace pseudokit

PYBIND11_MODULE(_core, m) {
  using namespace pseudokit;
  m.doc() = "Entity sanitization, pseudonymization and leakage evaluation";
  m.attr("__version__") = std::string(tool_version());

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<SpanError>(m, "SpanError", error.ptr());

  py::class_<EntitySpan>(m, "EntitySpan")
      .def(py::init([](std::size_t start, std::size_t end,
                       const std::string& category, std::string surface) {
             return EntitySpan{start, end, category_arg(category),
                               std::move(surface)};
           }),
           "start"_a, "end"_a, "category"_a, "surface"_a)
      .def_readonly("start", &EntitySpan::start)
      .def_readonly("end", &EntitySpan::end)
      .def_property_readonly("category",
                             [](const EntitySpan& s) {
                               return std::string(category_name(s.category));
                             })
      .def_readonly("surface", &EntitySpan::surface)
      .def("__eq__", [](const EntitySpan& a, const EntitySpan& b) { return a == b; })
      .def("__repr__", [](const EntitySpan& s) {
        return "EntitySpan(" + std::to_string(s.start) + ", " +
               std::to_string(s.end) + ", '" +
               std::string(category_name(s.category)) + "', '" + s.surface +
               "')";
      });

  py::class_<Document>(m, "Document")
      .def(py::init([](std::string id, std::string text,
                       std::optional<std::vector<EntitySpan>> spans) {
             Document d{std::move(id), std::move(text), std::move(spans)};
             if (d.gold_spans) validate_spans(d.text, *d.gold_spans);
             return d;
           }),
           "id"_a, "text"_a, "spans"_a = py::none())
      .def_readonly("id", &Document::id)
      .def_readonly("text", &Document::text)
      .def_readonly("spans", &Document::gold_spans);

  m.def("make_span",
        [](const std::string& text, std::size_t start, std::size_t end,
           const std::string& category) {
          return make_span(text, start, end, category_arg(category));
        },
        "text"_a, "start"_a, "end"_a, "category"_a,
        "Span over code points [start, end) of text.");

  m.def("read_jsonl",
        [](const std::string& raw) { return read_jsonl(std::string_view(raw)); },
        "data"_a);
  m.def("write_jsonl",
        [](const std::vector<Document>& docs) { return write_jsonl(docs); },
        "docs"_a);
  m.def("parse_conll",
        [](const std::string& raw) { return parse_conll(std::string_view(raw)); },
        "data"_a);

  m.def("gazetteer_match",
        [](const std::string& text,
           const std::vector<std::pair<std::string, std::string>>& entries,
           bool case_sensitive, bool word_boundary) {
          std::vector<std::pair<std::string, EntityCategory>> lex;
          for (const auto& [s, c] : entries) lex.emplace_back(s, category_arg(c));
          return Gazetteer(lex, {case_sensitive, word_boundary}).match(text);
        },
        "text"_a, "entries"_a, "case_sensitive"_a = true,
        "word_boundary"_a = true);

  py::class_<KnowledgeGraph, std::shared_ptr<KnowledgeGraph>>(m,
                                                              "KnowledgeGraph")
      .def_static("load",
                  [](const std::string& path) {
                    return std::make_shared<KnowledgeGraph>(load_kg(path));
                  },
                  "path"_a)
      .def_property_readonly("node_count", &KnowledgeGraph::node_count)
      .def_property_readonly("edge_count", &KnowledgeGraph::edge_count)
      .def("candidates",
           [](const KnowledgeGraph& kg, const std::string& surface,
              const std::string& category) {
             std::vector<std::string> out;
             const KgNode* leaf = find_leaf(kg, surface, category_arg(category));
             if (leaf == nullptr) return out;
             auto cands = candidate_set(kg, *leaf);
             for (const auto* n : filter_candidates(cands, *leaf)) {
               out.push_back(n->label);
             }
             return out;
           },
           "surface"_a, "category"_a,
           "Labels of the filtered surrogate pool for a mention.");

  m.def("sanitize",
        [](const Document& doc, const std::vector<EntitySpan>& spans) {
          return rewritten_dict(sanitize(doc, spans));
        },
        "doc"_a, "spans"_a);
  m.def("pseudonymize",
        [](const Document& doc, const std::vector<EntitySpan>& spans,
           const KnowledgeGraph& kg, std::uint64_t seed) {
          return rewritten_dict(pseudonymize(doc, spans, kg, seed));
        },
        "doc"_a, "spans"_a, "kg"_a, "seed"_a = 0);

  m.def("leakage_report",
        [](const std::vector<Document>& gold,
           const std::vector<Document>& rewritten, bool fold_case) {
          return leakage_dict(leakage_report(gold, rewritten, {fold_case, 1}));
        },
        "gold"_a, "rewritten"_a, "fold_case"_a = false);

  m.def("synth_experiment",
        [](const std::vector<std::pair<std::string, std::string>>& pairs,
           std::uint64_t seed, double train_fraction, int epochs) {
          TrainConfig config;
          config.epochs = epochs;
          auto ex = run_synth_experiment(pairs, config, seed, train_fraction);
          const auto& h = ex.heldout;
          return py::dict("precision"_a = h.precision, "recall"_a = h.recall,
                          "f_score"_a = h.f_score,
                          "final_loss"_a = ex.model.final_loss(),
                          "train_items"_a = ex.train_items,
                          "heldout_items"_a = ex.heldout_items);
        },
        "pairs"_a, "seed"_a = 0, "train_fraction"_a = 0.9, "epochs"_a = 20,
        "Trains the syntheticity classifier on (original, rewritten) pairs and "
        "scores the held-out fold.");

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          int code;
          {
            py::gil_scoped_release release;
            code = run(args, out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        "args"_a, "Runs a pseudokit subcommand; returns (exit code, stdout, stderr).");
}

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

#include "pseudokit/cli.h"

#include <openssl/evp.h>
#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pseudokit/corpus.h"
#include "pseudokit/detect.h"
#include "pseudokit/error.h"
#include "pseudokit/eval.h"
#include "pseudokit/kg.h"
#include "pseudokit/llm.h"
#include "pseudokit/rewrite.h"

namespace pseudokit {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string_view tool_version() { return PSEUDOKIT_VERSION; }

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

void write_file_atomic(const std::string& path, std::string_view content) {
  static std::atomic<unsigned> counter{0};
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" +
         std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot rename onto '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw UsageError("cannot read '" + path + "'");
  return ss.str();
}

namespace {

// Collects digests and run metadata, then writes manifest.json last.
class Manifest {
 public:
  Manifest(std::string subcommand, const std::vector<std::string>& args)
      : subcommand_(std::move(subcommand)), args_(args) {}

  std::string input(const std::string& role, const std::string& path) {
    std::string content = read_file(path);
    inputs_.push_back({{"role", role},
                       {"path", path},
                       {"bytes", content.size()},
                       {"sha256", sha256_hex(content)}});
    return content;
  }

  void output(const std::string& role, const std::string& path,
              std::string_view content) {
    write_file_atomic(path, content);
    outputs_.push_back({{"role", role},
                        {"path", path},
                        {"bytes", content.size()},
                        {"sha256", sha256_hex(content)}});
  }

  void failure(std::string id, std::string kind, std::string error) {
    failures_.push_back(
        {{"id", std::move(id)}, {"kind", std::move(kind)},
         {"error", std::move(error)}});
  }

  ojson& config() { return config_; }
  ojson& metrics() { return metrics_; }
  void set_documents(std::size_t total) { documents_ = total; }
  bool has_failures() const { return !failures_.empty(); }
  std::size_t failure_count() const { return failures_.size(); }

  void write(const std::string& path) {
    ojson j;
    j["tool"] = "pseudokit";
    j["version"] = tool_version();
    j["subcommand"] = subcommand_;
    j["args"] = args_;
    j["config"] = config_;
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    if (documents_) {
      j["documents"] = {{"total", *documents_},
                        {"failed", failures_.size()},
                        {"succeeded", *documents_ - failures_.size()}};
    }
    j["failures"] = failures_;
    if (!metrics_.is_null()) j["metrics"] = metrics_;
    j["status"] = failures_.empty() ? "ok" : "partial";
    write_file_atomic(path, j.dump(2) + "\n");
  }

 private:
  std::string subcommand_;
  std::vector<std::string> args_;
  ojson config_ = ojson::object();
  ojson inputs_ = ojson::array();
  ojson outputs_ = ojson::array();
  ojson failures_ = ojson::array();
  ojson metrics_;
  std::optional<std::size_t> documents_;
};

struct CommonOptions {
  std::string in;
  std::string out;
  std::string manifest;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string detector = "oracle";
  std::string kg;
  std::string link_scope = "doc";
  bool ignore_case = false;
  bool no_word_boundary = false;
  std::size_t detector_pool = 1;
  int detector_timeout_ms = 60000;
};

struct LlmOptions {
  std::string endpoint;
  std::string model_extract = "text-curie-001";
  std::string model_replace = "gpt-3.5-turbo";
  std::string api_key_env = "LLM_API_KEY";
  std::string mock;
  std::string diagnostics;
  int max_retries = 3;
  double timeout = 60.0;
  int max_in_flight = 4;
};

struct EvalOptions {
  std::string gold;
  std::vector<std::string> systems;
  bool fold_case = false;
};

struct SynthOptions {
  std::string original;
  std::string rewritten;
  std::string model;
  double split = 0.9;
  std::optional<double> eval_split;
  TrainConfig train;
};

std::string manifest_path(const CommonOptions& o) {
  if (!o.manifest.empty()) return o.manifest;
  fs::path dir = fs::path(o.out).parent_path();
  return (dir / "manifest.json").string();
}

std::vector<Document> parse_documents(const std::string& content) {
  return read_jsonl(std::string_view(content));
}

ojson common_config(const CommonOptions& o) {
  return {{"in", o.in},       {"out", o.out},
          {"seed", o.seed},   {"workers", o.workers},
          {"manifest", manifest_path(o)}};
}

std::unique_ptr<Detector> build_detector(const CommonOptions& o,
                                         Manifest& manifest) {
  DetectorSpec spec = parse_detector_spec(o.detector);
  auto& cfg = manifest.config();
  cfg["detector"] = o.detector;
  switch (spec.kind) {
    case DetectorKind::kOracle:
      return std::make_unique<OracleDetector>();
    case DetectorKind::kGazetteer: {
      GazetteerOptions g;
      g.case_sensitive = !o.ignore_case;
      g.word_boundary = !o.no_word_boundary;
      cfg["gazetteer"] = {{"case_sensitive", g.case_sensitive},
                          {"word_boundary", g.word_boundary}};
      std::string content = manifest.input("lexicon", spec.argument);
      std::istringstream in(content);
      try {
        return std::make_unique<GazetteerDetector>(
            std::make_shared<const Gazetteer>(Gazetteer::load(in, g)),
            spec.argument);
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw UsageError(std::string("lexicon: ") + e.what());
      }
    }
    case DetectorKind::kExternal: {
      ExternalDetectorOptions x;
      x.pool_size = std::max(o.detector_pool, o.workers);
      x.timeout_ms = o.detector_timeout_ms;
      cfg["external"] = {{"pool_size", x.pool_size},
                         {"timeout_ms", x.timeout_ms}};
      try {
        return std::make_unique<ExternalDetector>(spec.argument, x);
      } catch (const DetectorError& e) {
        throw UsageError(std::string("external detector failed to start: ") +
                         e.what());
      }
    }
  }
  throw UsageError("unknown detector");
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const DetectorError*>(&e)) return "DetectorError";
  if (dynamic_cast<const SpanError*>(&e)) return "SpanError";
  if (dynamic_cast<const NoSurrogate*>(&e)) return "NoSurrogate";
  return "Error";
}

// Runs `fn` per document, keeping successes in input order and recording
// failures in the manifest.
template <typename Result, typename Fn>
std::vector<Result> per_document(std::span<const Document> docs,
                                 std::size_t workers, Manifest& manifest,
                                 Fn fn) {
  std::vector<std::optional<Result>> results(docs.size());
  std::vector<std::pair<std::string, std::string>> errors(docs.size());
  parallel_for(docs.size(), workers, [&](std::size_t i) {
    try {
      results[i] = fn(docs[i]);
    } catch (const std::exception& e) {
      errors[i] = {error_kind(e), e.what()};
    }
  });
  std::vector<Result> out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (results[i]) {
      out.push_back(std::move(*results[i]));
    } else {
      manifest.failure(docs[i].id, errors[i].first, errors[i].second);
    }
  }
  manifest.set_documents(docs.size());
  return out;
}

int finish(Manifest& manifest, const CommonOptions& o, std::ostream& err,
           std::string_view subcommand) {
  manifest.write(manifest_path(o));
  err << subcommand << ": done";
  if (manifest.has_failures()) {
    err << ", " << manifest.failure_count() << " document(s) failed";
  }
  err << "\n";
  return manifest.has_failures() ? kExitPartial : kExitOk;
}

int cmd_detect(const CommonOptions& o, Manifest& m, std::ostream& err) {
  m.config() = common_config(o);
  auto docs = parse_documents(m.input("documents", o.in));
  auto detector = build_detector(o, m);
  auto out = per_document<Document>(docs, o.workers, m, [&](const Document& d) {
    return Document{d.id, d.text, detector->detect(d)};
  });
  m.output("documents", o.out, write_jsonl(out));
  return finish(m, o, err, "detect");
}

int cmd_rewrite(RewriteMode mode, const CommonOptions& o, Manifest& m,
                std::ostream& err) {
  m.config() = common_config(o);
  if (o.link_scope != "doc" && o.link_scope != "corpus") {
    throw UsageError("--link-scope must be doc or corpus");
  }
  m.config()["link_scope"] = o.link_scope;
  m.config()["mode"] = mode_name(mode);
  auto docs = parse_documents(m.input("documents", o.in));
  std::optional<KnowledgeGraph> kg;
  if (mode == RewriteMode::kPseudonymize) {
    std::istringstream in(m.input("kg", o.kg));
    kg = KnowledgeGraph::load(in);
    m.config()["kg"] = o.kg;
  }
  auto detector = build_detector(o, m);
  SurrogateTable table;
  SurrogateTable* shared = o.link_scope == "corpus" ? &table : nullptr;
  auto out = per_document<Document>(docs, o.workers, m, [&](const Document& d) {
    auto spans = detector->detect(d);
    RewrittenDocument r = mode == RewriteMode::kSanitize
                              ? sanitize(d, spans, shared)
                              : pseudonymize(d, spans, *kg, o.seed, shared);
    return r.as_document();
  });
  m.output("documents", o.out, write_jsonl(out));
  return finish(m, o, err, mode_name(mode));
}

int cmd_gen_parallel(const CommonOptions& o, Manifest& m, std::ostream& err) {
  m.config() = common_config(o);
  m.config()["kg"] = o.kg;
  auto docs = parse_documents(m.input("documents", o.in));
  std::istringstream kg_in(m.input("kg", o.kg));
  KnowledgeGraph kg = KnowledgeGraph::load(kg_in);
  auto detector = build_detector(o, m);
  ParallelCorpus pc =
      generate_parallel_corpus(docs, *detector, kg, o.seed, o.workers);
  for (const auto& f : pc.failures) m.failure(f.id, "Error", f.error);
  m.set_documents(docs.size());
  std::ostringstream tsv;
  write_parallel_tsv(tsv, pc.pairs);
  m.output("parallel", o.out, tsv.str());
  return finish(m, o, err, "gen-parallel");
}

int cmd_llm(const CommonOptions& o, const LlmOptions& l, Manifest& m,
            std::ostream& err) {
  m.config() = common_config(o);
  if (l.mock.empty() == l.endpoint.empty()) {
    throw UsageError("exactly one of --endpoint or --mock is required");
  }
  auto docs = parse_documents(m.input("documents", o.in));
  std::unique_ptr<ChatClient> extractor, replacer;
  auto& cfg = m.config();
  if (!l.mock.empty()) {
    std::istringstream in(m.input("mock", l.mock));
    std::shared_ptr<MockChatClient> mock = MockChatClient::load(in);
    cfg["mock"] = l.mock;
    // Both stages answer from the same rule list.
    struct Shared : ChatClient {
      std::shared_ptr<MockChatClient> m;
      std::string complete(std::span<const ChatMessage> msgs) override {
        return m->complete(msgs);
      }
      int max_retries() const override { return m->max_retries(); }
    };
    auto a = std::make_unique<Shared>();
    a->m = mock;
    auto b = std::make_unique<Shared>();
    b->m = mock;
    extractor = std::move(a);
    replacer = std::move(b);
  } else {
    LlmEndpoint e;
    e.url = l.endpoint;
    e.api_key_env = l.api_key_env;
    e.timeout_seconds = l.timeout;
    e.max_retries = l.max_retries;
    e.max_in_flight = l.max_in_flight;
    e.model = l.model_extract;
    extractor = std::make_unique<HttpChatClient>(e);
    e.model = l.model_replace;
    replacer = std::make_unique<HttpChatClient>(e);
    cfg["endpoint"] = l.endpoint;
    cfg["model_extract"] = l.model_extract;
    cfg["model_replace"] = l.model_replace;
    cfg["api_key_env"] = l.api_key_env;
    cfg["max_retries"] = l.max_retries;
    cfg["timeout_seconds"] = l.timeout;
    cfg["max_in_flight"] = l.max_in_flight;
  }
  RetryPolicy policy;
  policy.jitter_seed = o.seed;
  auto items =
      llm_pseudonymize_batch(docs, *extractor, *replacer, policy, o.workers);
  std::vector<Document> out;
  std::ostringstream diag;
  for (const auto& item : items) {
    if (item.ok) {
      out.push_back(item.document.as_document());
    } else {
      m.failure(item.id, item.error_kind, item.error);
    }
    ojson d;
    d["id"] = item.id;
    d["ok"] = item.ok;
    if (!item.ok) {
      d["error_kind"] = item.error_kind;
      d["error"] = item.error;
    } else {
      d["diagnostics"] = item.diagnostics.to_json();
    }
    diag << d.dump() << "\n";
  }
  m.set_documents(docs.size());
  m.output("documents", o.out, write_jsonl(out));
  if (!l.diagnostics.empty()) m.output("diagnostics", l.diagnostics, diag.str());
  return finish(m, o, err, "llm-pseudonymize");
}

// "NAME=PATH" or "PATH" (named after the file stem).
std::pair<std::string, std::string> split_system(const std::string& s) {
  auto eq = s.find('=');
  if (eq != std::string::npos && eq > 0) {
    return {s.substr(0, eq), s.substr(eq + 1)};
  }
  return {fs::path(s).stem().string(), s};
}

int cmd_eval_privacy(const CommonOptions& o, const EvalOptions& e, Manifest& m,
                     std::ostream& err) {
  m.config() = common_config(o);
  m.config()["gold"] = e.gold;
  m.config()["fold_case"] = e.fold_case;
  std::vector<std::string> systems = e.systems;
  if (!o.in.empty()) systems.insert(systems.begin(), o.in);
  if (systems.empty()) throw UsageError("at least one --system is required");
  m.config()["systems"] = systems;
  auto gold = parse_documents(m.input("gold", e.gold));
  std::vector<std::pair<std::string, LeakageReport>> rows;
  for (const auto& s : systems) {
    auto [name, path] = split_system(s);
    auto docs = parse_documents(m.input("system:" + name, path));
    rows.emplace_back(name, leakage_report(gold, docs,
                                           {e.fold_case, o.workers}));
  }
  ojson table = leakage_table_json(rows);
  m.metrics() = table;
  m.output("report", o.out, table.dump(2) + "\n");
  for (const auto& [name, r] : rows) {
    err << name << ": micro " << r.micro_mean << "% macro " << r.macro_mean
        << "%\n";
  }
  return finish(m, o, err, "eval-privacy");
}

ojson prf_json(const PrfResult& r) {
  return {{"precision", r.precision}, {"recall", r.recall},
          {"f_score", r.f_score},     {"tp", r.tp},
          {"fp", r.fp},               {"fn", r.fn},
          {"tn", r.tn},               {"degenerate", r.degenerate}};
}

ojson train_config_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"epochs", c.epochs},
          {"batch_size", c.batch_size},       {"hash_bits", c.hash_bits},
          {"min_n", c.min_n},                 {"max_n", c.max_n}};
}

// Either --in labeled JSONL, or --original and --rewritten document corpora.
struct SynthData {
  std::vector<LabeledText> labeled;
  std::vector<std::pair<std::string, std::string>> pairs;
  bool paired = false;
};

SynthData load_synth_data(const CommonOptions& o, const SynthOptions& s,
                          Manifest& m) {
  SynthData d;
  bool have_pairs = !s.original.empty() || !s.rewritten.empty();
  if (have_pairs == !o.in.empty()) {
    throw UsageError(
        "give either --in <labeled.jsonl> or --original and --rewritten");
  }
  if (have_pairs) {
    if (s.original.empty() || s.rewritten.empty()) {
      throw UsageError("--original and --rewritten go together");
    }
    auto orig = parse_documents(m.input("original", s.original));
    auto rew = parse_documents(m.input("rewritten", s.rewritten));
    d.pairs = pair_texts(orig, rew);
    d.paired = true;
    m.config()["original"] = s.original;
    m.config()["rewritten"] = s.rewritten;
  } else {
    std::istringstream in(m.input("labeled", o.in));
    d.labeled = read_labeled_jsonl(in);
  }
  return d;
}

int cmd_synth_train(const CommonOptions& o, const SynthOptions& s, Manifest& m,
                    std::ostream& err) {
  m.config() = common_config(o);
  m.config()["split"] = s.split;
  m.config()["train"] = train_config_json(s.train);
  validate_config(s.train);
  SynthData d = load_synth_data(o, s, m);
  SynthExperiment ex =
      d.paired ? run_synth_experiment(d.pairs, s.train, o.seed, s.split,
                                      o.workers)
               : run_synth_experiment(d.labeled, s.train, o.seed, s.split,
                                      o.workers);
  std::ostringstream model;
  ex.model.save(model);
  m.output("model", o.out, model.str());
  m.metrics() = {{"train_items", ex.train_items},
                 {"heldout_items", ex.heldout_items},
                 {"final_loss", ex.model.final_loss()},
                 {"epoch_losses", ex.model.epoch_losses},
                 {"heldout", prf_json(ex.heldout)}};
  err << "synth-train: final loss " << ex.model.final_loss() << ", held-out F "
      << ex.heldout.f_score << "\n";
  return finish(m, o, err, "synth-train");
}

int cmd_synth_eval(const CommonOptions& o, const SynthOptions& s, Manifest& m,
                   std::ostream& err) {
  m.config() = common_config(o);
  m.config()["model"] = s.model;
  std::istringstream model_in(m.input("model", s.model));
  SyntheticityModel model = SyntheticityModel::load(model_in);
  SynthData d = load_synth_data(o, s, m);
  std::vector<LabeledText> data;
  std::size_t n = d.paired ? d.pairs.size() : d.labeled.size();
  std::vector<std::size_t> keep;
  if (s.eval_split) {
    // Reproduces the held-out fold of synth-train with the same seed.
    m.config()["split"] = *s.eval_split;
    keep = split_indices(n, *s.eval_split, derive_seed(o.seed, "split")).second;
  } else {
    for (std::size_t i = 0; i < n; ++i) keep.push_back(i);
  }
  for (auto i : keep) {
    if (d.paired) {
      data.push_back({d.pairs[i].first, SynthLabel::kOriginal});
      data.push_back({d.pairs[i].second, SynthLabel::kRewritten});
    } else {
      data.push_back(d.labeled[i]);
    }
  }
  PrfResult r = evaluate_syntheticity(model, data);
  ojson metrics = {{"items", data.size()}, {"prf", prf_json(r)}};
  m.metrics() = metrics;
  m.output("metrics", o.out, metrics.dump(2) + "\n");
  err << "synth-eval: P " << r.precision << " R " << r.recall << " F "
      << r.f_score << "\n";
  return finish(m, o, err, "synth-eval");
}

int cmd_conll_import(const CommonOptions& o, Manifest& m, std::ostream& err) {
  m.config() = {{"in", o.in}, {"out", o.out}, {"manifest", manifest_path(o)}};
  auto docs = parse_conll(std::string_view(m.input("conll", o.in)));
  m.set_documents(docs.size());
  m.output("documents", o.out, write_jsonl(docs));
  return finish(m, o, err, "conll-import");
}

void add_io(CLI::App* sub, CommonOptions& o, bool need_in = true) {
  auto* in = sub->add_option("--in", o.in, "Input file");
  if (need_in) in->required();
  sub->add_option("--out", o.out, "Output file")->required();
  sub->add_option("--manifest", o.manifest,
                  "Manifest path (default: manifest.json next to --out)");
}

void add_run(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  sub->add_option("--workers", o.workers, "Documents processed in parallel")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_detector(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--detector", o.detector,
                  "oracle | gazetteer:<lexicon.tsv> | external:<command>")
      ->capture_default_str();
  sub->add_flag("--ignore-case", o.ignore_case,
                "Gazetteer: match case-insensitively");
  sub->add_flag("--no-word-boundary", o.no_word_boundary,
                "Gazetteer: allow matches inside words");
  sub->add_option("--detector-pool", o.detector_pool,
                  "External detector: worker processes")
      ->check(CLI::PositiveNumber);
  sub->add_option("--detector-timeout-ms", o.detector_timeout_ms,
                  "External detector: per-document timeout")
      ->check(CLI::PositiveNumber);
}

void add_synth_data(CLI::App* sub, SynthOptions& s) {
  sub->add_option("--original", s.original, "Original documents (JSONL)");
  sub->add_option("--rewritten", s.rewritten,
                  "Rewritten documents (JSONL), paired by id");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Detect, sanitize and pseudonymize named entities in text "
               "corpora, and evaluate the results.",
               "pseudokit"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  CommonOptions o;
  LlmOptions l;
  EvalOptions e;
  SynthOptions s;

  auto* detect = app.add_subcommand("detect", "Run a detector over documents");
  add_io(detect, o);
  add_run(detect, o);
  add_detector(detect, o);

  auto* sanitize = app.add_subcommand(
      "sanitize", "Replace entities with enumerated placeholders");
  add_io(sanitize, o);
  add_run(sanitize, o);
  add_detector(sanitize, o);
  sanitize->add_option("--link-scope", o.link_scope, "doc | corpus")
      ->check(CLI::IsMember({"doc", "corpus"}))
      ->capture_default_str();

  auto* pseudo = app.add_subcommand(
      "pseudonymize", "Replace entities with knowledge-graph surrogates");
  add_io(pseudo, o);
  add_run(pseudo, o);
  add_detector(pseudo, o);
  pseudo->add_option("--kg", o.kg, "Knowledge graph (JSONL)")->required();
  pseudo->add_option("--link-scope", o.link_scope, "doc | corpus")
      ->check(CLI::IsMember({"doc", "corpus"}))
      ->capture_default_str();

  auto* llm = app.add_subcommand("llm-pseudonymize",
                                 "Pseudonymize through a two-stage LLM chain");
  add_io(llm, o);
  add_run(llm, o);
  llm->add_option("--endpoint", l.endpoint, "Chat-completions URL");
  llm->add_option("--model-extract", l.model_extract, "Extraction model")
      ->capture_default_str();
  llm->add_option("--model-replace", l.model_replace, "Replacement model")
      ->capture_default_str();
  llm->add_option("--api-key-env", l.api_key_env,
                  "Environment variable holding the API key")
      ->capture_default_str();
  llm->add_option("--mock", l.mock, "Mock fixture (YAML) instead of a server");
  llm->add_option("--max-retries", l.max_retries, "Retries per request")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  llm->add_option("--timeout", l.timeout, "Request timeout in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  llm->add_option("--max-in-flight", l.max_in_flight,
                  "Concurrent requests per stage")
      ->check(CLI::Range(1, 1024))
      ->capture_default_str();
  llm->add_option("--diagnostics", l.diagnostics,
                  "Per-document diagnostics (JSONL)");

  auto* gen = app.add_subcommand(
      "gen-parallel", "Write (original, pseudonymized) pairs as TSV");
  add_io(gen, o);
  add_run(gen, o);
  add_detector(gen, o);
  gen->add_option("--kg", o.kg, "Knowledge graph (JSONL)")->required();

  auto* evalp = app.add_subcommand("eval-privacy",
                                   "Per-category leakage of gold entities");
  add_io(evalp, o, false);
  add_run(evalp, o);
  evalp->add_option("--gold", e.gold, "Gold documents (JSONL)")->required();
  evalp->add_option("--system", e.systems,
                    "Rewritten corpus as NAME=PATH or PATH; repeatable");
  evalp->add_flag("--fold-case", e.fold_case, "Match case-insensitively");

  auto* strain = app.add_subcommand(
      "synth-train", "Train the rewritten-text classifier");
  add_io(strain, o, false);
  add_run(strain, o);
  add_synth_data(strain, s);
  strain->add_option("--split", s.split, "Training fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  strain->add_option("--lr", s.train.learning_rate, "Initial learning rate")
      ->capture_default_str();
  strain->add_option("--epochs", s.train.epochs)->capture_default_str();
  strain->add_option("--batch-size", s.train.batch_size)
      ->capture_default_str();
  strain->add_option("--hash-bits", s.train.hash_bits)->capture_default_str();

  auto* seval = app.add_subcommand(
      "synth-eval", "Score a trained classifier on labeled texts");
  add_io(seval, o, false);
  add_run(seval, o);
  add_synth_data(seval, s);
  seval->add_option("--model", s.model, "Model file")->required();
  seval->add_option("--split", s.eval_split,
                    "Score only the held-out fold of this training fraction")
      ->check(CLI::Range(0.0, 1.0));

  auto* conll = app.add_subcommand("conll-import",
                                   "Convert CoNLL-2003 to JSONL documents");
  add_io(conll, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n";
    auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  Manifest manifest(name, args);
  try {
    if (name == "detect") return cmd_detect(o, manifest, err);
    if (name == "sanitize") {
      return cmd_rewrite(RewriteMode::kSanitize, o, manifest, err);
    }
    if (name == "pseudonymize") {
      return cmd_rewrite(RewriteMode::kPseudonymize, o, manifest, err);
    }
    if (name == "llm-pseudonymize") return cmd_llm(o, l, manifest, err);
    if (name == "gen-parallel") return cmd_gen_parallel(o, manifest, err);
    if (name == "eval-privacy") return cmd_eval_privacy(o, e, manifest, err);
    if (name == "synth-train") return cmd_synth_train(o, s, manifest, err);
    if (name == "synth-eval") return cmd_synth_eval(o, s, manifest, err);
    if (name == "conll-import") return cmd_conll_import(o, manifest, err);
    throw UsageError("unknown subcommand " + name);
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << "\n" << sub->help();
    return kExitUsage;
  } catch (const ParseError& ex) {
    err << "error: " << ex.what() << "\n" << sub->help();
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitPartial;
  }
}

int run(const std::vector<std::string>& args) {
  return run(args, std::cout, std::cerr);
}

}  // namespace pseudokit

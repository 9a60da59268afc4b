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

// Entity detection. Three detectors share one contract: the oracle replays
// gold spans, the gazetteer does lexicon matching, and the external adapter
// talks to any NER process over line-delimited JSON.

#ifndef PSEUDOKIT_DETECT_H_
#define PSEUDOKIT_DETECT_H_

#include <condition_variable>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pseudokit/corpus.h"

namespace pseudokit {

// Sorted, pairwise non-overlapping result. Longer spans win; ties go to the
// earlier start, then to category order PER < LOC < ORG.
std::vector<EntitySpan> resolve_overlaps(std::vector<EntitySpan> spans);

struct GazetteerOptions {
  bool case_sensitive = true;
  bool word_boundary = true;
};

// Lexicon of surface -> category compiled into an Aho-Corasick automaton over
// code points. Immutable after construction.
class Gazetteer {
 public:
  // Throws Error on an empty surface or on one surface (after case folding
  // when case-insensitive) mapped to two categories.
  Gazetteer(const std::vector<std::pair<std::string, EntityCategory>>& entries,
            GazetteerOptions options = {});

  // Lexicon file: one `surface<TAB>CATEGORY` per line; blank lines and lines
  // starting with '#' are ignored.
  static Gazetteer load(std::istream& in, GazetteerOptions options = {});
  static Gazetteer load_file(const std::string& path,
                             GazetteerOptions options = {});

  std::vector<EntitySpan> match(std::string_view text) const;

  std::size_t size() const { return entries_.size(); }
  const GazetteerOptions& options() const { return options_; }

 private:
  struct Node {
    std::map<char32_t, int> next;
    int fail = 0;
    // Entry indices ending here, including via the dictionary suffix chain.
    std::vector<int> outputs;
  };

  void build();

  GazetteerOptions options_;
  // Normalized (possibly folded) pattern and its category.
  std::vector<std::pair<std::u32string, EntityCategory>> entries_;
  std::vector<Node> nodes_;
};

std::vector<EntitySpan> gazetteer_match(std::string_view text,
                                        const Gazetteer& gazetteer);

class Detector {
 public:
  virtual ~Detector() = default;
  // Returns sorted, non-overlapping spans whose surfaces match `doc.text`.
  virtual std::vector<EntitySpan> detect(const Document& doc) const = 0;
  virtual std::string describe() const = 0;
};

class OracleDetector : public Detector {
 public:
  // Throws DetectorError when the document has no gold spans.
  std::vector<EntitySpan> detect(const Document& doc) const override;
  std::string describe() const override { return "oracle"; }
};

class GazetteerDetector : public Detector {
 public:
  GazetteerDetector(std::shared_ptr<const Gazetteer> gazetteer,
                    std::string source = {})
      : gazetteer_(std::move(gazetteer)), source_(std::move(source)) {}
  std::vector<EntitySpan> detect(const Document& doc) const override;
  std::string describe() const override { return "gazetteer:" + source_; }

 private:
  std::shared_ptr<const Gazetteer> gazetteer_;
  std::string source_;
};

struct ExternalDetectorOptions {
  // Number of worker processes; each has at most one document in flight.
  std::size_t pool_size = 1;
  // Per-response timeout.
  int timeout_ms = 60000;
};

// Runs `command` via /bin/sh -c. Child protocol: on startup the child prints
// {"proto": 1}; then for each {"id","text"} line on stdin it answers one
// {"id","entities":[{"start","end","category"}]} line on stdout. The child
// exits 0 on stdin EOF.
class ExternalDetector : public Detector {
 public:
  ExternalDetector(std::string command, ExternalDetectorOptions options = {});
  ~ExternalDetector() override;
  ExternalDetector(const ExternalDetector&) = delete;
  ExternalDetector& operator=(const ExternalDetector&) = delete;

  std::vector<EntitySpan> detect(const Document& doc) const override;
  std::string describe() const override { return "external:" + command_; }

 private:
  class Worker;

  std::unique_ptr<Worker> acquire() const;
  void release(std::unique_ptr<Worker> worker) const;

  std::string command_;
  ExternalDetectorOptions options_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  mutable std::vector<std::unique_ptr<Worker>> idle_;
  mutable std::size_t live_ = 0;
};

enum class DetectorKind { kOracle, kGazetteer, kExternal };

struct DetectorSpec {
  DetectorKind kind = DetectorKind::kOracle;
  // Lexicon path or command line.
  std::string argument;
};

// Parses "oracle", "gazetteer:<lexicon>" or "external:<cmd>". Throws
// UsageError otherwise.
DetectorSpec parse_detector_spec(std::string_view spec);

std::unique_ptr<Detector> make_detector(
    const DetectorSpec& spec, GazetteerOptions gazetteer_options = {},
    ExternalDetectorOptions external_options = {});

inline std::vector<EntitySpan> detect(const Document& doc,
                                      const Detector& detector) {
  return detector.detect(doc);
}

}  // namespace pseudokit

#endif  // PSEUDOKIT_DETECT_H_

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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "json.hpp"
#include "pseudokit/eval.h"
#include "test_util.h"

namespace pseudokit {
namespace {

using testing::data_path;
using testing::slurp;

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, HelpAndVersion) {
  auto r = cli({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("pseudonymize"), std::string::npos);
  r = cli({"--version"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find(tool_version()), std::string::npos);
}

TEST(Cli, UsageErrorsExit2) {
  testing::TempDir tmp;
  auto r = cli({"pseudonymize", "--in", data_path("worked_example.jsonl"), "--out",
                tmp.file("o.jsonl")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("--kg"), std::string::npos);
  r = cli({"sanitize", "--in", data_path("worked_example.jsonl"), "--out",
           tmp.file("o.jsonl"), "--frobnicate"});
  EXPECT_EQ(r.code, kExitUsage);
  r = cli({"sanitize", "--in", tmp.file("missing.jsonl"), "--out",
           tmp.file("o.jsonl")});
  EXPECT_EQ(r.code, kExitUsage);
  r = cli({"sanitize", "--in", data_path("worked_example.jsonl"), "--out",
           tmp.file("o.jsonl"), "--link-scope", "galaxy"});
  EXPECT_EQ(r.code, kExitUsage);
  r = cli({"llm-pseudonymize", "--in", data_path("chain_example.jsonl"), "--out",
           tmp.file("o.jsonl")});
  EXPECT_EQ(r.code, kExitUsage);
  r = cli({"nonsense"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(std::filesystem::exists(tmp.file("o.jsonl")));
}

TEST(Cli, WorkedExamplePseudonymize) {
  testing::TempDir tmp;
  auto r = cli({"pseudonymize", "--in", data_path("worked_example.jsonl"), "--kg",
                data_path("kg_fixture.jsonl"), "--out", tmp.file("o.jsonl"),
                "--seed", "7"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto docs = testing::load_docs(tmp.file("o.jsonl"));
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].text,
            "Sophie works at Manchester Evening News in Manchester with Emma "
            "and Tom.");

  auto m = nlohmann::json::parse(slurp(tmp.file("manifest.json")));
  EXPECT_EQ(m["subcommand"], "pseudonymize");
  EXPECT_EQ(m["status"], "ok");
  EXPECT_EQ(m["documents"]["total"], 1);
  EXPECT_EQ(m["config"]["seed"], 7);
  bool saw_output = false;
  for (const auto& o : m["outputs"]) {
    if (o["path"] == tmp.file("o.jsonl")) {
      EXPECT_EQ(o["sha256"], sha256_hex(slurp(tmp.file("o.jsonl"))));
      saw_output = true;
    }
  }
  EXPECT_TRUE(saw_output);
  EXPECT_EQ(m["inputs"].size(), 2u);
}

TEST(Cli, RerunsAreByteIdentical) {
  testing::TempDir a, b;
  for (auto* d : {&a, &b}) {
    auto r = cli({"pseudonymize", "--in", data_path("fixture_corpus.jsonl"),
                  "--kg", data_path("kg_fixture.jsonl"), "--out",
                  d->file("o.jsonl"), "--manifest", a.file(d == &a ? "m1" : "m2"),
                  "--seed", "3", "--workers", d == &a ? "1" : "4"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  EXPECT_EQ(slurp(a.file("o.jsonl")), slurp(b.file("o.jsonl")));
}

TEST(Cli, SanitizeCorpusScope) {
  testing::TempDir tmp;
  std::string in = tmp.file("in.jsonl");
  testing::spit(in,
                R"({"id":"1","text":"Anna.","entities":[{"start":0,"end":4,"category":"PER","surface":"Anna"}]})"
                "\n"
                R"({"id":"2","text":"Bo and Anna.","entities":[{"start":0,"end":2,"category":"PER","surface":"Bo"},{"start":7,"end":11,"category":"PER","surface":"Anna"}]})"
                "\n");
  auto r = cli({"sanitize", "--in", in, "--out", tmp.file("o.jsonl"),
                "--link-scope", "corpus"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto docs = testing::load_docs(tmp.file("o.jsonl"));
  EXPECT_EQ(docs[0].text, "PERSON_1.");
  EXPECT_EQ(docs[1].text, "PERSON_2 and PERSON_1.");
  r = cli({"sanitize", "--in", in, "--out", tmp.file("o.jsonl")});
  docs = testing::load_docs(tmp.file("o.jsonl"));
  EXPECT_EQ(docs[1].text, "PERSON_1 and PERSON_2.");
}

TEST(Cli, PartialFailureExits1) {
  testing::TempDir tmp;
  std::string in = tmp.file("in.jsonl");
  testing::spit(in,
                R"({"id":"ok","text":"Anna.","entities":[{"start":0,"end":4,"category":"PER","surface":"Anna"}]})"
                "\n"
                R"({"id":"bad","text":"no gold here"})"
                "\n");
  auto r = cli({"sanitize", "--in", in, "--out", tmp.file("o.jsonl")});
  EXPECT_EQ(r.code, kExitPartial);
  auto docs = testing::load_docs(tmp.file("o.jsonl"));
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].id, "ok");
  auto m = nlohmann::json::parse(slurp(tmp.file("manifest.json")));
  EXPECT_EQ(m["status"], "partial");
  EXPECT_EQ(m["documents"]["failed"], 1);
  EXPECT_EQ(m["failures"][0]["id"], "bad");
}

TEST(Cli, LlmMock) {
  testing::TempDir tmp;
  auto r = cli({"llm-pseudonymize", "--in", data_path("chain_example.jsonl"), "--mock",
                data_path("mock_chain.yaml"), "--out", tmp.file("o.jsonl"),
                "--diagnostics", tmp.file("d.jsonl")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto docs = testing::load_docs(tmp.file("o.jsonl"));
  EXPECT_EQ(docs[0].text.substr(0, 7), "Michael");
  auto diag = nlohmann::json::parse(slurp(tmp.file("d.jsonl")));
  EXPECT_EQ(diag["diagnostics"]["extracted"].size(), 7u);

  r = cli({"llm-pseudonymize", "--in", data_path("chain_example.jsonl"), "--mock",
           data_path("mock_length_mismatch.yaml"), "--out",
           tmp.file("o.jsonl")});
  EXPECT_EQ(r.code, kExitPartial);
  auto m = nlohmann::json::parse(slurp(tmp.file("manifest.json")));
  EXPECT_EQ(m["failures"][0]["kind"], "AlignmentError");
}

TEST(Cli, EvalPrivacy) {
  testing::TempDir tmp;
  auto r = cli({"eval-privacy", "--gold", data_path("leakage_gold.jsonl"),
                "--system", "mixed=" + data_path("leakage_rewritten.jsonl"),
                "--system", data_path("leakage_gold.jsonl"), "--out",
                tmp.file("t.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto t = nlohmann::json::parse(slurp(tmp.file("t.json")));
  ASSERT_EQ(t["rows"].size(), 2u);
  EXPECT_EQ(t["rows"][0]["system"], "mixed");
  EXPECT_NEAR(t["rows"][0]["micro"].get<double>(), 45.4545, 1e-3);
  EXPECT_DOUBLE_EQ(t["rows"][1]["micro"].get<double>(), 100.0);
}

TEST(Cli, SynthTrainAndEval) {
  testing::TempDir tmp;
  std::string orig = tmp.file("orig.jsonl");
  {
    auto docs = testing::load_docs(data_path("fixture_corpus.jsonl"));
    docs.resize(200);
    testing::spit(orig, write_jsonl(docs));
  }
  auto r = cli({"sanitize", "--in", orig, "--out", tmp.file("san.jsonl")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  r = cli({"synth-train", "--original", orig, "--rewritten",
           tmp.file("san.jsonl"), "--out", tmp.file("model.json"), "--epochs",
           "5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto m = nlohmann::json::parse(slurp(tmp.file("manifest.json")));
  EXPECT_GT(m["metrics"]["heldout"]["f_score"].get<double>(), 90.0);
  r = cli({"synth-eval", "--model", tmp.file("model.json"), "--original", orig,
           "--rewritten", tmp.file("san.jsonl"), "--out",
           tmp.file("eval.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto e = nlohmann::json::parse(slurp(tmp.file("eval.json")));
  EXPECT_GT(e["prf"]["f_score"].get<double>(), 90.0);
}

TEST(Cli, ConllImportAndGenParallel) {
  testing::TempDir tmp;
  auto r = cli({"conll-import", "--in", data_path("conll_synthetic.conll"),
                "--out", tmp.file("c.jsonl")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(testing::load_docs(tmp.file("c.jsonl")),
            testing::load_docs(data_path("conll_synthetic_expected.jsonl")));
  r = cli({"gen-parallel", "--in", data_path("worked_example.jsonl"), "--kg",
           data_path("kg_fixture.jsonl"), "--out", tmp.file("p.tsv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto tsv = slurp(tmp.file("p.tsv"));
  EXPECT_NE(tsv.find("\tSophie works at"), std::string::npos);
}

TEST(Cli, DetectWithExternalProcess) {
  testing::TempDir tmp;
  auto r = cli({"detect", "--in", data_path("worked_example.jsonl"), "--out",
                tmp.file("d.jsonl"), "--detector",
                std::string("external:") + PSEUDOKIT_FAKE_NER + " lexicon Sarah=PER"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto docs = testing::load_docs(tmp.file("d.jsonl"));
  ASSERT_EQ(docs[0].gold_spans->size(), 1u);
  r = cli({"detect", "--in", data_path("worked_example.jsonl"), "--out",
           tmp.file("d.jsonl"), "--detector",
           std::string("external:") + PSEUDOKIT_FAKE_NER + " quit"});
  EXPECT_EQ(r.code, kExitUsage);
}

TEST(Cli, BinaryExitCodes) {
  std::string bin = PSEUDOKIT_CLI;
  int status = std::system((bin + " --version > /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(status), 0);
  status = std::system((bin + " sanitize 2> /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
}

}  // namespace
}  // namespace pseudokit

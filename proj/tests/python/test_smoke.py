# Copyright 2026 The Pseudokit Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


import json
import os
import pathlib

import pytest

import pseudokit

DATA = pathlib.Path(os.environ.get(
    "PSEUDOKIT_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data"))


def load(name):
    return pseudokit.read_jsonl((DATA / name).read_text(encoding="utf-8"))


def test_worked_example_rows():
    doc = load("worked_example.jsonl")[0]
    san = pseudokit.sanitize(doc, doc.spans)
    assert san["text"] == ("PERSON_1 works at ORGANIZATION_1 in LOCATION_1 "
                           "with PERSON_2 and PERSON_3.")
    assert san["mapping"][("PER", "sarah")] == "PERSON_1"
    kg = pseudokit.KnowledgeGraph.load(str(DATA / "kg_fixture.jsonl"))
    ps = pseudokit.pseudonymize(doc, doc.spans, kg, seed=3)
    assert ps["text"] == ("Sophie works at Manchester Evening News in "
                          "Manchester with Emma and Tom.")
    assert kg.candidates("Sarah", "PER") == ["Sophie"]


def test_spans_use_code_points():
    span = pseudokit.make_span("Zürich is far", 0, 6, "LOC")
    assert span.surface == "Zürich"
    with pytest.raises(pseudokit.SpanError):
        pseudokit.Document("x", "abc", [pseudokit.EntitySpan(1, 9, "PER", "bc")])


def test_gazetteer_and_leakage():
    spans = pseudokit.gazetteer_match(
        "Anna met Annabel in Oslo", [("Anna", "PER"), ("Oslo", "LOC")])
    assert [(s.start, s.end, s.category) for s in spans] == [
        (0, 4, "PER"), (20, 24, "LOC")]
    gold = load("leakage_gold.jsonl")
    rewritten = load("leakage_rewritten.jsonl")
    report = pseudokit.leakage_report(gold, rewritten)
    assert report["PER"]["leaked"] == 3 and report["PER"]["total"] == 5
    assert report["micro"] == pytest.approx(500 / 11)
    assert report["macro"] == pytest.approx(45.0)


def test_syntheticity_ordering():
    docs = load("fixture_corpus.jsonl")[:400]
    pairs = [(d.text, pseudokit.sanitize(d, d.spans)["text"]) for d in docs]
    result = pseudokit.synth_experiment(pairs, seed=1)
    assert result["heldout_items"] == 80
    assert result["f_score"] > 90


def test_cli_round_trip(tmp_path):
    out = tmp_path / "out.jsonl"
    code, _, err = pseudokit.run_cli(
        ["sanitize", "--in", str(DATA / "worked_example.jsonl"), "--out", str(out)])
    assert code == 0, err
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["status"] == "ok"
    code, _, err = pseudokit.run_cli(["pseudonymize", "--out", str(out)])
    assert code == 2 and "--kg" in err


def test_errors_are_typed():
    with pytest.raises(pseudokit.ParseError):
        pseudokit.read_jsonl("{not json}\n")
    assert issubclass(pseudokit.UsageError, pseudokit.Error)

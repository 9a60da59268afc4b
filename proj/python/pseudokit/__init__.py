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

"""Entity sanitization, pseudonymization and leakage evaluation."""

from ._core import (
    Document,
    EntitySpan,
    Error,
    KnowledgeGraph,
    ParseError,
    SpanError,
    UsageError,
    __version__,
    gazetteer_match,
    leakage_report,
    make_span,
    parse_conll,
    pseudonymize,
    read_jsonl,
    run_cli,
    sanitize,
    synth_experiment,
    write_jsonl,
)

__all__ = [
    "Document",
    "EntitySpan",
    "Error",
    "KnowledgeGraph",
    "ParseError",
    "SpanError",
    "UsageError",
    "gazetteer_match",
    "leakage_report",
    "make_span",
    "parse_conll",
    "pseudonymize",
    "read_jsonl",
    "run_cli",
    "sanitize",
    "synth_experiment",
    "write_jsonl",
]

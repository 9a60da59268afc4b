#!/usr/bin/env python3
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

"""Regenerates the files under data/. Output is deterministic."""

import argparse
import json
import os
import random

SEED = 20231

# (label, gender, language_of_origin)
PEOPLE = [
    ("Sarah", "female", "English"), ("Sophie", "female", "English"),
    ("Rachel", "female", "Hebrew"), ("Emma", "female", "Hebrew"),
    ("David", "male", "Hebrew"), ("Tom", "male", "Hebrew"),
]
_BULK_PEOPLE = {
    ("female", "French"): "Camille Chloe Manon Juliette Louise Amelie",
    ("female", "German"): "Anna Lena Katharina Greta Johanna",
    ("female", "Italian"): "Giulia Francesca Chiara Alessia",
    ("female", "Spanish"): "Lucia Carmen Elena Isabel",
    ("female", "Russian"): "Natasha Olga Tatiana",
    ("female", "Japanese"): "Yuki Haruka Sakura",
    ("female", "Arabic"): "Fatima Layla Amira",
    ("female", "Irish"): "Siobhan Aoife Niamh",
    ("male", "English"): "James William Henry George Oliver Harry Jack",
    ("male", "French"): "Pierre Louis Antoine Julien Mathieu",
    ("male", "German"): "Lukas Felix Jonas Stefan Klaus",
    ("male", "Italian"): "Marco Luca Matteo Giovanni",
    ("male", "Spanish"): "Carlos Javier Diego Miguel",
    ("male", "Russian"): "Dmitri Ivan Sergei",
    ("male", "Japanese"): "Hiroshi Kenji Takeshi",
    ("male", "Arabic"): "Omar Karim Tariq",
    ("male", "Irish"): "Sean Liam Ciaran",
}
for (gender, lang), names in _BULK_PEOPLE.items():
    PEOPLE += [(n, gender, lang) for n in names.split()]

CITIES = {
    "United Kingdom": ["London", "Manchester"],
    "France": ["Paris", "Lyon", "Marseille", "Toulouse", "Nice"],
    "Germany": ["Berlin", "Munich", "Hamburg", "Cologne", "Frankfurt"],
    "Italy": ["Rome", "Milan", "Naples", "Turin"],
    "Spain": ["Madrid", "Barcelona", "Valencia", "Seville"],
    "United States": ["Boston", "Chicago", "Seattle", "Denver", "Houston",
                      "Atlanta"],
    "Japan": ["Tokyo", "Osaka", "Kyoto", "Nagoya"],
    "Canada": ["Toronto", "Vancouver", "Montreal", "Calgary"],
    "Australia": ["Sydney", "Melbourne", "Brisbane", "Perth"],
    "Netherlands": ["Amsterdam", "Rotterdam", "Utrecht"],
    "Russia": ["Moscow", "Novosibirsk", "Kazan"],
}
EXTRA_COUNTRIES = ["Brazil", "Mexico", "India", "Egypt", "Kenya", "Norway",
                   "Sweden", "Poland", "Portugal", "Switzerland"]

# industry -> (class label, {country: [labels]})
ORGS = {
    "newspaper": ("newspaper", {
        "United Kingdom": ["The Times", "Manchester Evening News"],
        "France": ["Le Monde", "Le Figaro"],
        "Germany": ["Die Zeit", "Der Spiegel"],
        "Italy": ["Corriere della Sera", "La Repubblica"],
        "Spain": ["El Pais", "El Mundo"],
        "United States": ["The New York Times", "The Washington Post"],
        "Japan": ["Asahi Shimbun", "Yomiuri Shimbun"],
    }),
    "technology": ("technology company", {
        "United States": ["Google", "Microsoft", "Apple", "IBM", "Intel"],
        "Germany": ["SAP", "Siemens"],
        "Japan": ["Sony", "Nintendo"],
        "Canada": ["Shopify", "OpenText"],
        "France": ["Dassault Systemes", "Capgemini"],
    }),
    "food": ("food company", {
        "France": ["Danone", "Lactalis"],
        "Switzerland": ["Nestle", "Lindt"],
        "Italy": ["Barilla", "Ferrero"],
        "United States": ["Kraft", "Kellogg", "PepsiCo"],
        "United Kingdom": ["Cadbury", "Unilever"],
    }),
    "automotive": ("automaker", {
        "Germany": ["Volkswagen", "BMW", "Porsche"],
        "Italy": ["Fiat", "Ferrari"],
        "Japan": ["Toyota", "Honda", "Mazda"],
        "United States": ["Ford", "Tesla"],
        "France": ["Renault", "Peugeot"],
    }),
    "banking": ("bank", {
        "Germany": ["Deutsche Bank", "Commerzbank"],
        "France": ["BNP Paribas", "Societe Generale"],
        "Italy": ["UniCredit", "Intesa Sanpaolo"],
        "Spain": ["Santander", "BBVA"],
        "United Kingdom": ["Barclays", "HSBC", "Lloyds"],
        "United States": ["Citigroup", "Goldman Sachs"],
    }),
    "retail": ("retailer", {
        "United Kingdom": ["Tesco", "Sainsbury"],
        "France": ["Carrefour", "Auchan"],
        "Germany": ["Aldi", "Lidl"],
        "United States": ["Walmart", "Costco"],
        "Spain": ["Zara", "Mercadona"],
    }),
}


def slug(s):
    return "".join(c.lower() if c.isalnum() else "_" for c in s)


def build_kg():
    nodes, edges = [], []

    def node(nid, label, cat, attrs):
        nodes.append({"id": nid, "label": label, "category": cat,
                      "attrs": attrs})

    def edge(src, dst, prop):
        edges.append({"src": src, "dst": dst, "prop": prop})

    node("class/human", "human", "PER", {})
    for label, gender, lang in PEOPLE:
        nid = "per/" + slug(label)
        node(nid, label, "PER",
             {"gender": gender, "language_of_origin": lang})
        edge(nid, "class/human", "P31")

    node("class/city", "city", "LOC", {})
    node("class/country", "country", "LOC", {})
    countries = list(CITIES) + EXTRA_COUNTRIES
    for c in countries:
        cid = "loc/" + slug(c)
        node(cid, c, "LOC", {"location_type": "country", "country": c})
        edge(cid, "class/country", "P31")
    for country, cities in CITIES.items():
        for city in cities:
            nid = "loc/" + slug(city)
            node(nid, city, "LOC",
                 {"location_type": "city", "country": country})
            edge(nid, "class/city", "P31")
            edge(nid, "loc/" + slug(country), "P361")

    for industry, (class_label, by_country) in ORGS.items():
        class_id = "class/" + slug(class_label)
        node(class_id, class_label, "ORG", {})
        for country, labels in by_country.items():
            for label in labels:
                nid = "org/" + slug(label)
                node(nid, label, "ORG",
                     {"industry": industry, "country": country})
                edge(nid, class_id, "P31")
    return nodes, edges


def entity_pools(nodes):
    pools = {"PER": [], "LOC": [], "ORG": []}
    for n in nodes:
        if not n["id"].startswith("class/"):
            pools[n["category"]].append(n["label"])
    return pools


TEMPLATES = [
    "{P0} works at {O0} in {L0}.",
    "{P0} met {P1} at the {O0} office in {L0} last week.",
    "After leaving {L0}, {P0} joined {O0} as a senior analyst.",
    "{O0} announced that {P0} will lead its new team in {L0}.",
    "{P0} and {P1} travelled from {L0} to {L1} for a conference.",
    "The report by {P0} criticised {O0} for its plans in {L0}.",
    "{P0} told reporters in {L0} that {O0} had no comment.",
    "{P0} grew up in {L0} and later moved to {L1}.",
    "According to {P0}, {O0} and {O1} are close to a deal.",
    "{P0} called {P1} from {L0}. {P0} said the talks with {O0} went well.",
    "A spokesperson for {O0} in {L0} confirmed that {P0} had resigned.",
    "{P0} has worked with {P1} at {O0} for five years.",
    "Shares of {O0} rose after {P0} visited {L0}.",
    "{P0} opened a small cafe in {L0} with help from {P1}.",
    "The mayor of {L0} thanked {P0} and {O0} for their support.",
    "{P0} left {O0} and now advises {O1} from an office in {L0}.",
    "Fans in {L0} cheered as {P0} arrived with {P1}.",
    "{O0} hired {P0} to open a branch in {L0}. {P0} starts in May.",
    "{P0} wrote to {P1} about the flooding in {L0}.",
    "Investors in {L0} and {L1} are watching {O0} closely.",
]


def fill(template, pools, rng):
    """Returns (text, spans) with spans as (start, end, category)."""
    chosen = {}
    used = set()
    text, spans = "", []
    i = 0
    while i < len(template):
        if template[i] == "{":
            j = template.index("}", i)
            key = template[i + 1:j]
            if key not in chosen:
                cat = {"P": "PER", "L": "LOC", "O": "ORG"}[key[0]]
                while True:
                    pick = rng.choice(pools[cat])
                    if pick not in used:
                        break
                used.add(pick)
                chosen[key] = (pick, cat)
            surface, cat = chosen[key]
            spans.append((len(text), len(text) + len(surface), cat))
            text += surface
            i = j + 1
        else:
            text += template[i]
            i += 1
    return text, spans


def doc_json(doc_id, text, spans):
    return {"id": doc_id, "text": text,
            "entities": [{"start": s, "end": e, "category": c,
                          "surface": text[s:e]} for s, e, c in spans]}


def build_corpus(pools, n_docs, rng):
    docs = []
    for k in range(n_docs):
        parts, spans = [], []
        offset = 0
        for _ in range(rng.randint(1, 3)):
            t, s = fill(rng.choice(TEMPLATES), pools, rng)
            if parts:
                offset += 1
            spans += [(a + offset, b + offset, c) for a, b, c in s]
            parts.append(t)
            offset += len(t)
        docs.append(doc_json("fx-%04d" % (k + 1), " ".join(parts), spans))
    return docs


def locate(text, mentions):
    """mentions: [(surface, category)] in order of appearance."""
    spans, pos = [], 0
    for surface, cat in mentions:
        start = text.index(surface, pos)
        spans.append((start, start + len(surface), cat))
        pos = start + len(surface)
    return spans


WORKED_TEXT = "Sarah works at The Times in London with Rachel and David."
WORKED_MENTIONS = [("Sarah", "PER"), ("The Times", "ORG"), ("London", "LOC"),
                   ("Rachel", "PER"), ("David", "PER")]

CHAIN_TEXT = ("Daniel worked in Google for five years before moving from "
               "America to France. Daniel is now working with Emma in Danone "
               "and living in Paris.")
CHAIN_MENTIONS = [("Daniel", "PER"), ("Google", "ORG"), ("America", "LOC"),
                   ("France", "LOC"), ("Daniel", "PER"), ("Emma", "PER"),
                   ("Danone", "ORG"), ("Paris", "LOC")]
CHAIN_ENTITIES = "Daniel, Google, America, France, Emma, Danone, Paris"
CHAIN_SURROGATES = "Michael, Microsoft, Canada, Spain, Olivia, Nestle, Madrid"

# Hand-written leakage fixture: (gold text, mentions, rewritten text).
LEAKAGE_MIXED = [
    ("Sarah met Tom in London.", [("Sarah", "PER"), ("Tom", "PER"),
                                  ("London", "LOC")],
     "Sophie met Tom in Paris."),
    ("Anna works at Google in Berlin. Anna likes Berlin.",
     [("Anna", "PER"), ("Google", "ORG"), ("Berlin", "LOC"),
      ("Anna", "PER"), ("Berlin", "LOC")],
     "Anna works at Googleplex in Munich. Lena likes munich."),
    ("Siemens opened an office in Osaka with Kenji.",
     [("Siemens", "ORG"), ("Osaka", "LOC"), ("Kenji", "PER")],
     "SAP opened an office in Osaka with Hiroshi from Siemens AG."),
]


def mock_yaml(rules, default=""):
    lines = ["rules:"]
    for match, response in rules:
        lines.append("  - match: %s" % json.dumps(match))
        lines.append("    response: %s" % json.dumps(response))
    lines.append("default: %s" % json.dumps(default))
    return "\n".join(lines) + "\n"


# CoNLL fixture. Each sentence is a list of (token, tag); tags follow the
# scheme named per document. Entities are given as (tokens, type) groups and
# tagged by `tag_sentence`.
CONLL_POOL = {
    "PER": [["John"], ["Mary", "Smith"], ["Ahmed", "Ali", "Khan"], ["Li"],
            ["Jean-Pierre", "Dubois"], ["Jürgen", "Müller"]],
    "LOC": [["Berlin"], ["New", "York"], ["Rio", "de", "Janeiro"], ["Kenya"],
            ["São", "Paulo"], ["Zürich"]],
    "ORG": [["Reuters"], ["European", "Union"], ["Bank", "of", "England"],
            ["FIFA"], ["General", "Motors"]],
    "MISC": [["German"], ["World", "Cup"], ["English"], ["Nobel", "Prize"]],
}
CONLL_FILLER = ("the said on Monday that a new deal with was signed in "
                "after talks and officials from met").split()


def tag_entities(groups, scheme):
    """groups: list of (tokens, type|None). Returns [(token, tag)]."""
    out = []
    prev_type = None
    for tokens, typ in groups:
        if typ is None:
            out += [(t, "O") for t in tokens]
            prev_type = None
            continue
        for k, t in enumerate(tokens):
            if k == 0:
                if scheme == "bio2" or prev_type == typ:
                    tag = "B-" + typ
                else:
                    tag = "I-" + typ
            else:
                tag = "I-" + typ
            out.append((t, tag))
        prev_type = typ
    return out


def build_conll(rng):
    docs = []  # (scheme, [sentence groups])
    n_sent = 0
    schemes = ["iob1", "bio2", "iob1", "bio2", "iob1"]
    for scheme in schemes:
        sents = []
        for _ in range(10):
            groups = []
            for _ in range(rng.randint(1, 3)):
                groups.append(([rng.choice(CONLL_FILLER)
                                for _ in range(rng.randint(1, 3))], None))
                typ = rng.choice(["PER", "LOC", "ORG", "MISC"])
                groups.append((rng.choice(CONLL_POOL[typ]), typ))
                # Adjacent same-type entities exercise the B- split in IOB1.
                if rng.random() < 0.25:
                    other = rng.choice(CONLL_POOL[typ])
                    groups.append((other, typ))
            groups.append((["."], None))
            sents.append(groups)
            n_sent += 1
        docs.append((scheme, sents))
    assert n_sent == 50

    conll_lines = []
    expected = []
    for d, (scheme, sents) in enumerate(docs):
        conll_lines.append("-DOCSTART- -X- -X- O")
        conll_lines.append("")
        text = ""
        spans = []
        for si, groups in enumerate(sents):
            if si:
                text += "\n"
            first = True
            for tokens, typ in groups:
                start = None
                for t in tokens:
                    if not first:
                        text += " "
                    first = False
                    if start is None:
                        start = len(text)
                    text += t
                if typ in ("PER", "LOC", "ORG"):
                    spans.append((start, len(text), typ))
            for tok, tag in tag_entities(groups, scheme):
                conll_lines.append("%s NNP I-NP %s" % (tok, tag))
            conll_lines.append("")
        expected.append(doc_json("conll-%d" % (d + 1), text, spans))
    return "\n".join(conll_lines) + "\n", expected


def write(path, content):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(content)


def jsonl(records):
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=os.path.join(
        os.path.dirname(os.path.abspath(__file__)), "..", "data"))
    ap.add_argument("--docs", type=int, default=2000)
    args = ap.parse_args()
    out = os.path.abspath(args.out)
    os.makedirs(out, exist_ok=True)
    rng = random.Random(SEED)

    nodes, edges = build_kg()
    write(os.path.join(out, "kg_fixture.jsonl"),
          jsonl([{"node": n} for n in nodes] + [{"edge": e} for e in edges]))
    pools = entity_pools(nodes)

    lex = ["# surface\tcategory"]
    for cat in ("PER", "LOC", "ORG"):
        lex += ["%s\t%s" % (s, cat) for s in sorted(pools[cat])]
    lex += ["Daniel\tPER", "America\tLOC"]
    write(os.path.join(out, "lexicon.tsv"), "\n".join(lex) + "\n")

    write(os.path.join(out, "fixture_corpus.jsonl"),
          jsonl(build_corpus(pools, args.docs, rng)))

    write(os.path.join(out, "worked_example.jsonl"), jsonl([doc_json(
        "worked-example", WORKED_TEXT, locate(WORKED_TEXT, WORKED_MENTIONS))]))
    write(os.path.join(out, "chain_example.jsonl"), jsonl([doc_json(
        "chain-example", CHAIN_TEXT, locate(CHAIN_TEXT, CHAIN_MENTIONS))]))

    gold, rewritten = [], []
    for k, (text, mentions, rew) in enumerate(LEAKAGE_MIXED):
        doc_id = "mixed-%d" % (k + 1)
        gold.append(doc_json(doc_id, text, locate(text, mentions)))
        rewritten.append({"id": doc_id, "text": rew})
    write(os.path.join(out, "leakage_gold.jsonl"), jsonl(gold))
    write(os.path.join(out, "leakage_rewritten.jsonl"), jsonl(rewritten))

    extract_rule = ("Find all the locations", CHAIN_ENTITIES + ".")
    write(os.path.join(out, "mock_chain.yaml"), mock_yaml(
        [extract_rule, (CHAIN_ENTITIES, CHAIN_SURROGATES)]))
    write(os.path.join(out, "mock_identity.yaml"), mock_yaml(
        [extract_rule, (CHAIN_ENTITIES, CHAIN_ENTITIES)]))
    write(os.path.join(out, "mock_length_mismatch.yaml"), mock_yaml(
        [extract_rule, (CHAIN_ENTITIES,
                        CHAIN_SURROGATES.rsplit(",", 1)[0])]))

    conll, expected = build_conll(rng)
    write(os.path.join(out, "conll_synthetic.conll"), conll)
    write(os.path.join(out, "conll_synthetic_expected.jsonl"), jsonl(expected))


if __name__ == "__main__":
    main()

"""Regenerate the frontend test fixtures from the Python side.

Writes, under frontend/test/fixtures/:
  validation_corpus.json  200 wire-format records with schema-core verdicts,
                          plus the taxonomy/rule manifest and the entry they
                          reference; the client validator must agree on all.
  entries.jsonl           entries served by the live service in e2e tests.

Run from the repository root: python3 frontend/scripts/generate_fixtures.py
"""

import json
import random
from pathlib import Path

from mrcaudit.entries import entry_to_dict, write_entries
from mrcaudit.records import record_from_dict, rule_manifest, validate
from mrcaudit.taxonomy import taxonomy

import sys

sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "tests"))
from conftest import build_entry  # noqa: E402

FIXTURES = Path(__file__).resolve().parents[1] / "test" / "fixtures"

REASONING = sorted(str(l) for l in taxonomy().leaves("Reasoning"))
KNOWLEDGE = sorted(str(l) for l in taxonomy().leaves("Knowledge"))
LINGUISTIC = sorted(str(l) for l in taxonomy().leaves("LinguisticComplexity"))
ANSWERABLE = ["AnswerType/Span", "AnswerType/Paraphrasing", "AnswerType/Generated"]


def corpus_entry():
    return build_entry(
        "NewsQA:corpus:0",
        "Who lowered the storm's death toll?",
        [
            [
                "The death toll was lowered to one person.",
                "Officials had initially said three people were killed.",
                "Rescue crews worked through the night.",
            ],
            ["A second passage follows.", "It has two sentences."],
        ],
    )


def base_record(rng):
    return {
        "schema_version": "1.0",
        "entry_id": "NewsQA:corpus:0",
        "annotator_id": rng.choice(["a1", "a2"]),
        "answer_type": rng.choice(ANSWERABLE),
        "supporting_facts": [],
        "reasoning": [],
        "knowledge": [],
        "linguistic": [],
        "correctness": None,
        "notes": "",
    }


def make_cases(rng):
    cases = []

    def add(mutate):
        record = base_record(rng)
        mutate(record)
        cases.append(record)

    valid_mutations = [
        lambda r: None,
        lambda r: r.update(supporting_facts=[[0, 0]], reasoning=["Reasoning/Retrieval"]),
        lambda r: r.update(supporting_facts=[[0, 1], [1, 0]], reasoning=[rng.choice(REASONING)]),
        lambda r: r.update(knowledge=[rng.choice(KNOWLEDGE)]),
        lambda r: r.update(
            supporting_facts=[[0, 2]],
            linguistic=[{"label": rng.choice(LINGUISTIC), "sentences": [[0, 2]]}],
        ),
        lambda r: r.update(
            correctness={
                "verdict": "Correctness/Debatable",
                "sub_reason": "Correctness/ArbitrarySelection",
                "note": "a better span exists",
            }
        ),
        lambda r: r.update(
            correctness={"verdict": "Correctness/Wrong", "sub_reason": None, "note": "off by one year"}
        ),
        lambda r: r.update(answer_type="AnswerType/Unanswerable"),
        lambda r: r.update(
            supporting_facts=[[1, 1]],
            reasoning=["Reasoning/Retrieval", "Reasoning/Temporal"],
            notes="free text",
        ),
        # valid but warning: retrieval next to abstract reasoning
        lambda r: r.update(
            supporting_facts=[[0, 0]],
            reasoning=["Reasoning/Retrieval", "Reasoning/Operational/Bridge"],
        ),
        lambda r: r.update(
            supporting_facts=[[0, 0]],
            reasoning=["Reasoning/Retrieval", "Reasoning/Arithmetic/Counting"],
        ),
    ]
    invalid_mutations = [
        lambda r: r.update(entry_id=""),
        lambda r: r.update(answer_type=None),
        lambda r: r.update(answer_type="AnswerType/Essay"),
        lambda r: r.update(reasoning=["Reasoning/Operational"]),
        lambda r: r.update(reasoning=["Knowledge/Intuitive"]),
        lambda r: r.update(reasoning=["Reasoning/Teleportation"]),
        lambda r: r.update(knowledge=["Knowledge/Factual"]),
        lambda r: r.update(supporting_facts=[[0, 99]]),
        lambda r: r.update(supporting_facts=[[7, 0]]),
        lambda r: r.update(supporting_facts=[[1, 2]]),
        lambda r: r.update(answer_type="AnswerType/Unanswerable", reasoning=["Reasoning/Operational/Bridge"]),
        lambda r: r.update(answer_type="AnswerType/Unanswerable", supporting_facts=[[0, 0]]),
        lambda r: r.update(correctness={"verdict": "Correctness/Wrong", "sub_reason": None, "note": "  "}),
        lambda r: r.update(correctness={"verdict": "Correctness/Debatable", "sub_reason": None, "note": ""}),
        lambda r: r.update(
            correctness={"verdict": "Correctness/Wrong", "sub_reason": "Correctness/Debatable", "note": "x"}
        ),
        lambda r: r.update(
            correctness={"verdict": "Reasoning/Retrieval", "sub_reason": None, "note": "x"}
        ),
        lambda r: r.update(
            supporting_facts=[[0, 0]],
            linguistic=[{"label": "LinguisticComplexity/LexicalVariety/Redundancy", "sentences": [[0, 9]]}],
        ),
        lambda r: r.update(linguistic=[{"label": "LinguisticComplexity/LexicalVariety", "sentences": []}]),
        lambda r: r.update(
            answer_type="AnswerType/Unanswerable",
            supporting_facts=[[0, 1]],
            reasoning=["Reasoning/Causal"],
        ),
        lambda r: r.update(answer_type=None, supporting_facts=[[0, 99]], reasoning=["Reasoning/Nope"]),
    ]

    for round_no in range(10):
        for mutate in valid_mutations:
            add(mutate)
    for round_no in range(5):
        for mutate in invalid_mutations:
            add(mutate)
    rng.shuffle(cases)
    return cases[:200]


def main():
    rng = random.Random(416)
    FIXTURES.mkdir(parents=True, exist_ok=True)

    entry = corpus_entry()
    cases = []
    for record_dict in make_cases(rng):
        record = record_from_dict(record_dict)
        result = validate(record, entry)
        cases.append(
            {
                "record": record_dict,
                "valid": result.ok,
                "error_rules": sorted({f.rule for f in result.errors}),
                "warning_rules": sorted({f.rule for f in result.warnings}),
            }
        )
    valid_count = sum(1 for c in cases if c["valid"])
    corpus = {
        "entry": entry_to_dict(entry),
        "manifest": {
            "schema_version": "1.0",
            "taxonomy": taxonomy().to_dict(),
            "rules": rule_manifest(),
        },
        "cases": cases,
    }
    (FIXTURES / "validation_corpus.json").write_text(json.dumps(corpus, indent=1, sort_keys=True), encoding="utf-8")

    e2e_entries = [
        build_entry(
            f"NewsQA:e2e:{i}",
            f"What changed in report {i}?",
            [
                [
                    f"Report {i} opened with a summary.",
                    f"The middle section of report {i} described the storm.",
                    f"The final line of report {i} lowered the toll.",
                ],
                [f"An appendix to report {i} listed sources.", "It had two pages."],
            ],
        )
        for i in range(5)
    ]
    write_entries(FIXTURES / "entries.jsonl", e2e_entries)
    print(f"wrote {len(cases)} corpus cases ({valid_count} valid) and {len(e2e_entries)} e2e entries")


if __name__ == "__main__":
    main()

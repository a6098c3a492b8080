"""Annotation records, their validation rules, and label-level comparison.

A record is one annotator's full labeling of one entry. Validation is a pure
function of (record, entry); a record is storable exactly when it produces no
errors. The same rules are exported as a machine-readable manifest so
front-ends can mirror them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Optional, Union

from .entries import SCHEMA_VERSION, GoldEntry, check_schema_version, dumps_line
from .taxonomy import (
    ANSWER_TYPE,
    CORRECTNESS_SUB_REASONS,
    CORRECTNESS_VERDICTS,
    KNOWLEDGE,
    LINGUISTIC_COMPLEXITY,
    REASONING,
    RETRIEVAL,
    SUPPORTING_FACT,
    UNANSWERABLE,
    Label,
    taxonomy,
)

FactRef = tuple[int, int]


@dataclass(frozen=True)
class CorrectnessNote:
    verdict: Label
    note: str
    sub_reason: Optional[Label] = None


@dataclass(frozen=True)
class AnnotationRecord:
    entry_id: str
    annotator_id: str
    answer_type: Optional[Label]
    supporting_facts: frozenset[FactRef] = frozenset()
    reasoning: frozenset[Label] = frozenset()
    knowledge: frozenset[Label] = frozenset()
    linguistic: tuple[tuple[Label, tuple[FactRef, ...]], ...] = ()
    correctness: Optional[CorrectnessNote] = None
    notes: str = ""

    def __post_init__(self):
        # Canonicalize collection fields so logically equal records compare
        # equal regardless of construction order.
        object.__setattr__(self, "supporting_facts", frozenset(tuple(ref) for ref in self.supporting_facts))
        object.__setattr__(self, "reasoning", frozenset(self.reasoning))
        object.__setattr__(self, "knowledge", frozenset(self.knowledge))
        merged: dict[Label, set[FactRef]] = {}
        for label, refs in self.linguistic:
            merged.setdefault(label, set()).update(tuple(ref) for ref in refs)
        canonical = tuple(
            (label, tuple(sorted(refs)))
            for label, refs in sorted(merged.items(), key=lambda item: str(item[0]))
        )
        object.__setattr__(self, "linguistic", canonical)

    def linguistic_labels(self) -> frozenset[Label]:
        return frozenset(label for label, _ in self.linguistic)

    def label_keys(self) -> frozenset[str]:
        """Every attached label as a comparable string key.

        Taxonomy labels render as slash paths; supporting facts as
        SupportingFact/<passage>.<sentence>.
        """
        keys = set()
        if self.answer_type is not None:
            keys.add(str(self.answer_type))
        if self.correctness is not None:
            keys.add(str(self.correctness.verdict))
            if self.correctness.sub_reason is not None:
                keys.add(str(self.correctness.sub_reason))
        for label in self.reasoning | self.knowledge | self.linguistic_labels():
            keys.add(str(label))
        for passage, sentence in self.supporting_facts:
            keys.add(f"{SUPPORTING_FACT}/{passage}.{sentence}")
        return frozenset(keys)


@dataclass(frozen=True)
class Finding:
    rule: str
    message: str
    subject: str = ""


@dataclass(frozen=True)
class ValidationResult:
    errors: tuple[Finding, ...] = ()
    warnings: tuple[Finding, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors


# Rule identifiers shared with client-side validators.
RULE_ENTRY_ID = "structure.entry_id"
RULE_UNKNOWN_LABEL = "label.unknown"
RULE_NOT_LEAF = "label.not_leaf"
RULE_WRONG_FAMILY = "label.family"
RULE_ANSWER_TYPE_MISSING = "answer_type.missing"
RULE_DANGLING_FACT = "facts.dangling"
RULE_UNANSWERABLE_REASONING = "unanswerable.reasoning"
RULE_UNANSWERABLE_FACTS = "unanswerable.facts"
RULE_NOTE_MISSING = "correctness.note_missing"
RULE_BAD_SUB_REASON = "correctness.sub_reason"
RULE_RETRIEVAL_OVERLAP = "reasoning.retrieval_overlap"

_ABSTRACT_REASONING_GROUPS = ("Operational", "Arithmetic")


def _check_label(label: Label, family: str, errors: list[Finding]) -> None:
    tax = taxonomy()
    if not tax.contains(label):
        errors.append(Finding(RULE_UNKNOWN_LABEL, f"label {label} is not in the taxonomy", str(label)))
    elif not tax.is_leaf(label):
        errors.append(Finding(RULE_NOT_LEAF, f"label {label} is a grouping node, not a leaf", str(label)))
    elif label.family != family:
        errors.append(Finding(RULE_WRONG_FAMILY, f"label {label} does not belong to {family}", str(label)))


def _check_refs(refs: Iterable[FactRef], entry: GoldEntry, context: str, errors: list[Finding]) -> None:
    for passage, sentence in sorted(refs):
        if not entry.has_sentence(passage, sentence):
            errors.append(
                Finding(
                    RULE_DANGLING_FACT,
                    f"{context} reference ({passage}, {sentence}) does not resolve to a sentence",
                    f"({passage}, {sentence})",
                )
            )


def validate(record: AnnotationRecord, entry: GoldEntry) -> ValidationResult:
    """Check a record against its entry. Pure; storable iff no errors."""
    if record.entry_id and record.entry_id != entry.id:
        raise ValueError(f"record references entry {record.entry_id!r}, got entry {entry.id!r}")

    errors: list[Finding] = []
    warnings: list[Finding] = []

    if not record.entry_id:
        errors.append(Finding(RULE_ENTRY_ID, "record has no entry_id", "entry_id"))

    if record.answer_type is None:
        errors.append(Finding(RULE_ANSWER_TYPE_MISSING, "record has no answer type", "answer_type"))
    else:
        _check_label(record.answer_type, ANSWER_TYPE, errors)

    for label in sorted(record.reasoning, key=str):
        _check_label(label, REASONING, errors)
    for label in sorted(record.knowledge, key=str):
        _check_label(label, KNOWLEDGE, errors)
    for label, refs in record.linguistic:
        _check_label(label, LINGUISTIC_COMPLEXITY, errors)
        _check_refs(refs, entry, str(label), errors)

    if record.correctness is not None:
        if record.correctness.verdict not in CORRECTNESS_VERDICTS:
            errors.append(
                Finding(
                    RULE_WRONG_FAMILY,
                    f"correctness verdict must be Debatable or Wrong, got {record.correctness.verdict}",
                    str(record.correctness.verdict),
                )
            )
        if record.correctness.sub_reason is not None and record.correctness.sub_reason not in CORRECTNESS_SUB_REASONS:
            errors.append(
                Finding(
                    RULE_BAD_SUB_REASON,
                    f"unknown correctness sub-reason {record.correctness.sub_reason}",
                    str(record.correctness.sub_reason),
                )
            )
        if not record.correctness.note.strip():
            errors.append(
                Finding(
                    RULE_NOTE_MISSING,
                    "Debatable/Wrong requires a note describing the alternative or correction",
                    str(record.correctness.verdict),
                )
            )

    _check_refs(record.supporting_facts, entry, "supporting fact", errors)

    if record.answer_type == UNANSWERABLE:
        if record.reasoning:
            errors.append(
                Finding(
                    RULE_UNANSWERABLE_REASONING,
                    "reasoning labels on an unanswerable record",
                    ", ".join(sorted(str(l) for l in record.reasoning)),
                )
            )
        if record.supporting_facts:
            errors.append(
                Finding(
                    RULE_UNANSWERABLE_FACTS,
                    "supporting facts on an unanswerable record",
                    f"{len(record.supporting_facts)} refs",
                )
            )

    if RETRIEVAL in record.reasoning:
        abstract = sorted(
            str(label)
            for label in record.reasoning
            if len(label.path) >= 2 and label.path[1] in _ABSTRACT_REASONING_GROUPS
        )
        if abstract:
            warnings.append(
                Finding(
                    RULE_RETRIEVAL_OVERLAP,
                    "Retrieval alongside abstract reasoning labels is suspicious",
                    ", ".join(abstract),
                )
            )

    return ValidationResult(tuple(errors), tuple(warnings))


def rule_manifest() -> list[dict]:
    """Machine-readable validation rules for client-side mirrors."""
    return [
        {"id": RULE_ENTRY_ID, "kind": "error", "field": "entry_id"},
        {"id": RULE_UNKNOWN_LABEL, "kind": "error", "field": "labels"},
        {"id": RULE_NOT_LEAF, "kind": "error", "field": "labels"},
        {"id": RULE_WRONG_FAMILY, "kind": "error", "field": "labels"},
        {"id": RULE_ANSWER_TYPE_MISSING, "kind": "error", "field": "answer_type"},
        {"id": RULE_DANGLING_FACT, "kind": "error", "field": "supporting_facts"},
        {
            "id": RULE_UNANSWERABLE_REASONING,
            "kind": "error",
            "field": "reasoning",
            "params": {"answer_type": str(UNANSWERABLE)},
        },
        {
            "id": RULE_UNANSWERABLE_FACTS,
            "kind": "error",
            "field": "supporting_facts",
            "params": {"answer_type": str(UNANSWERABLE)},
        },
        {
            "id": RULE_NOTE_MISSING,
            "kind": "error",
            "field": "correctness",
            "params": {"verdicts": sorted(str(v) for v in CORRECTNESS_VERDICTS)},
        },
        {
            "id": RULE_BAD_SUB_REASON,
            "kind": "error",
            "field": "correctness",
            "params": {"sub_reasons": sorted(str(s) for s in CORRECTNESS_SUB_REASONS)},
        },
        {
            "id": RULE_RETRIEVAL_OVERLAP,
            "kind": "warning",
            "field": "reasoning",
            "params": {"retrieval": str(RETRIEVAL), "groups": list(_ABSTRACT_REASONING_GROUPS)},
        },
    ]


@dataclass(frozen=True)
class LabelDiff:
    true_positives: frozenset[str]
    false_positives: frozenset[str]
    false_negatives: frozenset[str]


def diff(gold: AnnotationRecord, other: AnnotationRecord) -> LabelDiff:
    """Multi-label set comparison treating gold as reference."""
    if gold.entry_id != other.entry_id:
        raise ValueError(f"records reference different entries: {gold.entry_id!r} vs {other.entry_id!r}")
    gold_keys = gold.label_keys()
    other_keys = other.label_keys()
    return LabelDiff(
        true_positives=frozenset(gold_keys & other_keys),
        false_positives=frozenset(other_keys - gold_keys),
        false_negatives=frozenset(gold_keys - other_keys),
    )


def record_to_dict(record: AnnotationRecord) -> dict:
    correctness = None
    if record.correctness is not None:
        correctness = {
            "verdict": str(record.correctness.verdict),
            "sub_reason": str(record.correctness.sub_reason) if record.correctness.sub_reason else None,
            "note": record.correctness.note,
        }
    return {
        "schema_version": SCHEMA_VERSION,
        "entry_id": record.entry_id,
        "annotator_id": record.annotator_id,
        "answer_type": str(record.answer_type) if record.answer_type else None,
        "supporting_facts": [list(ref) for ref in sorted(record.supporting_facts)],
        "reasoning": sorted(str(label) for label in record.reasoning),
        "knowledge": sorted(str(label) for label in record.knowledge),
        "linguistic": [
            {"label": str(label), "sentences": [list(ref) for ref in refs]}
            for label, refs in record.linguistic
        ],
        "correctness": correctness,
        "notes": record.notes,
    }


def record_from_dict(data: dict) -> AnnotationRecord:
    check_schema_version(data.get("schema_version"))
    correctness = None
    if data.get("correctness"):
        raw = data["correctness"]
        correctness = CorrectnessNote(
            verdict=Label.parse(raw["verdict"]),
            sub_reason=Label.parse(raw["sub_reason"]) if raw.get("sub_reason") else None,
            note=raw.get("note", ""),
        )
    return AnnotationRecord(
        entry_id=data["entry_id"],
        annotator_id=data["annotator_id"],
        answer_type=Label.parse(data["answer_type"]) if data.get("answer_type") else None,
        supporting_facts=frozenset((int(p), int(s)) for p, s in data.get("supporting_facts", [])),
        reasoning=frozenset(Label.parse(text) for text in data.get("reasoning", [])),
        knowledge=frozenset(Label.parse(text) for text in data.get("knowledge", [])),
        linguistic=tuple(
            (Label.parse(item["label"]), tuple((int(p), int(s)) for p, s in item.get("sentences", [])))
            for item in data.get("linguistic", [])
        ),
        correctness=correctness,
        notes=data.get("notes", ""),
    )


def write_records(target: Union[str, Path, IO[str]], records: Iterable[AnnotationRecord]) -> None:
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8") as fp:
            write_records(fp, records)
        return
    for record in records:
        target.write(dumps_line(record_to_dict(record)) + "\n")


def read_records(source: Union[str, Path, IO[str]]) -> list[AnnotationRecord]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fp:
            return read_records(fp)
    records = []
    for line_no, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            records.append(record_from_dict(json.loads(line)))
        except SchemaVersionError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"bad record on line {line_no}: {exc}") from exc
    return records

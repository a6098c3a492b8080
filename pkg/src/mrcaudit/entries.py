"""Canonical gold-standard entry model and its line-delimited file format.

Entries are immutable values. Passages store raw text alongside precomputed
sentence boundaries so every consumer sees identical sentence indices.
Serialization is one JSON object per line, UTF-8, with a mandatory schema
version; readers reject unknown major versions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Union

SCHEMA_VERSION = "1.0"

DATASETS = ("MSMarco", "HotpotQA", "ReCoRd", "MultiRC", "NewsQA", "DROP")


class SchemaVersionError(ValueError):
    """Record or entry carries a schema version this reader cannot parse."""


def check_schema_version(version: object) -> None:
    if not isinstance(version, str) or not version:
        raise SchemaVersionError(f"missing schema_version (expected {SCHEMA_VERSION})")
    major = version.split(".")[0]
    if major != SCHEMA_VERSION.split(".")[0]:
        raise SchemaVersionError(f"unsupported schema major version {version!r}")


@dataclass(frozen=True)
class Passage:
    text: str
    sentences: tuple[tuple[int, int], ...]
    title: str | None = None

    def __post_init__(self):
        if not self.sentences:
            raise ValueError("passage without sentences")
        expected = 0
        for start, end in self.sentences:
            if start != expected or end <= start or end > len(self.text):
                raise ValueError(f"sentence spans do not tile passage text: {self.sentences}")
            expected = end
        if expected != len(self.text):
            raise ValueError("sentence spans do not cover passage text")

    def sentence_texts(self) -> tuple[str, ...]:
        return tuple(self.text[s:e] for s, e in self.sentences)


@dataclass(frozen=True)
class SpanAnswer:
    passage: int
    start: int
    end: int
    text: str


@dataclass(frozen=True)
class FreeFormAnswer:
    text: str


@dataclass(frozen=True)
class ClozeAnswer:
    query: str
    filler: str


@dataclass(frozen=True)
class MultipleChoiceAnswer:
    choices: tuple[str, ...]
    correct: tuple[int, ...]

    def __post_init__(self):
        if any(i < 0 or i >= len(self.choices) for i in self.correct):
            raise ValueError(f"correct choice index out of range: {self.correct}")


@dataclass(frozen=True)
class Unanswerable:
    pass


Answer = Union[SpanAnswer, FreeFormAnswer, ClozeAnswer, MultipleChoiceAnswer, Unanswerable]


@dataclass(frozen=True)
class GoldEntry:
    id: str
    dataset: str
    question: str
    answers: tuple[Answer, ...]
    passages: tuple[Passage, ...]
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dataset not in DATASETS:
            raise ValueError(f"unknown dataset tag {self.dataset!r}")
        if not self.passages:
            raise ValueError(f"entry {self.id}: no passages")
        if not self.question.strip():
            raise ValueError(f"entry {self.id}: empty question")
        for answer in self.answers:
            if isinstance(answer, SpanAnswer):
                if answer.passage < 0 or answer.passage >= len(self.passages):
                    raise ValueError(f"entry {self.id}: span answer references passage {answer.passage}")
                passage = self.passages[answer.passage]
                if passage.text[answer.start:answer.end] != answer.text:
                    raise ValueError(f"entry {self.id}: span answer text does not match its range")

    def sentence_count(self, passage_index: int) -> int:
        return len(self.passages[passage_index].sentences)

    def has_sentence(self, passage_index: int, sentence_index: int) -> bool:
        return (
            0 <= passage_index < len(self.passages)
            and 0 <= sentence_index < len(self.passages[passage_index].sentences)
        )

    def paragraph_key(self) -> str:
        """Identity of the passage set: exact concatenated passage text."""
        return "\n\n".join(p.text for p in self.passages)


def _answer_to_dict(answer: Answer) -> dict:
    if isinstance(answer, SpanAnswer):
        return {"kind": "span", "passage": answer.passage, "start": answer.start, "end": answer.end, "text": answer.text}
    if isinstance(answer, FreeFormAnswer):
        return {"kind": "free_form", "text": answer.text}
    if isinstance(answer, ClozeAnswer):
        return {"kind": "cloze", "query": answer.query, "filler": answer.filler}
    if isinstance(answer, MultipleChoiceAnswer):
        return {"kind": "multiple_choice", "choices": list(answer.choices), "correct": list(answer.correct)}
    if isinstance(answer, Unanswerable):
        return {"kind": "unanswerable"}
    raise TypeError(f"not an answer: {answer!r}")


def _answer_from_dict(data: dict) -> Answer:
    kind = data.get("kind")
    if kind == "span":
        return SpanAnswer(data["passage"], data["start"], data["end"], data["text"])
    if kind == "free_form":
        return FreeFormAnswer(data["text"])
    if kind == "cloze":
        return ClozeAnswer(data["query"], data["filler"])
    if kind == "multiple_choice":
        return MultipleChoiceAnswer(tuple(data["choices"]), tuple(data["correct"]))
    if kind == "unanswerable":
        return Unanswerable()
    raise ValueError(f"unknown answer kind {kind!r}")


def entry_to_dict(entry: GoldEntry) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "id": entry.id,
        "dataset": entry.dataset,
        "question": entry.question,
        "answers": [_answer_to_dict(a) for a in entry.answers],
        "passages": [
            {
                "title": p.title,
                "text": p.text,
                "sentences": [list(span) for span in p.sentences],
            }
            for p in entry.passages
        ],
        "extras": entry.extras,
    }


def entry_from_dict(data: dict) -> GoldEntry:
    check_schema_version(data.get("schema_version"))
    return GoldEntry(
        id=data["id"],
        dataset=data["dataset"],
        question=data["question"],
        answers=tuple(_answer_from_dict(a) for a in data["answers"]),
        passages=tuple(
            Passage(
                text=p["text"],
                sentences=tuple((int(s), int(e)) for s, e in p["sentences"]),
                title=p.get("title"),
            )
            for p in data["passages"]
        ),
        extras=dict(data.get("extras", {})),
    )


def dumps_line(data: dict) -> str:
    return json.dumps(data, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def write_entries(target: Union[str, Path, IO[str]], entries: Iterable[GoldEntry]) -> None:
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8") as fp:
            write_entries(fp, entries)
        return
    for entry in entries:
        target.write(dumps_line(entry_to_dict(entry)) + "\n")


def read_entries(source: Union[str, Path, IO[str]]) -> list[GoldEntry]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fp:
            return read_entries(fp)
    entries = []
    for line_no, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            entries.append(entry_from_dict(json.loads(line)))
        except SchemaVersionError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"bad entry on line {line_no}: {exc}") from exc
    return entries

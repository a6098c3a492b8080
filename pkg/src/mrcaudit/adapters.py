"""Loaders turning the six datasets' official development files into entries.

Adapter selection is always explicit; nothing is sniffed from file contents.
Each loader documents the distribution shape it expects and raises
AdapterError naming the first offending item on malformed input. Quirks of
the official formats that the canonical model does not cover (selection
flags, per-worker answers, question types) are preserved verbatim in the
entry's extras bag.

Sentence boundaries come from the dataset itself where it ships them
(HotpotQA, MultiRC) and from the default splitter otherwise.
"""

from __future__ import annotations

import html
import json
import re
from pathlib import Path
from typing import IO, Callable, Union

from .entries import (
    Answer,
    ClozeAnswer,
    FreeFormAnswer,
    GoldEntry,
    MultipleChoiceAnswer,
    Passage,
    SpanAnswer,
    Unanswerable,
)
from .textlex import sentence_spans

Source = Union[str, Path, IO[bytes], IO[str]]


class AdapterError(ValueError):
    """Input does not match the documented distribution format."""


def _read_text(source: Source) -> str:
    if isinstance(source, (str, Path)):
        return Path(source).read_text(encoding="utf-8")
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def _parse_json(text: str, dataset: str):
    if not text.strip():
        raise AdapterError(f"{dataset}: empty input")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise AdapterError(f"{dataset}: not valid JSON: {exc}") from exc


def _split_passage(text: str, title: str | None = None) -> Passage:
    spans = sentence_spans(text)
    if not spans:
        raise AdapterError(f"passage has no sentences: {text!r}")
    return Passage(text=text, sentences=tuple(spans), title=title)


def _presplit_passage(sentences: list[str], title: str | None = None) -> Passage | None:
    """Passage from dataset-provided sentence strings, dropping empty ones."""
    kept = [s for s in sentences if s]
    if not kept:
        return None
    text = "".join(kept)
    spans = []
    offset = 0
    for s in kept:
        spans.append((offset, offset + len(s)))
        offset += len(s)
    return Passage(text=text, sentences=tuple(spans), title=title)


def _find_span(passages: tuple[Passage, ...], text: str) -> SpanAnswer | None:
    for index, passage in enumerate(passages):
        at = passage.text.find(text)
        if at >= 0:
            return SpanAnswer(index, at, at + len(text), text)
    return None


MSMARCO_NO_ANSWER = "No Answer Present."


def load_msmarco(source: Source) -> list[GoldEntry]:
    """MSMarco v2.1 dev file.

    Either the columnar JSON object ({"query": {"0": ...}, "passages":
    {"0": [...]}, ...}) or one row object per line with the same field
    names. All candidate passages are retained; their is_selected flags,
    the query type, and well-formed answers go to extras. The placeholder
    answer string marks unanswerable queries.
    """
    text = _read_text(source)
    if not text.strip():
        raise AdapterError("MSMarco: empty input")
    rows: list[tuple[str, dict]] = []
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = None
    if isinstance(data, dict) and isinstance(data.get("query"), dict):
        try:
            keys = sorted(data["query"], key=int)
        except (TypeError, ValueError):
            keys = sorted(data["query"])
        for key in keys:
            row = {column: values.get(key) for column, values in data.items() if isinstance(values, dict)}
            rows.append((str(data.get("query_id", {}).get(key, key)), row))
    elif isinstance(data, dict) and "query" in data:
        rows.append((str(data.get("query_id", 0)), data))
    elif data is None:
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise AdapterError(f"MSMarco: line {line_no}: {exc}") from exc
            rows.append((str(row.get("query_id", line_no)), row))
    else:
        raise AdapterError("MSMarco: expected the columnar dev object or one row object per line")
    if not rows:
        raise AdapterError("MSMarco: no items in input")

    entries = []
    for native_id, row in rows:
        try:
            query = row["query"]
            raw_passages = row["passages"]
            passages = tuple(_split_passage(p["passage_text"]) for p in raw_passages)
            answers: list[Answer] = []
            for answer_text in row.get("answers") or []:
                if answer_text.strip() == MSMARCO_NO_ANSWER:
                    answers.append(Unanswerable())
                else:
                    answers.append(FreeFormAnswer(answer_text))
            extras = {
                "is_selected": [int(p.get("is_selected", 0)) for p in raw_passages],
                "urls": [p.get("url") for p in raw_passages],
                "query_type": row.get("query_type"),
                "well_formed_answers": row.get("wellFormedAnswers"),
            }
            entries.append(
                GoldEntry(
                    id=f"MSMarco:{native_id}",
                    dataset="MSMarco",
                    question=query,
                    answers=tuple(answers),
                    passages=passages,
                    extras=extras,
                )
            )
        except AdapterError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise AdapterError(f"MSMarco: item {native_id}: {exc}") from exc
    return entries


def load_hotpotqa(source: Source) -> list[GoldEntry]:
    """HotpotQA distractor dev file: a JSON array of items.

    Every context paragraph is kept, with the dataset's own sentence
    segmentation. The answer becomes a span where its text occurs verbatim
    in some paragraph (first occurrence wins) and free form otherwise
    (yes/no answers). The dataset's supporting_facts, type, and level are
    preserved in extras.
    """
    data = _parse_json(_read_text(source), "HotpotQA")
    if not isinstance(data, list):
        raise AdapterError("HotpotQA: expected a JSON array of items")
    if not data:
        raise AdapterError("HotpotQA: no items in input")
    entries = []
    for item in data:
        native_id = item.get("_id", "?") if isinstance(item, dict) else "?"
        try:
            passages = []
            for title, sentences in item["context"]:
                passage = _presplit_passage(list(sentences), title=title)
                if passage is not None:
                    passages.append(passage)
            answer_text = item["answer"]
            answer = _find_span(tuple(passages), answer_text) or FreeFormAnswer(answer_text)
            entries.append(
                GoldEntry(
                    id=f"HotpotQA:{native_id}",
                    dataset="HotpotQA",
                    question=item["question"],
                    answers=(answer,),
                    passages=tuple(passages),
                    extras={
                        "supporting_facts": [list(ref) for ref in item.get("supporting_facts", [])],
                        "type": item.get("type"),
                        "level": item.get("level"),
                    },
                )
            )
        except AdapterError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise AdapterError(f"HotpotQA: item {native_id}: {exc}") from exc
    return entries


def load_record(source: Source) -> list[GoldEntry]:
    """ReCoRd dev file: {"version": ..., "data": [...]}.

    Each passage is a news abstract; each query is a cloze statement with a
    placeholder. One entry per (passage, query) pair; every distinct answer
    string becomes a cloze alternative. Entity offsets stay in extras.
    """
    data = _parse_json(_read_text(source), "ReCoRd")
    items = data.get("data") if isinstance(data, dict) else None
    if items is None:
        raise AdapterError("ReCoRd: expected an object with a 'data' array")
    if not items:
        raise AdapterError("ReCoRd: no items in input")
    entries = []
    for item in items:
        native_id = item.get("source", "?") if isinstance(item, dict) else "?"
        try:
            passage = _split_passage(item["passage"]["text"])
            entities = [[e["start"], e["end"]] for e in item["passage"].get("entities", [])]
            for qa in item["qas"]:
                native_id = qa.get("id", native_id)
                query = qa["query"]
                seen = []
                for answer in qa.get("answers", []):
                    if answer["text"] not in seen:
                        seen.append(answer["text"])
                answers = tuple(ClozeAnswer(query=query, filler=text) for text in seen)
                entries.append(
                    GoldEntry(
                        id=f"ReCoRd:{qa['id']}",
                        dataset="ReCoRd",
                        question=query,
                        answers=answers,
                        passages=(passage,),
                        extras={
                            "entities": entities,
                            "answer_offsets": [[a["start"], a["end"]] for a in qa.get("answers", [])],
                        },
                    )
                )
        except AdapterError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise AdapterError(f"ReCoRd: item {native_id}: {exc}") from exc
    return entries


_MULTIRC_SENT_RE = re.compile(r"<b>Sent \d+: </b>(.*?)<br>", re.DOTALL)


def load_multirc(source: Source) -> list[GoldEntry]:
    """MultiRC v0.9 dev file: {"data": [{"paragraph": {...}, "id": ...}]}.

    Paragraph text carries explicit sentence markup which is taken as the
    authoritative segmentation. One entry per question; its answer is a
    choice list with zero or more correct indices. The dataset's
    sentences_used and multisent flags land in extras.
    """
    data = _parse_json(_read_text(source), "MultiRC")
    items = data.get("data") if isinstance(data, dict) else None
    if items is None:
        raise AdapterError("MultiRC: expected an object with a 'data' array")
    if not items:
        raise AdapterError("MultiRC: no items in input")
    entries = []
    for item in items:
        native_id = item.get("id", "?") if isinstance(item, dict) else "?"
        try:
            raw_text = item["paragraph"]["text"]
            sentences = [html.unescape(s).strip() for s in _MULTIRC_SENT_RE.findall(raw_text)]
            sentences = [s for s in sentences if s]
            if not sentences:
                raise AdapterError(f"MultiRC: item {native_id}: no sentence markup found")
            passage = _presplit_passage([s + " " for s in sentences[:-1]] + [sentences[-1]])
            for question in item["paragraph"]["questions"]:
                q_idx = question.get("idx", "?")
                choices = tuple(html.unescape(a["text"]) for a in question["answers"])
                correct = tuple(i for i, a in enumerate(question["answers"]) if a.get("isAnswer"))
                entries.append(
                    GoldEntry(
                        id=f"MultiRC:{native_id}:{q_idx}",
                        dataset="MultiRC",
                        question=html.unescape(question["question"]),
                        answers=(MultipleChoiceAnswer(choices=choices, correct=correct),),
                        passages=(passage,),
                        extras={
                            "sentences_used": list(question.get("sentences_used", [])),
                            "multisent": question.get("multisent"),
                        },
                    )
                )
        except AdapterError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise AdapterError(f"MultiRC: item {native_id}: {exc}") from exc
    return entries


def _trim_span(text: str, start: int, end: int) -> tuple[int, int]:
    while end > start and text[end - 1].isspace():
        end -= 1
    while start < end and text[start].isspace():
        start += 1
    return start, end


def load_newsqa(source: Source) -> list[GoldEntry]:
    """NewsQA combined file: {"version": ..., "data": [stories]}.

    Stories carrying a split tag keep only the dev ones; files without the
    tag are ingested whole. One entry per question. The consensus span is
    the answer (whitespace-trimmed); consensus noAnswer and badQuestion map
    to unanswerable, the latter flagged in extras. Per-sourcer answers are
    preserved in extras.
    """
    data = _parse_json(_read_text(source), "NewsQA")
    stories = data.get("data") if isinstance(data, dict) else None
    if stories is None:
        raise AdapterError("NewsQA: expected an object with a 'data' array")
    if not stories:
        raise AdapterError("NewsQA: no items in input")
    has_split = any(isinstance(s, dict) and "type" in s for s in stories)
    entries = []
    for story in stories:
        native_id = story.get("storyId", "?") if isinstance(story, dict) else "?"
        try:
            if has_split and story.get("type") != "dev":
                continue
            text = story["text"]
            passage = _split_passage(text)
            for q_idx, question in enumerate(story["questions"]):
                consensus = question.get("consensus", {})
                answers: tuple[Answer, ...]
                extras = {
                    "sourcer_answers": question.get("answers", []),
                    "validated_answers": question.get("validatedAnswers"),
                }
                if "s" in consensus and "e" in consensus:
                    start, end = _trim_span(text, int(consensus["s"]), int(consensus["e"]))
                    answers = (SpanAnswer(0, start, end, text[start:end]),)
                else:
                    answers = (Unanswerable(),)
                    if consensus.get("badQuestion"):
                        extras["bad_question"] = True
                entries.append(
                    GoldEntry(
                        id=f"NewsQA:{native_id}:{q_idx}",
                        dataset="NewsQA",
                        question=question["q"],
                        answers=answers,
                        passages=(passage,),
                        extras=extras,
                    )
                )
        except AdapterError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise AdapterError(f"NewsQA: item {native_id}: {exc}") from exc
    if not entries:
        raise AdapterError("NewsQA: no dev items in input")
    return entries


def load_drop(source: Source) -> list[GoldEntry]:
    """DROP dev file: {"<passage_id>": {"passage": ..., "qa_pairs": [...]}}.

    One entry per qa_pair. Span answers that occur verbatim in the passage
    stay spans (a multi-span gold yields one span answer per part); numbers
    and dates are carried as free-form text. Validated answers go to
    extras.
    """
    data = _parse_json(_read_text(source), "DROP")
    if not isinstance(data, dict):
        raise AdapterError("DROP: expected an object keyed by passage id")
    if not data:
        raise AdapterError("DROP: no items in input")
    entries = []
    for passage_id, block in data.items():
        try:
            passage = _split_passage(block["passage"])
            for qa in block["qa_pairs"]:
                query_id = qa.get("query_id", passage_id)
                answers = _drop_answers(qa["answer"], passage)
                entries.append(
                    GoldEntry(
                        id=f"DROP:{query_id}",
                        dataset="DROP",
                        question=qa["question"],
                        answers=answers,
                        passages=(passage,),
                        extras={"validated_answers": qa.get("validated_answers", [])},
                    )
                )
        except AdapterError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise AdapterError(f"DROP: item {passage_id}: {exc}") from exc
    return entries


def _drop_answers(raw: dict, passage: Passage) -> tuple[Answer, ...]:
    answers: list[Answer] = []
    number = str(raw.get("number", "")).strip()
    if number:
        answers.append(FreeFormAnswer(number))
    date = raw.get("date") or {}
    date_text = " ".join(part for part in (date.get("day", ""), date.get("month", ""), date.get("year", "")) if part)
    if date_text:
        answers.append(FreeFormAnswer(date_text))
    for span_text in raw.get("spans", []):
        found = _find_span((passage,), span_text)
        answers.append(found if found is not None else FreeFormAnswer(span_text))
    if not answers:
        raise ValueError("answer object has no number, date, or spans")
    return tuple(answers)


_LOADERS: dict[str, Callable[[Source], list[GoldEntry]]] = {
    "MSMarco": load_msmarco,
    "HotpotQA": load_hotpotqa,
    "ReCoRd": load_record,
    "MultiRC": load_multirc,
    "NewsQA": load_newsqa,
    "DROP": load_drop,
}

DATASET_TAGS = tuple(_LOADERS)

_TAG_ALIASES = {tag.lower(): tag for tag in _LOADERS}


def canonical_dataset_tag(tag: str) -> str:
    try:
        return _TAG_ALIASES[tag.lower()]
    except KeyError:
        raise AdapterError(f"unknown dataset tag {tag!r}; expected one of {sorted(_LOADERS)}") from None


def load(dataset: str, source: Source) -> list[GoldEntry]:
    """Parse a dataset's official dev-set file into canonical entries."""
    return _LOADERS[canonical_dataset_tag(dataset)](source)

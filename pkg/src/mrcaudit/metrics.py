"""Answer-comparison metrics and inter-annotator agreement.

Exact match and token F1 follow the usual reading-comprehension convention:
answers are lowercased, punctuation and the articles a/an/the are removed,
and whitespace is collapsed before comparison. Raw comparison is available
by switching normalization off.

Agreement treats one annotator's records as reference and pools label-level
true/false positives and negatives per dataset into one F1 each; the micro
average pools every label decision across datasets.
"""

from __future__ import annotations

import logging
import re
import string
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

from .entries import ClozeAnswer, FreeFormAnswer, GoldEntry, MultipleChoiceAnswer, SpanAnswer, Unanswerable
from .records import AnnotationRecord, diff

logger = logging.getLogger(__name__)

_ARTICLE_RE = re.compile(r"\b(a|an|the)\b")
_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


class ProtocolError(ValueError):
    """Agreement input has nothing to compare."""


def normalize_answer(text: str) -> str:
    """Lowercase, drop punctuation and articles, collapse whitespace."""
    text = text.casefold()
    text = text.translate(_PUNCT_TABLE)
    text = _ARTICLE_RE.sub(" ", text)
    return " ".join(text.split())


def exact_match(pred: str, gold: str, normalize: bool = True) -> int:
    if normalize:
        return int(normalize_answer(pred) == normalize_answer(gold))
    return int(pred == gold)


class PRF(NamedTuple):
    precision: float
    recall: float
    f1: float


def token_f1(pred: str, gold: str, normalize: bool = True) -> PRF:
    """Multiset token overlap between prediction and reference."""
    pred_tokens = (normalize_answer(pred) if normalize else pred).split()
    gold_tokens = (normalize_answer(gold) if normalize else gold).split()
    common = Counter(pred_tokens) & Counter(gold_tokens)
    same = sum(common.values())
    if same == 0:
        return PRF(0.0, 0.0, 0.0)
    precision = same / len(pred_tokens)
    recall = same / len(gold_tokens)
    return PRF(precision, recall, 2 * precision * recall / (precision + recall))


class AggregateF1(NamedTuple):
    mean_f1: float
    macro_f1: float


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def aggregate_f1(per_instance: Sequence[tuple[float, float]]) -> AggregateF1:
    """Two aggregates over (precision, recall) pairs.

    mean_f1 averages each instance's F1; macro_f1 takes the harmonic mean of
    the averaged precision and the averaged recall. They differ whenever
    precision and recall are unevenly distributed across instances.
    """
    if not per_instance:
        raise ValueError("cannot aggregate an empty instance list")
    f1s = [_f1(p, r) for p, r in per_instance]
    mean_precision = sum(p for p, _ in per_instance) / len(per_instance)
    mean_recall = sum(r for _, r in per_instance) / len(per_instance)
    return AggregateF1(sum(f1s) / len(f1s), _f1(mean_precision, mean_recall))


@dataclass(frozen=True)
class AgreementReport:
    per_dataset: dict[str, float]
    micro_f1: float
    pairs: int
    skipped: int


def _pooled_f1(tp: int, fp: int, fn: int) -> float:
    denominator = 2 * tp + fp + fn
    return 2 * tp / denominator if denominator else 0.0


def agreement(
    gold_records: Sequence[AnnotationRecord],
    other_records: Sequence[AnnotationRecord],
    dataset_by_entry: Mapping[str, str] | None = None,
) -> AgreementReport:
    """Label-level agreement, first annotator as reference.

    Records pair up by entry_id; entries present on only one side are
    skipped and logged. Without a dataset mapping all pairs fall under one
    group named "all".
    """
    gold_by_entry = {record.entry_id: record for record in gold_records}
    other_by_entry = {record.entry_id: record for record in other_records}
    shared = sorted(gold_by_entry.keys() & other_by_entry.keys())
    skipped = len(gold_by_entry.keys() ^ other_by_entry.keys())
    if skipped:
        logger.warning("skipping %d entries annotated on one side only", skipped)
    if not shared:
        raise ProtocolError("no paired records to compare")

    counts: dict[str, list[int]] = {}
    for entry_id in shared:
        dataset = dataset_by_entry.get(entry_id, "all") if dataset_by_entry else "all"
        result = diff(gold_by_entry[entry_id], other_by_entry[entry_id])
        bucket = counts.setdefault(dataset, [0, 0, 0])
        bucket[0] += len(result.true_positives)
        bucket[1] += len(result.false_positives)
        bucket[2] += len(result.false_negatives)

    per_dataset = {dataset: _pooled_f1(*bucket) for dataset, bucket in sorted(counts.items())}
    total = [sum(bucket[i] for bucket in counts.values()) for i in range(3)]
    return AgreementReport(
        per_dataset=per_dataset,
        micro_f1=_pooled_f1(*total),
        pairs=len(shared),
        skipped=skipped,
    )


@dataclass(frozen=True)
class Prediction:
    entry_id: str
    answer: str


def gold_answer_texts(entry: GoldEntry) -> list[str]:
    """Reference strings an answer prediction may be scored against."""
    texts = []
    for answer in entry.answers:
        if isinstance(answer, SpanAnswer):
            texts.append(answer.text)
        elif isinstance(answer, FreeFormAnswer):
            texts.append(answer.text)
        elif isinstance(answer, ClozeAnswer):
            texts.append(answer.filler)
        elif isinstance(answer, MultipleChoiceAnswer):
            texts.extend(answer.choices[i] for i in answer.correct)
        elif isinstance(answer, Unanswerable):
            texts.append("")
    return texts


def score_predictions(
    predictions: Sequence[Prediction],
    entries: Mapping[str, GoldEntry],
    normalize: bool = True,
) -> dict:
    """EM and F1 aggregates for predictions, max over gold alternatives."""
    if not predictions:
        raise ValueError("no predictions to score")
    ems = []
    pr_pairs = []
    for prediction in predictions:
        entry = entries.get(prediction.entry_id)
        if entry is None:
            raise KeyError(f"prediction references unknown entry {prediction.entry_id!r}")
        golds = gold_answer_texts(entry) or [""]
        ems.append(max(exact_match(prediction.answer, gold, normalize) for gold in golds))
        best = max((token_f1(prediction.answer, gold, normalize) for gold in golds), key=lambda prf: prf.f1)
        pr_pairs.append((best.precision, best.recall))
    aggregates = aggregate_f1(pr_pairs)
    return {
        "exact_match": sum(ems) / len(ems),
        "mean_f1": aggregates.mean_f1,
        "macro_f1": aggregates.macro_f1,
        "count": len(ems),
    }

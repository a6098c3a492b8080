"""Lexical-overlap features for (question, sentence) pairs.

Five features per sentence: shared word types with the question, length of
the longest shared contiguous n-gram, whether a question unigram or bigram
is unique to the sentence within the whole context, and the sentence index.
All computations run over normalized token forms. For entries with several
passages the context is the concatenation of all passages in order and
sentence indices are global across it.

Stopwords are kept by default; dropping them is available as an option but
changes comparability of results.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .entries import GoldEntry
from .records import AnnotationRecord
from .textlex import Sentence, Token, norms, tokenize

STOPWORDS = frozenset(
    """a an the and or but if then of in on at by for with to from as is are
    was were be been being am do does did has have had it its this that these
    those he she they them his her their we you i not no so than too very can
    will just there here what which who whom when where why how""".split()
)


@dataclass(frozen=True)
class FeatureVector:
    joint_words: int
    longest_ngram: int
    unique_unigram: bool
    unique_bigram: bool
    sentence_index: int

    def as_list(self) -> list[float]:
        return [
            float(self.joint_words),
            float(self.longest_ngram),
            1.0 if self.unique_unigram else 0.0,
            1.0 if self.unique_bigram else 0.0,
            float(self.sentence_index),
        ]


FEATURE_NAMES = ("joint_words", "longest_ngram", "unique_unigram", "unique_bigram", "sentence_index")


def _longest_shared_ngram(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest contiguous token sequence present in both."""
    if not a or not b:
        return 0
    best = 0
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        ai = a[i - 1]
        for j in range(1, len(b) + 1):
            if ai == b[j - 1]:
                cur[j] = prev[j - 1] + 1
                if cur[j] > best:
                    best = cur[j]
        prev = cur
    return best


def _bigrams(seq: Sequence[str]) -> set[tuple[str, str]]:
    return {(seq[k], seq[k + 1]) for k in range(len(seq) - 1)}


def _drop_stopwords(words: Sequence[str]) -> list[str]:
    return [w for w in words if w not in STOPWORDS]


def overlap_features(
    question: Sequence[Token],
    sentence: Sentence,
    context: Sequence[Sentence],
    drop_stopwords: bool = False,
) -> FeatureVector:
    """Compute the five features for one sentence of a context.

    The sentence must be one of the context sentences; its feature index is
    its position there.
    """
    position = None
    for idx, candidate in enumerate(context):
        if candidate is sentence or candidate == sentence:
            position = idx
            break
    if position is None:
        raise ValueError("sentence is not part of the given context")

    q_norms = norms(question)
    if drop_stopwords:
        q_norms = _drop_stopwords(q_norms)
    sentence_norms = [list(s.norms) for s in context]
    if drop_stopwords:
        sentence_norms = [_drop_stopwords(s) for s in sentence_norms]
    return _features_at(q_norms, sentence_norms, position)


def _features_at(q_norms: Sequence[str], sentence_norms: Sequence[Sequence[str]], position: int) -> FeatureVector:
    own = sentence_norms[position]
    joint = len(set(q_norms) & set(own))
    longest = _longest_shared_ngram(q_norms, own)

    unigram_sets = [set(s) for s in sentence_norms]
    bigram_sets = [_bigrams(s) for s in sentence_norms]

    q_unigrams = set(q_norms)
    q_bigrams = _bigrams(q_norms)

    unique_unigram = any(
        u in unigram_sets[position]
        and all(u not in unigram_sets[k] for k in range(len(sentence_norms)) if k != position)
        for u in q_unigrams
    )
    unique_bigram = any(
        b in bigram_sets[position]
        and all(b not in bigram_sets[k] for k in range(len(sentence_norms)) if k != position)
        for b in q_bigrams
    )
    return FeatureVector(joint, longest, unique_unigram, unique_bigram, position)


@dataclass(frozen=True)
class SentenceFeatures:
    """One context sentence of an entry with its features and identity."""

    entry_id: str
    passage_index: int
    sentence_index: int
    global_index: int
    features: FeatureVector


def context_sentences(entry: GoldEntry) -> list[Sentence]:
    """All sentences of an entry, renumbered globally across its passages."""
    sentences = []
    for passage in entry.passages:
        for start, end in passage.sentences:
            raw = passage.text[start:end]
            sentences.append(Sentence(len(sentences), raw, tuple(tokenize(raw))))
    return sentences


def entry_features(entry: GoldEntry, drop_stopwords: bool = False) -> list[SentenceFeatures]:
    """Features for every sentence of an entry, in (passage, sentence) order."""
    q_norms = norms(tokenize(entry.question))
    if drop_stopwords:
        q_norms = _drop_stopwords(q_norms)
    context = context_sentences(entry)
    sentence_norms = [list(s.norms) for s in context]
    if drop_stopwords:
        sentence_norms = [_drop_stopwords(s) for s in sentence_norms]

    rows = []
    position = 0
    for p_idx, passage in enumerate(entry.passages):
        for s_idx in range(len(passage.sentences)):
            rows.append(
                SentenceFeatures(
                    entry_id=entry.id,
                    passage_index=p_idx,
                    sentence_index=s_idx,
                    global_index=position,
                    features=_features_at(q_norms, sentence_norms, position),
                )
            )
            position += 1
    return rows


def fact_global_indices(entry: GoldEntry, record: AnnotationRecord) -> set[int]:
    """Map a record's (passage, sentence) fact refs to global sentence indices."""
    offsets = []
    total = 0
    for passage in entry.passages:
        offsets.append(total)
        total += len(passage.sentences)
    out = set()
    for passage, sentence in record.supporting_facts:
        if not entry.has_sentence(passage, sentence):
            raise ValueError(f"record {record.entry_id}: dangling fact ref ({passage}, {sentence})")
        out.add(offsets[passage] + sentence)
    return out


def write_feature_table(
    target,
    rows_with_labels: Sequence[tuple[SentenceFeatures, bool]],
) -> None:
    """Tab-separated feature dump. One row per context sentence."""
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8") as fp:
            write_feature_table(fp, rows_with_labels)
        return
    header = ("entry_id", "passage", "sentence") + FEATURE_NAMES + ("supporting_fact",)
    target.write("\t".join(header) + "\n")
    for row, label in rows_with_labels:
        f = row.features
        target.write(
            "\t".join(
                (
                    row.entry_id,
                    str(row.passage_index),
                    str(row.sentence_index),
                    str(f.joint_words),
                    str(f.longest_ngram),
                    str(int(f.unique_unigram)),
                    str(int(f.unique_bigram)),
                    str(f.sentence_index),
                    str(int(label)),
                )
            )
            + "\n"
        )


def render_feature_table(rows_with_labels: Sequence[tuple[SentenceFeatures, bool]]) -> str:
    buffer = io.StringIO()
    write_feature_table(buffer, rows_with_labels)
    return buffer.getvalue()

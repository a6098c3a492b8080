import pytest

from mrcaudit.entries import FreeFormAnswer, GoldEntry, Passage
from mrcaudit.records import AnnotationRecord
from mrcaudit.taxonomy import Label


def build_passage(sentences, title=None):
    """Passage from sentence texts; a space joins consecutive sentences."""
    pieces = [s + " " for s in sentences[:-1]] + [sentences[-1]]
    text = "".join(pieces)
    spans = []
    offset = 0
    for piece in pieces:
        spans.append((offset, offset + len(piece)))
        offset += len(piece)
    return Passage(text=text, sentences=tuple(spans), title=title)


def build_entry(entry_id, question, passages, dataset="NewsQA", answers=None, extras=None):
    """Entry from a list of passages, each a list of sentence strings."""
    return GoldEntry(
        id=entry_id,
        dataset=dataset,
        question=question,
        answers=tuple(answers) if answers is not None else (FreeFormAnswer("x"),),
        passages=tuple(build_passage(sents) for sents in passages),
        extras=extras or {},
    )


def build_record(entry_id, annotator="a1", answer_type="AnswerType/Span", facts=(), reasoning=(), **kwargs):
    return AnnotationRecord(
        entry_id=entry_id,
        annotator_id=annotator,
        answer_type=Label.parse(answer_type) if answer_type else None,
        supporting_facts=frozenset(facts),
        reasoning=frozenset(Label.parse(r) for r in reasoning),
        **kwargs,
    )


@pytest.fixture
def simple_entry():
    return build_entry(
        "NewsQA:demo:0",
        "Who won the final game?",
        [["The final game was won by the visitors.", "Rain delayed the start.", "The crowd was quiet."]],
    )

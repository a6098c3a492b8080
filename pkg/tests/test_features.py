import numpy as np
import pytest

from conftest import build_entry, build_record
from mrcaudit.adapters import load
from mrcaudit.features import (
    FeatureVector,
    context_sentences,
    entry_features,
    fact_global_indices,
    overlap_features,
    render_feature_table,
)
from mrcaudit.textlex import Sentence, split_sentences, tokenize
from oracles import oracle_features

from pathlib import Path

DATA = Path(__file__).parent / "data"


def make_context(*sentence_texts):
    text = " ".join(sentence_texts)
    return split_sentences(text)


class TestOverlapFeatures:
    def test_direct_enumeration(self):
        question = tokenize("a b c")
        context = make_context("a b d.")
        fv = overlap_features(question, context[0], context)
        assert fv == FeatureVector(joint_words=2, longest_ngram=2, unique_unigram=True, unique_bigram=True, sentence_index=0)

    def test_disjoint_vocabulary(self):
        question = tokenize("x y z")
        context = make_context("a b c.", "d e f.")
        fv = overlap_features(question, context[0], context)
        assert fv.joint_words == 0
        assert fv.longest_ngram == 0
        assert not fv.unique_unigram
        assert not fv.unique_bigram

    def test_uniqueness_relative_to_other_sentences(self):
        question = tokenize("the keyword shark appears once")
        context = make_context("A shark was seen.", "Dolphins were seen.", "The keyword appears twice here, keyword appears.")
        fv = overlap_features(question, context[0], context)
        assert fv.unique_unigram  # "shark" occurs only in sentence 0
        fv2 = overlap_features(question, context[2], context)
        assert fv2.joint_words >= 2

    def test_sentence_must_be_in_context(self):
        question = tokenize("q")
        context = make_context("One sentence.")
        stray = Sentence(5, "Other.", tuple(tokenize("Other.")))
        with pytest.raises(ValueError):
            overlap_features(question, stray, context)

    def test_longest_ngram_bounds(self):
        question = tokenize("alpha beta gamma delta")
        context = make_context("zeta alpha beta gamma eta.")
        fv = overlap_features(question, context[0], context)
        assert fv.longest_ngram == 3
        assert fv.joint_words == 3

    def test_permuting_other_sentences_keeps_pair_features(self):
        question = tokenize("alpha beta unique1 unique2")
        sentences = make_context("alpha beta here.", "gamma there.", "unique1 unique2 appears.", "alpha again.")
        target = sentences[0]
        base = overlap_features(question, target, sentences)
        rng = np.random.default_rng(4)
        for _ in range(10):
            others = [s for s in sentences if s is not target]
            order = rng.permutation(len(others))
            permuted = [target] + [others[i] for i in order]
            fv = overlap_features(question, target, permuted)
            assert fv.joint_words == base.joint_words
            assert fv.longest_ngram == base.longest_ngram


class TestEntryFeatures:
    def test_multi_passage_global_indices(self):
        entry = build_entry(
            "NewsQA:x:0",
            "where is the ball?",
            [["The ball is here.", "The cat sat."], ["Dogs bark loudly.", "Birds sing."]],
        )
        rows = entry_features(entry)
        assert [(r.passage_index, r.sentence_index, r.global_index) for r in rows] == [
            (0, 0, 0),
            (0, 1, 1),
            (1, 0, 2),
            (1, 1, 3),
        ]
        assert [r.features.sentence_index for r in rows] == [0, 1, 2, 3]

    def test_uniqueness_spans_all_passages(self):
        entry = build_entry(
            "NewsQA:x:1",
            "the marker zebra is rare",
            [["A zebra grazed."], ["Another zebra slept.", "Nothing else."]],
        )
        rows = entry_features(entry)
        # "zebra" occurs in two different passages, so it is unique to neither.
        assert not rows[0].features.unique_unigram
        assert not rows[1].features.unique_unigram

    def test_keyword_unique_to_answer_sentence(self):
        entry = load("hotpotqa", DATA / "hotpotqa_dev.json")[0]
        rows = entry_features(entry)
        smyrna_2010 = [
            r
            for r in rows
            if r.passage_index == 1 and "2010 census" in entry.passages[1].sentence_texts()[r.sentence_index]
        ]
        assert len(smyrna_2010) == 1
        assert smyrna_2010[0].features.unique_unigram

    def test_fact_global_indices(self):
        entry = build_entry("NewsQA:x:2", "q?", [["A.", "B."], ["C."]])
        record = build_record(entry.id, facts={(0, 1), (1, 0)})
        assert fact_global_indices(entry, record) == {1, 2}

    def test_fact_global_indices_rejects_dangling(self):
        entry = build_entry("NewsQA:x:3", "q?", [["A."]])
        record = build_record(entry.id, facts={(0, 5)})
        with pytest.raises(ValueError):
            fact_global_indices(entry, record)

    def test_feature_table_format(self):
        entry = build_entry("NewsQA:x:4", "who won?", [["The visitors won.", "It rained."]])
        rows = entry_features(entry)
        table = render_feature_table([(row, row.global_index == 0) for row in rows])
        lines = table.strip().split("\n")
        assert lines[0].split("\t") == [
            "entry_id",
            "passage",
            "sentence",
            "joint_words",
            "longest_ngram",
            "unique_unigram",
            "unique_bigram",
            "sentence_index",
            "supporting_fact",
        ]
        assert len(lines) == 3
        assert lines[1].endswith("\t1")
        assert lines[2].endswith("\t0")


class TestAgainstOracle:
    def test_random_pairs_match_brute_force(self):
        rng = np.random.default_rng(20240817)
        vocab = [f"w{i}" for i in range(12)]
        for _ in range(500):
            question_words = [vocab[i] for i in rng.integers(0, len(vocab), size=rng.integers(1, 10))]
            sentences_words = [
                [vocab[i] for i in rng.integers(0, len(vocab), size=rng.integers(1, 12))]
                for _ in range(rng.integers(1, 6))
            ]
            question = tokenize(" ".join(question_words))
            context = [
                Sentence(idx, " ".join(words), tuple(tokenize(" ".join(words))))
                for idx, words in enumerate(sentences_words)
            ]
            position = int(rng.integers(0, len(context)))
            fv = overlap_features(question, context[position], context)
            expected = oracle_features(question_words, sentences_words, position)
            assert (fv.joint_words, fv.longest_ngram, fv.unique_unigram, fv.unique_bigram, fv.sentence_index) == expected

    def test_context_sentences_match_passage_slices(self):
        entry = build_entry("NewsQA:x:5", "q?", [["One.", "Two."], ["Three."]])
        sentences = context_sentences(entry)
        assert [s.index for s in sentences] == [0, 1, 2]
        assert [s.raw for s in sentences] == ["One. ", "Two.", "Three."]

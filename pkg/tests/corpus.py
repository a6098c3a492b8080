"""Synthetic annotated corpora for baseline evaluation tests."""

import numpy as np

from conftest import build_entry, build_record

SENTENCES_PER_ENTRY = 6
FACTS_PER_ENTRY = 3


def separable_corpus(entries=10):
    """Corpus where each supporting fact shares one question bigram unique to it.

    Every entry has six sentences and three facts; each fact sentence
    contains a two-token key from the question that appears nowhere else in
    the entry's context, and filler sentences share nothing with the
    question. Positive prior is 0.5.
    """
    pairs = []
    for i in range(entries):
        keys = [(f"k{i}x{j}a", f"k{i}x{j}b") for j in range(FACTS_PER_ENTRY)]
        question = "which statement mentions " + " and ".join(f"{a} {b}" for a, b in keys) + "?"
        fact_positions = []
        pos = i % SENTENCES_PER_ENTRY
        while len(fact_positions) < FACTS_PER_ENTRY:
            if pos not in fact_positions:
                fact_positions.append(pos)
            pos = (pos + 2) % SENTENCES_PER_ENTRY
        texts = []
        for s in range(SENTENCES_PER_ENTRY):
            if s in fact_positions:
                a, b = keys[fact_positions.index(s)]
                texts.append(f"This statement mentions {a} {b} clearly.")
            else:
                texts.append(f"Filler sentence number f{i}s{s} about unrelated matters.")
        entry = build_entry(f"NewsQA:sep:{i}", question, [texts])
        record = build_record(entry.id, facts={(0, s) for s in fact_positions})
        pairs.append((entry, record))
    return pairs


def shuffle_labels(pairs, rng: np.random.Generator):
    """Uniformly permute supporting-fact labels across the whole sample."""
    total = len(pairs) * SENTENCES_PER_ENTRY
    positives = sum(len(record.supporting_facts) for _, record in pairs)
    flat = np.zeros(total, dtype=bool)
    flat[:positives] = True
    rng.shuffle(flat)
    shuffled = []
    for idx, (entry, _) in enumerate(pairs):
        labels = flat[idx * SENTENCES_PER_ENTRY : (idx + 1) * SENTENCES_PER_ENTRY]
        facts = frozenset((0, int(s)) for s in np.flatnonzero(labels))
        shuffled.append((entry, build_record(entry.id, facts=facts)))
    return shuffled

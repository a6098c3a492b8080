import pytest

from conftest import build_entry
from mrcaudit.sampling import CapacityError, SamplePlan, sample


def corpus(n, shared_paragraph=False, dataset="NewsQA"):
    entries = []
    for i in range(n):
        sentences = ["Shared paragraph text."] if shared_paragraph else [f"Unique paragraph number {i}."]
        entries.append(build_entry(f"{dataset}:e{i}", f"question {i}?", [sentences], dataset=dataset))
    return entries


def test_same_seed_same_sample():
    entries = corpus(100)
    plan = SamplePlan(dataset="NewsQA", n=50, seed=7)
    assert sample(entries, plan) == sample(entries, plan)


def test_different_seeds_differ():
    entries = corpus(100)
    a = sample(entries, SamplePlan(dataset="NewsQA", n=50, seed=7))
    b = sample(entries, SamplePlan(dataset="NewsQA", n=50, seed=8))
    assert a != b


def test_output_is_draw_ordered_subset():
    entries = corpus(30)
    drawn = sample(entries, SamplePlan(dataset="NewsQA", n=10, seed=3))
    assert len(drawn) == 10
    ids = {e.id for e in entries}
    assert all(e.id in ids for e in drawn)
    assert len({e.id for e in drawn}) == 10


def test_shared_paragraph_capacity_error():
    entries = corpus(10, shared_paragraph=True)
    with pytest.raises(CapacityError, match="only 1 eligible"):
        sample(entries, SamplePlan(dataset="NewsQA", n=2, seed=0))


def test_capacity_error_without_uniqueness():
    entries = corpus(5)
    with pytest.raises(CapacityError, match="only 5 eligible"):
        sample(entries, SamplePlan(dataset="NewsQA", n=6, seed=0, unique_paragraphs=False))


def test_unique_paragraphs_filter():
    # 500 entries over 400 distinct paragraphs: ids i and i+400 share one.
    entries = []
    for i in range(500):
        text = f"Paragraph body {i % 400}."
        entries.append(build_entry(f"NewsQA:e{i}", f"q {i}?", [[text]]))
    drawn = sample(entries, SamplePlan(dataset="NewsQA", n=50, seed=11))
    keys = [e.paragraph_key() for e in drawn]
    for i, key_i in enumerate(keys):
        for key_j in keys[i + 1 :]:
            assert key_i != key_j


def test_duplicates_allowed_when_uniqueness_off():
    entries = corpus(10, shared_paragraph=True)
    drawn = sample(entries, SamplePlan(dataset="NewsQA", n=4, seed=0, unique_paragraphs=False))
    assert len(drawn) == 4


def test_plan_filters_by_dataset():
    entries = corpus(10, dataset="NewsQA") + corpus(10, dataset="DROP")
    drawn = sample(entries, SamplePlan(dataset="DROP", n=5, seed=1))
    assert all(e.dataset == "DROP" for e in drawn)


def test_invalid_plan_size():
    with pytest.raises(ValueError):
        SamplePlan(dataset="NewsQA", n=0, seed=0)


def test_contracts_hold_across_seeds():
    entries = corpus(40)
    for seed in range(100):
        drawn = sample(entries, SamplePlan(dataset="NewsQA", n=12, seed=seed))
        assert len(drawn) == 12
        ids = [e.id for e in drawn]
        assert len(set(ids)) == 12
        keys = [e.paragraph_key() for e in drawn]
        assert len(set(keys)) == 12

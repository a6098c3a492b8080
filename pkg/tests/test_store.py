import subprocess
import sys
from pathlib import Path

import numpy as np

from conftest import build_record
from mrcaudit.store import AnnotationStore, fold

CHILD = Path(__file__).parent / "crash_child.py"


def test_append_and_view(tmp_path):
    store = AnnotationStore(tmp_path / "log.jsonl")
    first = build_record("e1", annotator="a1", facts={(0, 0)})
    second = build_record("e1", annotator="a2")
    store.append(first)
    store.append(second)
    view = store.view()
    assert view[("e1", "a1")] == first
    assert view[("e1", "a2")] == second


def test_resubmission_latest_wins(tmp_path):
    store = AnnotationStore(tmp_path / "log.jsonl")
    store.append(build_record("e1", annotator="a1", answer_type="AnswerType/Span"))
    replacement = build_record("e1", annotator="a1", answer_type="AnswerType/Paraphrasing")
    store.append(replacement)
    assert len(store.events) == 2
    assert store.view()[("e1", "a1")] == replacement


def test_replay_reproduces_view(tmp_path):
    path = tmp_path / "log.jsonl"
    store = AnnotationStore(path)
    rng = np.random.default_rng(3)
    for step in range(40):
        entry = f"e{int(rng.integers(0, 8))}"
        annotator = f"a{int(rng.integers(0, 3))}"
        store.append(build_record(entry, annotator=annotator, facts={(0, int(rng.integers(0, 3)))}))
    reopened = AnnotationStore(path)
    assert reopened.view() == store.view()
    assert reopened.events == store.events


def test_view_is_fold_of_events(tmp_path):
    store = AnnotationStore(tmp_path / "log.jsonl")
    rng = np.random.default_rng(9)
    for step in range(60):
        store.append(build_record(f"e{int(rng.integers(0, 5))}", annotator=f"a{int(rng.integers(0, 2))}"))
        assert store.view() == fold(store.events)


def test_crash_after_ack_never_loses_submission(tmp_path):
    log_path = tmp_path / "log.jsonl"
    for trial in range(10):
        entry_id = f"e{trial}"
        process = subprocess.run(
            [sys.executable, str(CHILD), str(log_path), entry_id, "a1"],
            capture_output=True,
            text=True,
            timeout=60,
        )
        assert f"ACK {entry_id}" in process.stdout
        assert process.returncode == 1
        reopened = AnnotationStore(log_path)
        for past in range(trial + 1):
            assert ("e%d" % past, "a1") in reopened.view()

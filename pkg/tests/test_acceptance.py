"""Acceptance suite: one test per release criterion, at its stated tolerance.

Run with `pytest tests/test_acceptance.py -s` to see one PASS/FAIL line per
criterion as it completes.
"""

import json
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import build_record
from corpus import separable_corpus, shuffle_labels
from fixtures_tables import (
    encode_fixture,
    hotpotqa_answer_fixture,
    msmarco_fixture,
    newsqa_answer_knowledge_fixture,
    record_answer_fixture,
)
from mrcaudit.cli import main
from mrcaudit.cuebaseline import FitConfig, loss_gradient, loo_evaluate, regularized_loss
from mrcaudit.entries import write_entries
from mrcaudit.features import overlap_features
from mrcaudit.metrics import agreement, aggregate_f1, exact_match, token_f1
from mrcaudit.records import write_records
from mrcaudit.reports import aggregate
from mrcaudit.store import AnnotationStore
from mrcaudit.textlex import Sentence, tokenize
from oracles import oracle_features

CRASH_CHILD = Path(__file__).parent / "crash_child.py"


def report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {name}: {status}{suffix}")
    assert ok, f"{name}{suffix}"


class TestFeatureOracleEquivalence:
    def test_ten_thousand_random_pairs(self):
        rng = np.random.default_rng(1234)
        vocab = [f"w{i}" for i in range(14)] + ["2010", "51,271", "census"]
        started = time.monotonic()
        for _ in range(10_000):
            question_words = [vocab[i] for i in rng.integers(0, len(vocab), size=rng.integers(1, 11))]
            sentences_words = [
                [vocab[i] for i in rng.integers(0, len(vocab), size=rng.integers(1, 13))]
                for _ in range(rng.integers(1, 7))
            ]
            question = tokenize(" ".join(question_words))
            context = [
                Sentence(idx, " ".join(words), tuple(tokenize(" ".join(words))))
                for idx, words in enumerate(sentences_words)
            ]
            position = int(rng.integers(0, len(context)))
            fv = overlap_features(question, context[position], context)
            got = (fv.joint_words, fv.longest_ngram, fv.unique_unigram, fv.unique_bigram, fv.sentence_index)
            expected = oracle_features(question_words, sentences_words, position)
            assert got == expected, f"mismatch: {got} vs {expected} for {question_words} / {sentences_words}"
        elapsed = time.monotonic() - started
        report("feature-oracle-equivalence", elapsed < 60.0, f"10000 pairs in {elapsed:.1f}s")


class TestGradientCorrectness:
    def test_hundred_random_configurations(self):
        rng = np.random.default_rng(77)
        step = 1e-5
        worst = 0.0
        for _ in range(100):
            m = int(rng.integers(3, 40))
            matrix = rng.normal(scale=2.5, size=(m, 5))
            labels = (rng.random(m) > rng.random()).astype(float)
            if labels.min() == labels.max():
                labels[0] = 1.0 - labels[0]
            weights = rng.normal(size=5)
            bias = float(rng.normal())
            l2 = float(rng.choice([0.0, 1e-4, 1e-2, 0.1]))

            grad_w, grad_b = loss_gradient(matrix, labels, weights, bias, l2)
            analytic = np.append(grad_w, grad_b)
            numeric = np.zeros(6)
            for k in range(5):
                delta = np.zeros(5)
                delta[k] = step
                numeric[k] = (
                    regularized_loss(matrix, labels, weights + delta, bias, l2)
                    - regularized_loss(matrix, labels, weights - delta, bias, l2)
                ) / (2 * step)
            numeric[5] = (
                regularized_loss(matrix, labels, weights, bias + step, l2)
                - regularized_loss(matrix, labels, weights, bias - step, l2)
            ) / (2 * step)
            relative = np.abs(analytic - numeric) / np.maximum(1e-8, np.abs(analytic) + np.abs(numeric))
            worst = max(worst, float(relative.max()))
        report("gradient-correctness", worst < 1e-6, f"max relative error {worst:.2e}")


class TestMetricHandOracles:
    def test_derived_examples_exact(self):
        ok = True
        precision, recall, f1 = token_f1("a b c", "a d", normalize=False)
        ok &= precision == pytest.approx(1 / 3) and recall == pytest.approx(1 / 2) and f1 == pytest.approx(0.4)

        aggregates = aggregate_f1([(1.0, 0.0), (0.0, 1.0)])
        ok &= aggregates.mean_f1 == 0.0 and aggregates.macro_f1 == pytest.approx(0.5)

        single = aggregate_f1([(0.5, 1.0)])
        ok &= single.mean_f1 == single.macro_f1 == pytest.approx(2 * 0.5 / 1.5)

        gold = [build_record("e1", answer_type="AnswerType/Span", reasoning={"Reasoning/Temporal"})]
        other = [build_record("e1", answer_type="AnswerType/Span", reasoning={"Reasoning/Causal"})]
        ok &= agreement(gold, other).micro_f1 == pytest.approx(0.5)

        from mrcaudit.records import diff

        fact_gold = build_record("e2", facts={(0, 1), (0, 2)})
        fact_other = build_record("e2", facts={(0, 1)})
        result = diff(fact_gold, fact_other)
        fact_tp = [k for k in result.true_positives if k.startswith("SupportingFact/")]
        fact_fn = [k for k in result.false_negatives if k.startswith("SupportingFact/")]
        ok &= len(fact_tp) == 1 and len(fact_fn) == 1

        ok &= exact_match("27-24", "27-24") == 1
        ok &= exact_match("The Eiffel Tower", "eiffel tower") == 1
        ok &= exact_match("51,271", "53,438") == 0
        ok &= token_f1("same text", "same text") == (1.0, 1.0, 1.0)
        ok &= token_f1("alpha beta", "gamma delta") == (0.0, 0.0, 0.0)
        report("metric-hand-oracles", bool(ok))


class TestSeparableCorpusBaseline:
    def test_separable_f1(self):
        scores = loo_evaluate(separable_corpus(), runs=5, config=FitConfig())
        report("separable-corpus-f1", scores.f1 >= 0.95, f"F1 {scores.f1:.3f}")

    def test_shuffled_labels_near_prior(self):
        pairs = separable_corpus()
        prior = sum(len(r.supporting_facts) for _, r in pairs) / (len(pairs) * 6)
        rng = np.random.default_rng(2024)
        f1s = []
        config = FitConfig(iterations=300)
        for _ in range(100):
            scores = loo_evaluate(shuffle_labels(pairs, rng), runs=1, config=config)
            f1s.append(scores.f1)
        mean_f1 = float(np.mean(f1s))
        report(
            "shuffled-labels-near-prior",
            abs(mean_f1 - prior) <= 0.10,
            f"mean F1 {mean_f1:.3f} vs prior {prior:.2f} over 100 shuffles",
        )


class TestAggregationFixtures:
    def run(self, pairs):
        return aggregate([record for _, record in pairs], {entry.id: entry for entry, _ in pairs})

    def test_answer_type_tables(self):
        expectations = {
            "MSMarco": (msmarco_fixture, {"Span": (25, 50.0), "Paraphrasing": (4, 8.0), "Unanswerable": (20, 40.0), "Generated": (1, 2.0)}),
            "HotpotQA": (hotpotqa_answer_fixture, {"Span": (49, 98.0), "Paraphrasing": (0, 0.0), "Unanswerable": (0, 0.0), "Generated": (1, 2.0)}),
            "ReCoRd": (record_answer_fixture, {"Span": (50, 100.0), "Paraphrasing": (0, 0.0), "Unanswerable": (0, 0.0), "Generated": (0, 0.0)}),
            "NewsQA": (newsqa_answer_knowledge_fixture, {"Span": (38, 76.0), "Paraphrasing": (0, 0.0), "Unanswerable": (12, 24.0), "Generated": (0, 0.0)}),
        }
        ok = True
        for dataset, (builder, rows) in expectations.items():
            report_for = self.run(builder())
            for leaf, (absolute, relative) in rows.items():
                row = report_for.row(f"AnswerType/{leaf}")
                ok &= (row.absolute, row.relative) == (absolute, relative)
        report("aggregation-answer-type-rows", bool(ok))

    def test_multi_type_columns_not_encodable(self):
        # Published MultiRC and DROP answer-type counts sum past the sample
        # size (72 and 51 over 50), which a one-answer-type-per-record schema
        # cannot express; the builder refuses them.
        with pytest.raises(ValueError, match="sum to 72"):
            encode_fixture("MultiRC", {"Span": 36, "Paraphrasing": 24, "Generated": 12})
        with pytest.raises(ValueError, match="sum to 51"):
            encode_fixture("DROP", {"Span": 20, "Generated": 31})
        print(
            "ACCEPTANCE NOTE aggregation-answer-type-rows: MultiRC and DROP "
            "columns exceed the sample size and cannot be encoded as records"
        )

    def test_answerable_denominator_rows(self):
        msmarco = self.run(msmarco_fixture())
        knowledge = msmarco.row("Knowledge")
        ok = (knowledge.absolute, knowledge.denominator, knowledge.relative) == (3, 30, 10.0)
        newsqa = self.run(newsqa_answer_knowledge_fixture())
        ok &= (newsqa.row("Knowledge").absolute, newsqa.row("Knowledge").relative) == (6, 15.8)
        ok &= (newsqa.row("Knowledge/Intuitive").absolute, newsqa.row("Knowledge/Intuitive").relative) == (5, 13.2)
        report("aggregation-answerable-denominators", bool(ok))

    def test_report_command_emits_published_row(self, tmp_path, capsys):
        pairs = newsqa_answer_knowledge_fixture()
        entries_path = tmp_path / "entries.jsonl"
        records_path = tmp_path / "records.jsonl"
        write_entries(entries_path, [entry for entry, _ in pairs])
        write_records(records_path, [record for _, record in pairs])
        code = main(["report", "--entries", str(entries_path), "--records", str(records_path)])
        out = capsys.readouterr().out
        span_line = next(line for line in out.splitlines() if line.strip().startswith("Span"))
        report("aggregation-report-command", code == 0 and "38" in span_line and "76.0" in span_line)


class TestDeterminism:
    def test_sample_and_baseline_byte_reproducible(self, tmp_path):
        pairs = separable_corpus()
        source = tmp_path / "entries.jsonl"
        records_path = tmp_path / "records.jsonl"
        write_entries(source, [entry for entry, _ in pairs])
        write_records(records_path, [record for _, record in pairs])

        sample_outputs = []
        for name in ("s1.jsonl", "s2.jsonl"):
            out = tmp_path / name
            code = main(["sample", "--input", str(source), "--n", "5", "--seed", "11", "--output", str(out)])
            assert code == 0
            sample_outputs.append(out.read_bytes())

        baseline_outputs = []
        for name in ("b1.json", "b2.json"):
            out = tmp_path / name
            code = main(
                [
                    "baseline",
                    "--entries",
                    str(source),
                    "--records",
                    str(records_path),
                    "--seed",
                    "11",
                    "--format",
                    "machine",
                    "--output",
                    str(out),
                ]
            )
            assert code == 0
            baseline_outputs.append(out.read_bytes())

        ok = sample_outputs[0] == sample_outputs[1] and baseline_outputs[0] == baseline_outputs[1]
        report("seeded-byte-determinism", ok)


class TestTable6Reproduction:
    def test_published_baseline_scores(self):
        released = Path(__file__).parent / "data" / "released_annotations"
        if not released.exists():
            print(
                "ACCEPTANCE table6-reproduction: SKIP (conditional criterion; the "
                "authors' released annotated sample is not available in this "
                "environment, so the published per-dataset scores cannot be re-run)"
            )
            pytest.skip("released annotated sample not available")
        raise AssertionError("released data present but reproduction harness not wired")


class TestCrashSafety:
    def test_hundred_kill_restart_trials(self, tmp_path):
        log_path = tmp_path / "log.jsonl"
        started = time.monotonic()
        for trial in range(100):
            entry_id = f"e{trial:03d}"
            process = subprocess.run(
                [sys.executable, str(CRASH_CHILD), str(log_path), entry_id, "a1"],
                capture_output=True,
                text=True,
                timeout=120,
            )
            assert f"ACK {entry_id}" in process.stdout, process.stderr
        view = AnnotationStore(log_path).view()
        missing = [f"e{i:03d}" for i in range(100) if (f"e{i:03d}", "a1") not in view]
        elapsed = time.monotonic() - started
        report("crash-safety", not missing, f"100 kill/restart trials in {elapsed:.1f}s, lost {len(missing)}")

    def test_http_level_kill_preserves_acknowledged_submission(self, tmp_path):
        # One full-stack drill: acknowledge over HTTP, SIGKILL uvicorn,
        # reopen the log, the record must be there.
        import os
        import signal
        import socket
        import urllib.request

        from conftest import build_entry, build_record
        from mrcaudit.records import record_to_dict

        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            port = probe.getsockname()[1]
        entries_path = tmp_path / "entries.jsonl"
        log_path = tmp_path / "service-log.jsonl"
        entry = build_entry("NewsQA:kill:0", "who?", [["One.", "Two."]])
        write_entries(entries_path, [entry])

        server = subprocess.Popen(
            [
                sys.executable,
                "-m",
                "mrcaudit.cli",
                "serve",
                "--entries",
                str(entries_path),
                "--log",
                str(log_path),
                "--port",
                str(port),
            ],
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )
        try:
            deadline = time.monotonic() + 45
            while time.monotonic() < deadline:
                try:
                    urllib.request.urlopen(f"http://127.0.0.1:{port}/progress", timeout=1)
                    break
                except Exception:
                    time.sleep(0.25)
            else:
                raise AssertionError("service never came up")

            payload = json.dumps(record_to_dict(build_record(entry.id, facts={(0, 0)}))).encode()
            request = urllib.request.Request(
                f"http://127.0.0.1:{port}/tasks/{entry.id}/annotation",
                data=payload,
                method="PUT",
                headers={"Content-Type": "application/json"},
            )
            with urllib.request.urlopen(request, timeout=10) as response:
                acknowledged = response.status == 200
        finally:
            os.kill(server.pid, signal.SIGKILL)
            server.wait(timeout=30)

        survived = (entry.id, "a1") in AnnotationStore(log_path).view()
        report("crash-safety-http", acknowledged and survived, "SIGKILL after acknowledged PUT")

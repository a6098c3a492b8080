"""Logistic-regression baseline predicting supporting facts from lexical cues.

The classifier is trained from scratch: z-scored features, zero-initialized
weights, full-batch gradient descent on the L2-regularized negative
log-likelihood. Evaluation follows a leave-one-out protocol over annotated
entries, averaging per-entry precision/recall/F1 and repeating for several
runs that differ only in training-instance order; the spread across runs
yields a Student-t 95% confidence half-width.

Matrix-vector products are written as elementwise multiply plus axis sums
rather than BLAS matmuls so results are bit-identical across BLAS builds.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats
from scipy.special import expit

from .entries import GoldEntry
from .features import FeatureVector, entry_features, fact_global_indices
from .records import AnnotationRecord

logger = logging.getLogger(__name__)


class DegenerateFitError(ValueError):
    """Training data contains only one class."""


class ProtocolError(ValueError):
    """Evaluation input violates the leave-one-out protocol."""


@dataclass(frozen=True)
class LabeledInstance:
    features: FeatureVector
    is_supporting_fact: bool
    entry_id: str


@dataclass(frozen=True)
class FitConfig:
    learning_rate: float = 0.1
    iterations: int = 2000
    l2: float = 1e-4
    seed: int = 0
    shuffle: bool = True
    balance_classes: bool = False


@dataclass(frozen=True)
class Standardizer:
    means: tuple[float, ...]
    deviations: tuple[float, ...]

    def transform(self, matrix: np.ndarray) -> np.ndarray:
        return (matrix - np.asarray(self.means)) / np.asarray(self.deviations)


@dataclass(frozen=True)
class CueModel:
    weights: tuple[float, ...]
    bias: float
    standardizer: Standardizer


@dataclass(frozen=True)
class EvalScores:
    precision: float
    recall: float
    f1: float
    precision_half_width: float
    recall_half_width: float
    f1_half_width: float
    runs: int
    entries_evaluated: int
    entries_excluded: int


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return expit(z)


def _decision(matrix: np.ndarray, weights: np.ndarray, bias: float) -> np.ndarray:
    return (matrix * weights).sum(axis=1) + bias


def regularized_loss(
    matrix: np.ndarray,
    labels: np.ndarray,
    weights: np.ndarray,
    bias: float,
    l2: float,
    sample_weights: np.ndarray | None = None,
) -> float:
    """Mean negative log-likelihood plus an L2 penalty on the weights.

    Uses log(1 + e^z) - y*z per instance, which is stable for large |z|.
    The bias is not penalized.
    """
    z = _decision(matrix, weights, bias)
    per_instance = np.logaddexp(0.0, z) - labels * z
    if sample_weights is not None:
        data_term = float((per_instance * sample_weights).sum() / sample_weights.sum())
    else:
        data_term = float(per_instance.mean())
    return data_term + 0.5 * l2 * float((weights * weights).sum())


def loss_gradient(
    matrix: np.ndarray,
    labels: np.ndarray,
    weights: np.ndarray,
    bias: float,
    l2: float,
    sample_weights: np.ndarray | None = None,
) -> tuple[np.ndarray, float]:
    z = _decision(matrix, weights, bias)
    residual = _sigmoid(z) - labels
    if sample_weights is not None:
        scale = sample_weights / sample_weights.sum()
        grad_w = (matrix * (residual * scale)[:, None]).sum(axis=0) + l2 * weights
        grad_b = float((residual * scale).sum())
    else:
        m = matrix.shape[0]
        grad_w = (matrix * residual[:, None]).sum(axis=0) / m + l2 * weights
        grad_b = float(residual.mean())
    return grad_w, grad_b


def _standardizer(matrix: np.ndarray) -> Standardizer:
    means = matrix.mean(axis=0)
    deviations = matrix.std(axis=0)
    deviations = np.where(deviations > 0.0, deviations, 1.0)
    return Standardizer(tuple(float(v) for v in means), tuple(float(v) for v in deviations))


def _instance_matrix(instances: Sequence[LabeledInstance]) -> tuple[np.ndarray, np.ndarray]:
    matrix = np.array([inst.features.as_list() for inst in instances], dtype=np.float64)
    labels = np.array([1.0 if inst.is_supporting_fact else 0.0 for inst in instances], dtype=np.float64)
    return matrix, labels


def fit(instances: Sequence[LabeledInstance], config: FitConfig = FitConfig()) -> CueModel:
    """Train on labeled instances. Deterministic for a given config."""
    if not instances:
        raise DegenerateFitError("no training instances")
    matrix, labels = _instance_matrix(instances)
    if config.shuffle:
        rng = np.random.Generator(np.random.PCG64(config.seed))
        order = rng.permutation(len(labels))
        matrix, labels = matrix[order], labels[order]
    return _fit_arrays(matrix, labels, config)


def predict(model: CueModel, features: FeatureVector) -> tuple[float, bool]:
    """Probability that the sentence is a supporting fact, and the 0.5 call."""
    row = np.asarray(features.as_list(), dtype=np.float64)[None, :]
    scaled = model.standardizer.transform(row)
    probability = float(_sigmoid(_decision(scaled, np.asarray(model.weights), model.bias))[0])
    return probability, probability > 0.5


def predict_matrix(model: CueModel, matrix: np.ndarray) -> np.ndarray:
    scaled = model.standardizer.transform(matrix)
    return _sigmoid(_decision(scaled, np.asarray(model.weights), model.bias))


def _prf(true_positive: int, predicted: int, actual: int) -> tuple[float, float, float]:
    precision = true_positive / predicted if predicted else 0.0
    recall = true_positive / actual if actual else 0.0
    f1 = 0.0 if precision + recall == 0.0 else 2.0 * precision * recall / (precision + recall)
    return precision, recall, f1


def _half_width(values: np.ndarray) -> float:
    if len(values) < 2:
        return 0.0
    t_mult = float(stats.t.ppf(0.975, len(values) - 1))
    return t_mult * float(values.std(ddof=1)) / float(np.sqrt(len(values)))


@dataclass(frozen=True)
class _EntryInstances:
    entry_id: str
    matrix: np.ndarray
    labels: np.ndarray


def _prepare(sample: Sequence[tuple[GoldEntry, AnnotationRecord]]) -> list[_EntryInstances]:
    prepared = []
    for entry, record in sorted(sample, key=lambda pair: pair[0].id):
        rows = entry_features(entry)
        matrix = np.array([row.features.as_list() for row in rows], dtype=np.float64)
        facts = fact_global_indices(entry, record)
        labels = np.array([1.0 if row.global_index in facts else 0.0 for row in rows])
        prepared.append(_EntryInstances(entry.id, matrix, labels))
    return prepared


def loo_evaluate(
    sample: Sequence[tuple[GoldEntry, AnnotationRecord]],
    runs: int = 5,
    config: FitConfig = FitConfig(),
) -> EvalScores:
    """Leave-one-out evaluation over an annotated sample of one dataset.

    Each entry in turn is held out, a model is fitted on the remaining
    entries' sentence instances, and the held-out entry's sentences are
    scored against its annotated supporting facts. Entries without any
    annotated fact cannot be scored (recall is undefined) and are excluded
    from averaging but kept as training data; exclusions are logged.
    """
    if len(sample) < 2:
        raise ProtocolError(f"leave-one-out needs at least 2 entries, got {len(sample)}")
    datasets = {entry.dataset for entry, _ in sample}
    if len(datasets) > 1:
        raise ProtocolError(f"sample mixes datasets: {sorted(datasets)}")

    prepared = _prepare(sample)
    testable = [p for p in prepared if p.labels.sum() > 0]
    excluded = len(prepared) - len(testable)
    if excluded:
        logger.info("excluding %d entries without annotated supporting facts from averaging", excluded)
    if not testable:
        raise ProtocolError("no entries with annotated supporting facts")

    rng = np.random.Generator(np.random.PCG64(config.seed))
    run_means = np.zeros((runs, 3))
    for run in range(runs):
        per_entry = []
        for held_out in testable:
            train_matrix = np.concatenate([p.matrix for p in prepared if p.entry_id != held_out.entry_id])
            train_labels = np.concatenate([p.labels for p in prepared if p.entry_id != held_out.entry_id])
            if config.shuffle:
                order = rng.permutation(len(train_labels))
                train_matrix, train_labels = train_matrix[order], train_labels[order]
            model = _fit_arrays(train_matrix, train_labels, config)
            probabilities = predict_matrix(model, held_out.matrix)
            predicted = probabilities > 0.5
            true_positive = int((predicted * held_out.labels).sum())
            per_entry.append(_prf(true_positive, int(predicted.sum()), int(held_out.labels.sum())))
        run_means[run] = np.array(per_entry).mean(axis=0)

    means = run_means.mean(axis=0)
    return EvalScores(
        precision=float(means[0]),
        recall=float(means[1]),
        f1=float(means[2]),
        precision_half_width=_half_width(run_means[:, 0]),
        recall_half_width=_half_width(run_means[:, 1]),
        f1_half_width=_half_width(run_means[:, 2]),
        runs=runs,
        entries_evaluated=len(testable),
        entries_excluded=excluded,
    )


def _fit_arrays(matrix: np.ndarray, labels: np.ndarray, config: FitConfig) -> CueModel:
    if labels.min() == labels.max():
        raise DegenerateFitError("training data has a single class")
    standardizer = _standardizer(matrix)
    scaled = standardizer.transform(matrix)
    sample_weights = None
    if config.balance_classes:
        positives = labels.sum()
        negatives = len(labels) - positives
        per_class = {1.0: len(labels) / (2.0 * positives), 0.0: len(labels) / (2.0 * negatives)}
        sample_weights = np.array([per_class[y] for y in labels])
    weights = np.zeros(matrix.shape[1], dtype=np.float64)
    bias = 0.0
    for _ in range(config.iterations):
        grad_w, grad_b = loss_gradient(scaled, labels, weights, bias, config.l2, sample_weights)
        weights = weights - config.learning_rate * grad_w
        bias = bias - config.learning_rate * grad_b
    return CueModel(tuple(float(w) for w in weights), float(bias), standardizer)

"""Regression error metrics, confusion-matrix metrics and ROC/AUC.

Regression metrics operate on (actual, predicted) probability pairs.
Classification metrics are one-vs-rest per style; report-level figures are
macro averages (unweighted mean over the four styles), with plain
fraction-correct also available.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import STYLES, Style


class MetricError(ValueError):
    pass


class EmptySample(MetricError):
    pass


class LengthMismatch(MetricError):
    pass


class SingleClassSample(MetricError):
    pass


def _abs_errors(actual, predicted) -> np.ndarray:
    actual = np.asarray(actual, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if actual.shape != predicted.shape:
        raise LengthMismatch(f"{actual.shape} vs {predicted.shape}")
    if actual.size == 0:
        raise EmptySample("no samples")
    if not (np.isfinite(actual).all() and np.isfinite(predicted).all()):
        raise MetricError("non-finite value in sample")
    return np.abs(actual - predicted)


def mae(actual, predicted) -> float:
    """Mean absolute error."""
    return float(np.mean(_abs_errors(actual, predicted)))


def mdae(actual, predicted) -> float:
    """Median absolute error; even counts average the two middle values."""
    return float(np.median(_abs_errors(actual, predicted)))


def rmse(actual, predicted) -> float:
    """Root mean squared error."""
    err = _abs_errors(actual, predicted)
    return float(np.sqrt(np.mean(err * err)))


@dataclass(frozen=True)
class ConfusionCounts:
    """One-vs-rest counts for a single style."""

    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion(actual_labels, predicted_labels) -> dict[Style, ConfusionCounts]:
    """Per-style one-vs-rest confusion counts."""
    actual = list(actual_labels)
    predicted = list(predicted_labels)
    if len(actual) != len(predicted):
        raise LengthMismatch(f"{len(actual)} actual vs {len(predicted)} predicted")
    if not actual:
        raise EmptySample("no labels")
    out = {}
    for style in STYLES:
        tp = tn = fp = fn = 0
        for a, p in zip(actual, predicted):
            if a == style and p == style:
                tp += 1
            elif a == style:
                fn += 1
            elif p == style:
                fp += 1
            else:
                tn += 1
        out[style] = ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)
    return out


def recall(counts: ConfusionCounts) -> float:
    denom = counts.tp + counts.fn
    return counts.tp / denom if denom else 0.0


def precision(counts: ConfusionCounts) -> float:
    denom = counts.tp + counts.fp
    return counts.tp / denom if denom else 0.0


def f1(counts: ConfusionCounts) -> float:
    r, p = recall(counts), precision(counts)
    return 2 * r * p / (r + p) if r + p else 0.0


def accuracy(counts: ConfusionCounts) -> float:
    return (counts.tp + counts.tn) / counts.total if counts.total else 0.0


def recall_defined(counts: ConfusionCounts) -> bool:
    return counts.tp + counts.fn > 0


def precision_defined(counts: ConfusionCounts) -> bool:
    return counts.tp + counts.fp > 0


def f1_defined(counts: ConfusionCounts) -> bool:
    return recall(counts) + precision(counts) > 0


def fraction_correct(actual_labels, predicted_labels) -> float:
    """Plain share of exactly-matching labels."""
    actual = list(actual_labels)
    predicted = list(predicted_labels)
    if len(actual) != len(predicted):
        raise LengthMismatch(f"{len(actual)} actual vs {len(predicted)} predicted")
    if not actual:
        raise EmptySample("no labels")
    return sum(a == p for a, p in zip(actual, predicted)) / len(actual)


def macro_average(per_style: dict[Style, float]) -> float:
    """Unweighted mean over the four styles."""
    return sum(per_style[s] for s in STYLES) / len(STYLES)


@dataclass(frozen=True)
class RocCurve:
    """ROC points (fpr, tpr) from (0,0) to (1,1), plus trapezoidal AUC.

    AUC equals the Mann-Whitney statistic: the probability a random
    positive scores above a random negative, ties counted half.
    """

    points: tuple[tuple[float, float], ...]
    auc: float


def roc_auc(actual_labels, scores, positive: Style) -> RocCurve:
    """One-vs-rest ROC curve for ``positive`` from per-item scores.

    Thresholds sweep the distinct score values from high to low; tied
    scores advance TP and FP together, which the trapezoid handles as a
    diagonal segment (half credit for ties).
    """
    labels = np.array([1 if a == positive else 0 for a in actual_labels])
    scores = np.asarray(scores, dtype=float)
    if labels.shape != scores.shape:
        raise LengthMismatch(f"{labels.shape} labels vs {scores.shape} scores")
    if labels.size == 0:
        raise EmptySample("no samples")
    if not np.isfinite(scores).all():
        raise MetricError("non-finite score")
    n_pos = int(labels.sum())
    n_neg = int(labels.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise SingleClassSample(f"need both classes, got {n_pos} pos / {n_neg} neg")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    # group indices where the score strictly drops: one ROC vertex per
    # distinct threshold value
    distinct = np.nonzero(np.diff(sorted_scores))[0]
    boundaries = np.concatenate([distinct, [labels.size - 1]])
    cum_tp = np.cumsum(sorted_labels)[boundaries]
    cum_fp = boundaries + 1 - cum_tp

    points = [(0.0, 0.0)]
    # integer pair-credit accumulation: sum over threshold groups of
    # fp_step * (2 * tp_before + tp_step), i.e. twice the win count plus ties
    twice_credit = 0
    prev_tp = 0
    prev_fp = 0
    for tp, fp in zip(cum_tp.tolist(), cum_fp.tolist()):
        twice_credit += (fp - prev_fp) * (tp + prev_tp)
        prev_tp, prev_fp = tp, fp
        points.append((fp / n_neg, tp / n_pos))
    return RocCurve(points=tuple(points), auc=twice_credit / (2 * n_pos * n_neg))


@dataclass(frozen=True)
class StyleClassMetrics:
    counts: ConfusionCounts
    precision: float
    recall: float
    f1: float
    accuracy: float
    precision_defined: bool
    recall_defined: bool
    f1_defined: bool


@dataclass(frozen=True)
class ClassificationMetrics:
    """Per-style and macro-averaged metrics for one label/score set."""

    per_style: dict[Style, StyleClassMetrics]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    macro_accuracy: float
    fraction_correct: float
    macro_auc: float | None
    roc: dict[Style, RocCurve]


def classification_summary(actual_labels, predicted_labels, scores=None) -> ClassificationMetrics:
    """Full one-vs-rest summary; ``scores`` is an optional (N, 4) array of
    per-style decision values enabling ROC/AUC."""
    counts = confusion(actual_labels, predicted_labels)
    per_style = {}
    for style in STYLES:
        c = counts[style]
        per_style[style] = StyleClassMetrics(
            counts=c,
            precision=precision(c),
            recall=recall(c),
            f1=f1(c),
            accuracy=accuracy(c),
            precision_defined=precision_defined(c),
            recall_defined=recall_defined(c),
            f1_defined=f1_defined(c),
        )
    roc = {}
    macro_auc = None
    if scores is not None:
        scores = np.asarray(scores, dtype=float)
        aucs = []
        for style in STYLES:
            try:
                curve = roc_auc(actual_labels, scores[:, style.index], style)
            except SingleClassSample:
                continue
            roc[style] = curve
            aucs.append(curve.auc)
        if aucs:
            macro_auc = sum(aucs) / len(aucs)
    return ClassificationMetrics(
        per_style=per_style,
        macro_precision=macro_average({s: per_style[s].precision for s in STYLES}),
        macro_recall=macro_average({s: per_style[s].recall for s in STYLES}),
        macro_f1=macro_average({s: per_style[s].f1 for s in STYLES}),
        macro_accuracy=macro_average({s: per_style[s].accuracy for s in STYLES}),
        fraction_correct=fraction_correct(actual_labels, predicted_labels),
        macro_auc=macro_auc,
        roc=roc,
    )

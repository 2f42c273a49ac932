"""Shared learner plumbing: algorithm specs, training sets, model base.

Every learner trains in one of two modes: REGRESSION predicts a single
real target per row (a style probability), CLASSIFICATION predicts one of
the four styles plus per-style decision scores usable for ROC ranking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from ..dataset import STYLES, Style


class LearnerError(ValueError):
    pass


class HyperparameterError(LearnerError):
    pass


class DegenerateData(LearnerError):
    pass


class WidthMismatch(LearnerError):
    pass


class Mode(Enum):
    REGRESSION = "regression"
    CLASSIFICATION = "classification"


class AlgorithmKind(Enum):
    KNN = "knn"
    SVM_RBF = "svm_rbf"
    DECISION_TREE = "decision_tree"
    RANDOM_FOREST = "random_forest"
    MLP = "mlp"


ALLOWED_HYPERPARAMETERS: dict[AlgorithmKind, frozenset[str]] = {
    AlgorithmKind.KNN: frozenset({"k"}),
    AlgorithmKind.SVM_RBF: frozenset({"c", "gamma", "epsilon", "tol", "max_iter"}),
    AlgorithmKind.DECISION_TREE: frozenset(
        {"max_depth", "min_samples_leaf", "prune", "confidence"}
    ),
    AlgorithmKind.RANDOM_FOREST: frozenset(
        {"n_trees", "max_features", "min_samples_leaf", "max_depth"}
    ),
    AlgorithmKind.MLP: frozenset({"hidden_units", "learning_rate", "epochs"}),
}


@dataclass(frozen=True)
class AlgorithmSpec:
    """Which algorithm to train, with named numeric settings and a seed.

    Only RANDOM_FOREST and MLP consume the seed (bootstrap/feature sampling
    and weight initialization); the other three are seed-free.
    """

    kind: AlgorithmKind
    hyperparameters: Mapping[str, float] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        allowed = ALLOWED_HYPERPARAMETERS[self.kind]
        for name, value in self.hyperparameters.items():
            if name not in allowed:
                raise HyperparameterError(
                    f"{self.kind.value} does not accept hyperparameter {name!r} "
                    f"(allowed: {sorted(allowed)})"
                )
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise HyperparameterError(f"{name} must be finite, got {value!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise HyperparameterError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    def get(self, name: str, default: float) -> float:
        return float(self.hyperparameters.get(name, default))


@dataclass(frozen=True)
class TrainingSet:
    """Binary feature matrix plus one target column.

    ``target`` holds reals in [0, 1] for regression or style indices
    (0..3, canonical order) for classification; ``fit`` checks the mode it
    is asked for against the data.
    """

    features: np.ndarray
    target: np.ndarray

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=float)
        if feats.ndim != 2:
            raise LearnerError(f"features must be 2-D, got shape {feats.shape}")
        if feats.shape[0] < 2:
            raise DegenerateData(f"need at least 2 training rows, got {feats.shape[0]}")
        if not np.isin(feats, (0.0, 1.0)).all():
            raise LearnerError("features must be binary (0/1)")
        target = np.asarray(self.target)
        if target.shape != (feats.shape[0],):
            raise LearnerError(
                f"target must have one entry per row: {target.shape} vs {feats.shape[0]} rows"
            )
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "target", target)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def regression_targets(self) -> np.ndarray:
        y = np.asarray(self.target, dtype=float)
        if not np.isfinite(y).all():
            raise LearnerError("regression targets must be finite")
        if ((y < 0) | (y > 1)).any():
            raise LearnerError("regression targets must lie in [0, 1]")
        return y

    def label_indices(self) -> np.ndarray:
        raw = list(np.asarray(self.target).tolist())
        idx = [t.index if isinstance(t, Style) else int(t) for t in raw]
        if any(i not in (0, 1, 2, 3) for i in idx):
            raise LearnerError("classification targets must be styles (0..3)")
        return np.asarray(idx, dtype=np.int64)


class TrainedModel:
    """Immutable fitted model; subclasses fill in the prediction hooks."""

    def __init__(self, spec: AlgorithmSpec, mode: Mode, n_features: int, converged: bool = True):
        self.spec = spec
        self.mode = mode
        self.n_features = n_features
        self.converged = converged

    def _check_row(self, row) -> np.ndarray:
        arr = np.asarray(row, dtype=float).reshape(-1)
        if arr.shape[0] != self.n_features:
            raise WidthMismatch(
                f"model trained on {self.n_features} features, row has {arr.shape[0]}"
            )
        return arr

    def predict_regression(self, row) -> float:
        if self.mode is not Mode.REGRESSION:
            raise LearnerError("model was trained for classification")
        return self._predict_value(self._check_row(row))

    def predict_classification(self, row) -> tuple[Style, np.ndarray]:
        """Dominant style plus the four per-style decision scores."""
        if self.mode is not Mode.CLASSIFICATION:
            raise LearnerError("model was trained for regression")
        scores = self._predict_scores(self._check_row(row))
        return STYLES[int(np.argmax(scores))], scores

    def _predict_value(self, row: np.ndarray) -> float:
        raise NotImplementedError

    def _predict_scores(self, row: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _params_to_json(self) -> dict:
        raise NotImplementedError


def canonical_training_order(features: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Sort order making fitted parameters independent of input row order.

    Rows sort lexicographically by feature values then target, so permuting
    the caller's rows cannot change what order-sensitive internals (greedy
    pair selection, accumulation order) compute.
    """
    keys = [np.asarray(target, dtype=float)]
    for col in range(features.shape[1] - 1, -1, -1):
        keys.append(features[:, col])
    return np.lexsort(keys)

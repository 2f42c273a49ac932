"""k-nearest-neighbour prediction by Euclidean distance on binary rows.

k defaults to round(sqrt(n_train)), never below 1 nor above n_train.
Neighbour ties at the k-th distance are broken by lower training index.
"""

from __future__ import annotations

import math

import numpy as np

from .base import AlgorithmSpec, Mode, TrainedModel, TrainingSet


def default_k(n_train: int) -> int:
    return min(max(1, round(math.sqrt(n_train))), n_train)


class KnnModel(TrainedModel):
    def __init__(self, spec: AlgorithmSpec, mode: Mode, features, target, k: int, converged=True):
        super().__init__(spec, mode, np.asarray(features).shape[1], converged)
        self.features = np.asarray(features, dtype=float)
        self.target = np.asarray(target)
        self.k = int(k)

    def _neighbors(self, row: np.ndarray) -> np.ndarray:
        diff = self.features - row
        sq_dist = np.einsum("ij,ij->i", diff, diff)
        order = np.argsort(sq_dist, kind="stable")
        return order[: self.k]

    def _predict_value(self, row: np.ndarray) -> float:
        picked = np.asarray(self.target, dtype=float)[self._neighbors(row)]
        # value-sorted exact summation keeps the mean independent of the
        # training rows' storage order when the neighbour set is unambiguous
        return math.fsum(np.sort(picked).tolist()) / self.k

    def _predict_scores(self, row: np.ndarray) -> np.ndarray:
        votes = np.bincount(
            np.asarray(self.target, dtype=np.int64)[self._neighbors(row)], minlength=4
        )
        return votes / self.k

    def _params_to_json(self) -> dict:
        return {
            "k": self.k,
            "features": self.features.tolist(),
            "target": self.target.tolist(),
        }


def fit_knn(spec: AlgorithmSpec, data: TrainingSet, mode: Mode) -> KnnModel:
    target = data.regression_targets() if mode is Mode.REGRESSION else data.label_indices()
    k = int(spec.get("k", 0)) or default_k(data.n_rows)
    if not 1 <= k <= data.n_rows:
        k = min(max(1, k), data.n_rows)
    return KnnModel(spec, mode, data.features, target, k)

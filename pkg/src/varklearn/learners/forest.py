"""Bagged forest of unpruned trees with per-node random feature subsets.

Every tree's randomness comes only from (spec.seed, tree index): bootstrap
rows from a per-tree generator, per-node candidate features from a counter
hash of (tree token, node id).  Building trees in parallel therefore gives
the same forest as building them sequentially.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .base import AlgorithmSpec, Mode, TrainedModel, TrainingSet
from .tree import CLASSIFICATION, REGRESSION, Tree, grow_tree

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def _node_feature_subset(token: int, node_id: int, n_features: int, m: int) -> np.ndarray:
    """m distinct features for one node via a hashed partial Fisher-Yates."""
    pool = list(range(n_features))
    base = _splitmix64(token ^ _splitmix64(node_id))
    for j in range(m):
        r = j + _splitmix64(base + j) % (n_features - j)
        pool[j], pool[r] = pool[r], pool[j]
    return np.asarray(sorted(pool[:m]), dtype=np.int64)


def _fit_one_tree(tree_idx, seed, X, y, task, m, min_leaf, max_depth) -> Tree:
    ss = np.random.SeedSequence((seed, tree_idx))
    rng = np.random.default_rng(ss)
    token = int(ss.generate_state(1, np.uint64)[0])
    n, d = X.shape
    boot = rng.integers(0, n, size=n)

    def candidates(node_id: int) -> np.ndarray:
        return _node_feature_subset(token, node_id, d, m)

    return grow_tree(X[boot], y[boot], task, min_leaf, max_depth, candidates)


class RandomForestModel(TrainedModel):
    def __init__(self, spec, mode, n_features, trees: list[Tree]):
        super().__init__(spec, mode, n_features)
        self.trees = trees

    def tree_values(self, row) -> np.ndarray:
        """Per-tree regression outputs for one row (pre-averaging)."""
        row = self._check_row(row)
        return np.array([t.predict_value(row) for t in self.trees])

    def _predict_value(self, row: np.ndarray) -> float:
        return float(np.mean([t.predict_value(row) for t in self.trees]))

    def _predict_scores(self, row: np.ndarray) -> np.ndarray:
        votes = np.zeros(4)
        for t in self.trees:
            counts = t.leaf_counts(row)
            votes[int(np.argmax(counts))] += 1
        return votes / len(self.trees)

    def _params_to_json(self) -> dict:
        return {"trees": [t.to_json() for t in self.trees]}


def fit_random_forest(
    spec: AlgorithmSpec, data: TrainingSet, mode: Mode, n_jobs: int = 1
) -> RandomForestModel:
    n_trees = int(spec.get("n_trees", 100))
    m = int(spec.get("max_features", math.ceil(math.sqrt(data.n_features))))
    m = min(max(1, m), data.n_features)
    min_leaf = int(spec.get("min_samples_leaf", 1))
    max_depth = int(spec.get("max_depth", data.n_features))

    task = REGRESSION if mode is Mode.REGRESSION else CLASSIFICATION
    y = data.regression_targets() if mode is Mode.REGRESSION else data.label_indices()
    args = [
        (i, int(spec.seed), data.features, y, task, m, min_leaf, max_depth)
        for i in range(n_trees)
    ]
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            trees = list(pool.map(lambda a: _fit_one_tree(*a), args))
    else:
        trees = [_fit_one_tree(*a) for a in args]
    return RandomForestModel(spec, mode, data.n_features, trees)

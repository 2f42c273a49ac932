"""Binary-feature decision trees for both regression and classification.

Classification splits maximize gain ratio (information gain over split
information) and can be pruned bottom-up with a pessimistic binomial error
bound; regression splits maximize variance reduction and are left unpruned.
Trees are grown breadth-first with per-level vectorized split statistics,
which keeps single-tree and forest fitting fast on small cohorts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import (
    AlgorithmSpec,
    Mode,
    TrainedModel,
    TrainingSet,
    canonical_training_order,
)

REGRESSION = "regression"
CLASSIFICATION = "classification"

_GAIN_TOL = 1e-12


@dataclass
class Tree:
    """Flat array tree; ``feature[i] == -1`` marks node i as a leaf."""

    task: str
    feature: np.ndarray  # split feature per node, -1 for leaves
    left: np.ndarray  # child walked when row[feature] == 0
    right: np.ndarray  # child walked when row[feature] == 1
    n_node: np.ndarray  # training rows reaching each node
    reg_value: np.ndarray | None = None  # per-node target mean
    class_counts: np.ndarray | None = None  # per-node (4,) label counts

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def _leaf_of(self, row: np.ndarray) -> int:
        node = 0
        feature = self.feature
        while feature[node] >= 0:
            node = self.right[node] if row[feature[node]] > 0.5 else self.left[node]
        return int(node)

    def predict_value(self, row: np.ndarray) -> float:
        return float(self.reg_value[self._leaf_of(row)])

    def leaf_counts(self, row: np.ndarray) -> np.ndarray:
        return self.class_counts[self._leaf_of(row)]

    def to_json(self) -> dict:
        doc = {
            "task": self.task,
            "feature": self.feature.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "n_node": self.n_node.tolist(),
        }
        if self.task == REGRESSION:
            doc["reg_value"] = self.reg_value.tolist()
        else:
            doc["class_counts"] = self.class_counts.tolist()
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "Tree":
        task = doc["task"]
        return cls(
            task=task,
            feature=np.asarray(doc["feature"], dtype=np.int64),
            left=np.asarray(doc["left"], dtype=np.int64),
            right=np.asarray(doc["right"], dtype=np.int64),
            n_node=np.asarray(doc["n_node"], dtype=np.int64),
            reg_value=(
                np.asarray(doc["reg_value"], dtype=float) if task == REGRESSION else None
            ),
            class_counts=(
                np.asarray(doc["class_counts"], dtype=np.int64)
                if task == CLASSIFICATION
                else None
            ),
        )


def _entropy_per_row(counts: np.ndarray) -> np.ndarray:
    """Shannon entropy (bits) of each count row; zero counts contribute 0."""
    totals = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = counts / totals
        log_term = np.where(counts > 0, frac * np.log2(np.where(frac > 0, frac, 1.0)), 0.0)
    return -log_term.sum(axis=-1)


def grow_tree(
    X,
    y,
    task: str,
    min_samples_leaf: int,
    max_depth: int,
    candidate_fn=None,
) -> Tree:
    """Grow a tree breadth-first.

    ``candidate_fn(node_id) -> sorted feature-index array`` restricts the
    split search per node (used by the forest); None searches all features.
    Splits must leave ``min_samples_leaf`` rows on each side and give a
    positive criterion gain; feature-index order breaks score ties.
    """
    X = np.asarray(X)
    n, d = X.shape
    Xi = X.astype(np.int64)
    if task == REGRESSION:
        y_val = np.asarray(y, dtype=float)
    else:
        y_lab = np.asarray(y, dtype=np.int64)

    feature: list[int] = []
    left: list[int] = []
    right: list[int] = []
    n_node: list[int] = []
    reg_value: list[float] = []
    class_counts: list[np.ndarray] = []

    def new_node() -> int:
        feature.append(-1)
        left.append(-1)
        right.append(-1)
        n_node.append(0)
        if task == REGRESSION:
            reg_value.append(0.0)
        else:
            class_counts.append(np.zeros(4, dtype=np.int64))
        return len(feature) - 1

    root = new_node()
    active = [root]
    level_idx = np.arange(n)
    sample_slot = np.zeros(n, dtype=np.int64)
    depth = 0

    while active:
        a = len(active)
        counts = np.bincount(sample_slot, minlength=a)
        if task == REGRESSION:
            yl = y_val[level_idx]
            sums = np.bincount(sample_slot, weights=yl, minlength=a)
            sq_sums = np.bincount(sample_slot, weights=yl * yl, minlength=a)
            for slot, node in enumerate(active):
                n_node[node] = int(counts[slot])
                reg_value[node] = float(sums[slot] / counts[slot])
        else:
            ll = y_lab[level_idx]
            cc = np.bincount(sample_slot * 4 + ll, minlength=a * 4).reshape(a, 4)
            for slot, node in enumerate(active):
                n_node[node] = int(counts[slot])
                class_counts[node] = cc[slot].copy()

        if depth >= max_depth:
            break

        if candidate_fn is None:
            cand = np.broadcast_to(np.arange(d, dtype=np.int64), (a, d))
        else:
            cand = np.stack([candidate_fn(node) for node in active])
        m = cand.shape[1]

        gathered = Xi[level_idx[:, None], cand[sample_slot]]  # (L, m) sides
        keys = (sample_slot[:, None] * m + np.arange(m)) * 2 + gathered
        side_counts = np.bincount(keys.ravel(), minlength=a * m * 2).reshape(a, m, 2)
        valid = (side_counts >= min_samples_leaf).all(axis=2)

        with np.errstate(divide="ignore", invalid="ignore"):
            if task == REGRESSION:
                side_sums = np.bincount(
                    keys.ravel(), weights=np.repeat(yl, m), minlength=a * m * 2
                ).reshape(a, m, 2)
                proxy = np.where(side_counts > 0, side_sums**2 / side_counts, 0.0).sum(axis=2)
                parent_proxy = sums**2 / counts
                gain = proxy - parent_proxy[:, None]
                tol = _GAIN_TOL * np.maximum(1.0, sq_sums)[:, None]
                score = np.where(valid & (gain > tol), gain, -np.inf)
            else:
                keys4 = keys.ravel() * 4 + np.repeat(ll, m)
                side_cc = np.bincount(keys4, minlength=a * m * 2 * 4).reshape(a, m, 2, 4)
                h_side = _entropy_per_row(side_cc)  # (a, m, 2)
                weighted = (side_counts * h_side).sum(axis=2) / counts[:, None]
                info_gain = _entropy_per_row(cc)[:, None] - weighted
                frac = side_counts / counts[:, None, None]
                split_info = -np.where(frac > 0, frac * np.log2(np.where(frac > 0, frac, 1.0)), 0.0).sum(axis=2)
                ratio = np.where(split_info > 0, info_gain / split_info, -np.inf)
                score = np.where(valid & (info_gain > _GAIN_TOL), ratio, -np.inf)

        best_j = np.argmax(score, axis=1)
        splits = score[np.arange(a), best_j] > -np.inf

        if not splits.any():
            break

        slot_child = np.full((a, 2), -1, dtype=np.int64)
        next_active = []
        for slot, node in enumerate(active):
            if not splits[slot]:
                continue
            feature[node] = int(cand[slot, best_j[slot]])
            left_id, right_id = new_node(), new_node()
            left[node], right[node] = left_id, right_id
            slot_child[slot, 0] = len(next_active)
            next_active.append(left_id)
            slot_child[slot, 1] = len(next_active)
            next_active.append(right_id)

        side = gathered[np.arange(len(level_idx)), best_j[sample_slot]]
        new_slots = slot_child[sample_slot, side]
        keep = new_slots >= 0
        level_idx = level_idx[keep]
        sample_slot = new_slots[keep]
        active = next_active
        depth += 1

    return Tree(
        task=task,
        feature=np.asarray(feature, dtype=np.int64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        n_node=np.asarray(n_node, dtype=np.int64),
        reg_value=np.asarray(reg_value, dtype=float) if task == REGRESSION else None,
        class_counts=np.stack(class_counts) if task == CLASSIFICATION else None,
    )


def binomial_upper_bound(errors: int, n: int, confidence: float) -> float:
    """Smallest error rate p with P[Binomial(n, p) <= errors] <= confidence.

    The pessimistic per-leaf error estimate: observed errors inflated to the
    upper end of their binomial confidence interval.
    """
    if n <= 0 or errors >= n:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = (lo + hi) / 2.0
        # P[Bin(n, mid) <= errors] via the stable term recurrence
        if mid <= 0.0:
            cdf = 1.0
        elif mid >= 1.0:
            cdf = 0.0
        else:
            term = math.exp(n * math.log1p(-mid))
            cdf = term
            for i in range(errors):
                term *= (n - i) / (i + 1) * (mid / (1.0 - mid))
                cdf += term
        if cdf > confidence:
            lo = mid
        else:
            hi = mid
    return hi


def prune_classification_tree(tree: Tree, confidence: float) -> None:
    """Collapse subtrees whose pessimistic error is no better than a leaf."""

    def estimated_errors(node: int) -> float:
        n = int(tree.n_node[node])
        if tree.feature[node] < 0:
            errors = n - int(tree.class_counts[node].max())
            return n * binomial_upper_bound(errors, n, confidence)
        subtree = estimated_errors(int(tree.left[node])) + estimated_errors(
            int(tree.right[node])
        )
        as_leaf = n * binomial_upper_bound(
            n - int(tree.class_counts[node].max()), n, confidence
        )
        if as_leaf <= subtree + 1e-9:
            tree.feature[node] = -1
            tree.left[node] = -1
            tree.right[node] = -1
            return as_leaf
        return subtree

    estimated_errors(0)


class DecisionTreeModel(TrainedModel):
    """Single tree; training rows are canonically re-ordered before fitting
    so predictions do not depend on the caller's row order."""

    def __init__(self, spec, mode, n_features, tree: Tree):
        super().__init__(spec, mode, n_features)
        self.tree = tree

    def _predict_value(self, row: np.ndarray) -> float:
        return self.tree.predict_value(row)

    def _predict_scores(self, row: np.ndarray) -> np.ndarray:
        counts = self.tree.leaf_counts(row)
        return counts / counts.sum()

    def _params_to_json(self) -> dict:
        return {"tree": self.tree.to_json()}


def fit_decision_tree(spec: AlgorithmSpec, data: TrainingSet, mode: Mode) -> DecisionTreeModel:
    max_depth = int(spec.get("max_depth", 16))
    min_leaf = int(spec.get("min_samples_leaf", 2))
    if mode is Mode.REGRESSION:
        y = data.regression_targets()
        order = canonical_training_order(data.features, y)
        tree = grow_tree(data.features[order], y[order], REGRESSION, min_leaf, max_depth)
    else:
        y = data.label_indices()
        order = canonical_training_order(data.features, y)
        tree = grow_tree(data.features[order], y[order], CLASSIFICATION, min_leaf, max_depth)
        if spec.get("prune", 1.0):
            prune_classification_tree(tree, spec.get("confidence", 0.25))
    return DecisionTreeModel(spec, mode, data.n_features, tree)

"""Random forest regression: bagged greedy variance-reduction trees.

Splits are searched over all features by sorting each node's columns and
scanning split points with prefix sums, which keeps the per-node cost at
O(d * n log n) without any Python-level inner loops. Ties are broken by
lowest feature index, then lowest threshold. Trees grow until nodes are
pure or min_samples_leaf forbids further splits.
"""
from __future__ import annotations

import numpy as np


class _Tree:
    """Flat-array binary tree; leaves have feature == -1."""

    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=int)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=int)
        self.right = np.asarray(right, dtype=int)
        self.value = np.asarray(value, dtype=float)

    def predict(self, X: np.ndarray) -> np.ndarray:
        pos = np.zeros(X.shape[0], dtype=int)
        while True:
            feat = self.feature[pos]
            active = feat >= 0
            if not active.any():
                break
            rows = np.nonzero(active)[0]
            f = feat[rows]
            go_left = X[rows, f] <= self.threshold[pos[rows]]
            pos[rows] = np.where(
                go_left, self.left[pos[rows]], self.right[pos[rows]]
            )
        return self.value[pos]


def _best_split(X: np.ndarray, y: np.ndarray, min_leaf: int):
    """Return (feature, threshold) minimizing child SSE, or None."""
    n, d = X.shape
    if n < 2 * min_leaf:
        return None
    order = np.argsort(X, axis=0, kind="stable")
    xs = np.take_along_axis(X, order, axis=0)
    ys = y[order]
    cum = np.cumsum(ys, axis=0)
    cum_sq = np.cumsum(ys * ys, axis=0)

    n_left = np.arange(1, n, dtype=float)[:, None]
    n_right = n - n_left
    sse_left = cum_sq[:-1] - cum[:-1] ** 2 / n_left
    sse_right = (cum_sq[-1] - cum_sq[:-1]) - (cum[-1] - cum[:-1]) ** 2 / n_right
    total = sse_left + sse_right

    valid = (
        (xs[1:] > xs[:-1])
        & (n_left >= min_leaf)
        & (n_right >= min_leaf)
    )
    total = np.where(valid, total, np.inf)

    per_feature_best = total.min(axis=0)
    f = int(np.argmin(per_feature_best))  # first minimum = lowest feature
    if not np.isfinite(per_feature_best[f]):
        return None
    pos = int(np.argmin(total[:, f]))     # first minimum = lowest threshold
    threshold = 0.5 * (xs[pos, f] + xs[pos + 1, f])
    return f, threshold


def _grow_tree(X: np.ndarray, y: np.ndarray, min_leaf: int) -> _Tree:
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    stack = [(new_node(), np.arange(len(y)))]
    while stack:
        node, idx = stack.pop()
        yn = y[idx]
        value[node] = float(yn.mean())
        sse = float(((yn - yn.mean()) ** 2).sum())
        if sse <= 1e-12:
            continue
        split = _best_split(X[idx], yn, min_leaf)
        if split is None:
            continue
        f, thr = split
        mask = X[idx, f] <= thr
        feature[node] = f
        threshold[node] = thr
        left[node] = new_node()
        right[node] = new_node()
        stack.append((left[node], idx[mask]))
        stack.append((right[node], idx[~mask]))
    return _Tree(feature, threshold, left, right, value)


class ForestModel:
    def __init__(self, hyperparameters: dict, seed: int = 0):
        self.n_trees = int(hyperparameters.get("n_trees", 100))
        self.min_samples_leaf = int(hyperparameters.get("min_samples_leaf", 1))
        self.bootstrap = bool(hyperparameters.get("bootstrap", True))
        self.seed = seed
        self.trees: list[_Tree] = []
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")

    def fit(self, X: np.ndarray, y: np.ndarray) -> "ForestModel":
        n = X.shape[0]
        seeds = np.random.SeedSequence(self.seed).spawn(self.n_trees)
        self.trees = []
        for tree_seed in seeds:
            if self.bootstrap:
                idx = np.random.default_rng(tree_seed).integers(0, n, n)
                self.trees.append(_grow_tree(X[idx], y[idx], self.min_samples_leaf))
            else:
                self.trees.append(_grow_tree(X, y, self.min_samples_leaf))
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        if not self.trees:
            raise RuntimeError("model not fitted")
        out = np.zeros(X.shape[0])
        for tree in self.trees:
            out += tree.predict(X)
        return out / len(self.trees)

    def to_json_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "min_samples_leaf": self.min_samples_leaf,
            "bootstrap": self.bootstrap,
            "seed": self.seed,
            "trees": [
                {
                    "feature": t.feature.tolist(),
                    "threshold": t.threshold.tolist(),
                    "left": t.left.tolist(),
                    "right": t.right.tolist(),
                    "value": t.value.tolist(),
                }
                for t in self.trees
            ],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ForestModel":
        model = cls(
            {
                "n_trees": obj["n_trees"],
                "min_samples_leaf": obj["min_samples_leaf"],
                "bootstrap": obj["bootstrap"],
            },
            seed=obj["seed"],
        )
        model.trees = [
            _Tree(t["feature"], t["threshold"], t["left"], t["right"], t["value"])
            for t in obj["trees"]
        ]
        return model

"""Seeded k-fold grid search over hyperparameter cross products."""
from __future__ import annotations

import itertools
import zlib
from dataclasses import dataclass

import numpy as np

from songmood.regressors.base import RegressorSpec, TrainedRegressor, fit


def derive_seed(*parts) -> int:
    """Deterministic child seed from a master seed plus context labels."""
    entropy = [
        zlib.crc32(p.encode()) if isinstance(p, str) else int(p) & 0xFFFFFFFF
        for p in parts
    ]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def kfold_indices(n: int, folds: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Seeded shuffle split into `folds` (train, validation) index pairs."""
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if n < folds:
        raise ValueError(f"need at least {folds} rows for {folds}-fold CV")
    perm = np.random.default_rng(seed).permutation(n)
    chunks = np.array_split(perm, folds)
    out = []
    for k in range(folds):
        val = chunks[k]
        train = np.concatenate([chunks[j] for j in range(folds) if j != k])
        out.append((train, val))
    return out


def _fold_r2(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    tss = float(((y_true - y_true.mean()) ** 2).sum())
    if tss <= 0:
        return float("-inf")
    rss = float(((y_true - y_pred) ** 2).sum())
    return 1.0 - rss / tss


@dataclass(frozen=True)
class GridSearchResult:
    best_spec: RegressorSpec
    best_model: TrainedRegressor
    scores: tuple[dict, ...]  # one row per config: hyperparameters + CV scores

    def score_table(self) -> list[dict]:
        return [dict(row) for row in self.scores]


def grid_search(family: str, grid: dict[str, list], X: np.ndarray, y: np.ndarray,
                folds: int = 5, seed: int = 0,
                feature_names: tuple[str, ...] | None = None) -> GridSearchResult:
    """Pick the grid point with best mean out-of-fold R-squared.

    Ties go to the earlier point in cross-product enumeration order. The
    winner is refit on the full training data with the master seed.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    names = list(grid.keys())
    combos = list(itertools.product(*(grid[k] for k in names))) if names else [()]
    if not combos:
        raise ValueError("empty hyperparameter grid")

    fold_defs = kfold_indices(X.shape[0], folds, derive_seed(seed, "kfold"))

    rows: list[dict] = []
    best_idx = -1
    best_score = -np.inf
    for ci, combo in enumerate(combos):
        hp = dict(zip(names, combo))
        fold_scores = []
        for fi, (tr, va) in enumerate(fold_defs):
            spec = RegressorSpec(family, hp, seed=derive_seed(seed, ci, fi))
            model = fit(spec, X[tr], y[tr])
            fold_scores.append(_fold_r2(y[va], model.predict(X[va])))
        mean_score = float(np.mean(fold_scores))
        rows.append({
            "hyperparameters": hp,
            "mean_cv_r2": mean_score,
            "fold_r2": [float(s) for s in fold_scores],
        })
        if mean_score > best_score:
            best_score = mean_score
            best_idx = ci

    best_hp = dict(zip(names, combos[best_idx]))
    best_spec = RegressorSpec(family, best_hp, seed=seed)
    best_model = fit(best_spec, X, y, feature_names=feature_names)
    return GridSearchResult(
        best_spec=best_spec, best_model=best_model, scores=tuple(rows),
    )

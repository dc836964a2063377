"""Feature-level fusion and the three selection procedures.

Selection works on FeatureMatrix objects: named, modality-tagged columns
over a fixed row order of song ids. The significance filter runs one MLR
per target and keeps base features significant for either target; the
13 key indicator columns are treated as one group. The combination search
scores every nonempty subset of the three lyric feature families on the
validation split; RFE strips the weakest standardized MLR coefficient one
feature at a time.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from songmood.numerics import ols_fit, standardize_fit
from songmood.regressors import FAMILIES, RegressorSpec, fit as fit_regressor
from songmood.regressors.grid import derive_seed

log = logging.getLogger(__name__)

MODALITY_TAGS = ("audio", "sentiment", "tfidf", "xanew")

# Appendix-style combination labels, in their canonical row order.
LYRIC_COMBINATIONS = (
    ("tfidf",),
    ("anew",),
    ("vader",),
    ("tfidf", "anew"),
    ("tfidf", "vader"),
    ("anew", "vader"),
    ("tfidf", "anew", "vader"),
)


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray
    column_names: tuple[str, ...]
    modality_tags: tuple[str, ...]
    row_ids: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 2:
            raise ValueError("values must be 2-D")
        n, d = values.shape
        if len(self.column_names) != d or len(self.modality_tags) != d:
            raise ValueError("column metadata length mismatch")
        if len(self.row_ids) != n:
            raise ValueError("row_ids length mismatch")
        if len(set(self.column_names)) != d:
            raise ValueError("duplicate column names")
        if not np.isfinite(values).all():
            raise ValueError("non-finite feature values")
        for tag in self.modality_tags:
            if tag not in MODALITY_TAGS:
                raise ValueError(f"unknown modality tag {tag!r}")

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.values.shape[0]

    def column_index(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise KeyError(f"no column {name!r}") from None

    def select_columns(self, names: list[str] | tuple[str, ...]) -> "FeatureMatrix":
        idx = [self.column_index(n) for n in names]
        return FeatureMatrix(
            values=self.values[:, idx],
            column_names=tuple(names),
            modality_tags=tuple(self.modality_tags[i] for i in idx),
            row_ids=self.row_ids,
        )

    def take_rows(self, idx: np.ndarray) -> np.ndarray:
        return self.values[idx]

    def to_json_dict(self) -> dict:
        return {
            "format": "songmood-feature-matrix",
            "version": 1,
            "column_names": list(self.column_names),
            "modality_tags": list(self.modality_tags),
            "row_ids": list(self.row_ids),
            "values": self.values.tolist(),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "FeatureMatrix":
        if obj.get("format") != "songmood-feature-matrix":
            raise ValueError("not a feature-matrix artifact")
        return cls(
            values=np.asarray(obj["values"], dtype=float),
            column_names=tuple(obj["column_names"]),
            modality_tags=tuple(obj["modality_tags"]),
            row_ids=tuple(obj["row_ids"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), sort_keys=True))

    @classmethod
    def load(cls, path: str | Path) -> "FeatureMatrix":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class FeatureSubset:
    columns: tuple[str, ...]
    procedure: str
    details: dict = field(default_factory=dict)


def fuse(parts: list[FeatureMatrix]) -> FeatureMatrix:
    """Column-wise concatenation over an identical row order."""
    if not parts:
        raise ValueError("nothing to fuse")
    first = parts[0]
    for p in parts[1:]:
        if p.row_ids != first.row_ids:
            raise ValueError("row ids differ between fused parts")
    return FeatureMatrix(
        values=np.hstack([p.values for p in parts]),
        column_names=tuple(n for p in parts for n in p.column_names),
        modality_tags=tuple(t for p in parts for t in p.modality_tags),
        row_ids=first.row_ids,
    )


def _audio_groups(columns: tuple[str, ...]) -> dict[str, list[int]]:
    """Base-feature name -> column indices; key indicators form one group."""
    groups: dict[str, list[int]] = {}
    for j, name in enumerate(columns):
        base = "key" if name.startswith("key_") else name
        groups.setdefault(base, []).append(j)
    return groups


def select_significant_audio(audio: FeatureMatrix,
                             targets: dict[str, np.ndarray],
                             alpha: float = 0.05) -> FeatureSubset:
    """Keep base audio features whose MLR coefficient is significant.

    One MLR per target over all audio columns; a base feature survives if
    its p-value is below alpha for either target. The key group survives if
    any indicator does. Coefficients flagged unreliable by the rank check
    (the deliberately redundant key block is collinear with the intercept)
    cannot establish significance.
    """
    n, d = audio.values.shape
    if n <= d + 1:
        raise ValueError(
            f"need more than d+1={d + 1} rows for coefficient inference, got {n}"
        )
    groups = _audio_groups(audio.column_names)
    p_table: dict[str, dict[str, float]] = {b: {} for b in groups}
    significant: set[str] = set()
    for target_name, y in targets.items():
        summary = ols_fit(audio.values, y)
        if not summary.has_inference:
            raise ValueError("coefficient inference unavailable")
        for base, cols in groups.items():
            best_p = np.inf
            for j in cols:
                if not summary.reliable[j + 1]:  # +1 skips the intercept
                    continue
                p = summary.p_values[j + 1]
                if np.isfinite(p):
                    best_p = min(best_p, p)
            p_table[base][target_name] = float(best_p)
            if best_p < alpha:
                significant.add(base)

    kept_columns = [
        name for j, name in enumerate(audio.column_names)
        if ("key" if name.startswith("key_") else name) in significant
    ]
    return FeatureSubset(
        columns=tuple(kept_columns),
        procedure="significant-audio-mlr",
        details={"alpha": alpha, "p_values": p_table,
                 "base_features": sorted(significant)},
    )


@dataclass(frozen=True)
class CombinationSearchResult:
    rows: tuple[dict, ...]      # one per combination, Appendix-style order
    winner: str                 # label of the recommended combination
    winner_parts: tuple[str, ...]

    def table(self) -> list[dict]:
        return [dict(r) for r in self.rows]


def search_lyric_combination(parts: dict[str, FeatureMatrix],
                             targets: dict[str, np.ndarray],
                             train_idx: np.ndarray, val_idx: np.ndarray,
                             families: tuple[str, ...] = FAMILIES,
                             seed: int = 0) -> CombinationSearchResult:
    """Score the 7 lyric-feature subsets on the validation split.

    Models run with default hyperparameters. The recommendation minimizes
    the mean rank across every family x target cell; ties prefer fewer
    feature columns, then earlier enumeration order.
    """
    missing = {"tfidf", "anew", "vader"} - set(parts)
    if missing:
        raise ValueError(f"missing lyric feature parts: {sorted(missing)}")
    if len(train_idx) == 0 or len(val_idx) == 0:
        raise ValueError("train and validation splits must be nonempty")

    from songmood.evaluation import r2  # late import avoids a module cycle

    rows: list[dict] = []
    for combo in LYRIC_COMBINATIONS:
        fused = fuse([parts[name] for name in combo])
        label = "+".join(combo)
        scores: dict[str, float] = {}
        for family in families:
            for target_name, y in targets.items():
                spec = RegressorSpec(
                    family, {}, seed=derive_seed(seed, label, family, target_name)
                )
                model = fit_regressor(spec, fused.values[train_idx], y[train_idx])
                pred = model.predict(fused.values[val_idx])
                scores[f"{family}_{target_name}"] = r2(y[val_idx], pred)
        rows.append({
            "combination": label,
            "parts": combo,
            "n_columns": fused.d,
            "scores": scores,
        })

    score_keys = list(rows[0]["scores"].keys())
    rank_sums = np.zeros(len(rows))
    for key in score_keys:
        column = np.array([r["scores"][key] for r in rows])
        order = np.argsort(-column, kind="stable")
        ranks = np.empty(len(rows))
        ranks[order] = np.arange(1, len(rows) + 1)
        rank_sums += ranks
    mean_ranks = rank_sums / len(score_keys)
    for r, mr in zip(rows, mean_ranks):
        r["mean_rank"] = float(mr)

    winner_i = min(
        range(len(rows)),
        key=lambda i: (mean_ranks[i], rows[i]["n_columns"], i),
    )
    return CombinationSearchResult(
        rows=tuple(rows),
        winner=rows[winner_i]["combination"],
        winner_parts=tuple(rows[winner_i]["parts"]),
    )


def rfe(X: FeatureMatrix, y: np.ndarray, n_keep: int) -> tuple[FeatureSubset, list[str]]:
    """Recursive feature elimination on standardized MLR coefficients.

    One feature (smallest absolute coefficient) is dropped per round until
    n_keep remain. Returns the surviving subset and the elimination order,
    first-eliminated first.
    """
    d = X.d
    if not (1 <= n_keep <= d):
        raise ValueError(f"n_keep must be in [1, {d}]")
    remaining = list(range(d))
    eliminated: list[str] = []
    scaler = standardize_fit(X.values)
    values = scaler.apply(X.values)
    while len(remaining) > n_keep:
        summary = ols_fit(values[:, remaining], y)
        if summary.rank_deficient:
            log.warning("rank-deficient fit during elimination round")
        weights = np.abs(summary.coefficients[1:])
        drop = int(np.argmin(weights))  # first minimum: lowest column index
        eliminated.append(X.column_names[remaining[drop]])
        remaining.pop(drop)
    subset = FeatureSubset(
        columns=tuple(X.column_names[j] for j in remaining),
        procedure="rfe-mlr",
        details={"n_keep": n_keep, "eliminated": list(eliminated)},
    )
    return subset, eliminated

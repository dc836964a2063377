"""Uniform fit/predict contract over MLR, random forest, SVR and MLP.

A TrainedRegressor is immutable after fit, predicts deterministically, and
round-trips through versioned JSON with bit-identical predictions.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

FAMILIES = ("mlr", "rfr", "svr", "mlp")

DEFAULT_HYPERPARAMETERS: dict[str, dict[str, Any]] = {
    "mlr": {},
    "rfr": {"n_trees": 100, "min_samples_leaf": 1, "bootstrap": True},
    "svr": {"c": 1.0, "epsilon": 0.1, "gamma": "scale", "tol": 1e-3,
            "max_iter": 200_000},
    "mlp": {"hidden_units": 100, "l2": 1e-4, "learning_rate": 1e-3,
            "batch_size": 32, "max_epochs": 200, "patience": 10,
            "validation_fraction": 0.1},
}

# The source study reports no grids; these are small documented defaults.
DEFAULT_GRIDS: dict[str, dict[str, list]] = {
    "mlr": {},
    "rfr": {"n_trees": [100, 300], "min_samples_leaf": [1, 5]},
    "svr": {"c": [0.1, 1.0, 10.0], "epsilon": [0.05, 0.1]},
    "mlp": {"hidden_units": [50, 100], "l2": [1e-4, 1e-3],
            "learning_rate": [1e-3, 1e-2]},
}


@dataclass(frozen=True)
class RegressorSpec:
    family: str
    hyperparameters: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        known = DEFAULT_HYPERPARAMETERS[self.family]
        for name in self.hyperparameters:
            if name not in known:
                raise ValueError(
                    f"unknown hyperparameter {name!r} for family {self.family!r}"
                )

    def resolved(self) -> dict[str, Any]:
        merged = dict(DEFAULT_HYPERPARAMETERS[self.family])
        merged.update(self.hyperparameters)
        return merged


@dataclass(frozen=True)
class TrainedRegressor:
    family: str
    model: Any
    spec: RegressorSpec
    feature_names: tuple[str, ...] | None
    train_r2: float

    @property
    def ols_summary(self):
        return getattr(self.model, "summary", None)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if self.feature_names is not None and X.shape[1] != len(self.feature_names):
            raise ValueError(
                f"expected {len(self.feature_names)} columns, got {X.shape[1]}"
            )
        out = self.model.predict(X)
        if not np.isfinite(out).all():
            raise ValueError("non-finite predictions")
        return out

    def to_json_dict(self) -> dict:
        return {
            "format": "songmood-regressor",
            "version": 1,
            "family": self.family,
            "hyperparameters": self.spec.hyperparameters,
            "seed": self.spec.seed,
            "feature_names": list(self.feature_names) if self.feature_names else None,
            "train_r2": self.train_r2,
            "model": self.model.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "TrainedRegressor":
        if obj.get("format") != "songmood-regressor":
            raise ValueError("not a regressor artifact")
        family = obj["family"]
        model = _model_class(family).from_json_dict(obj["model"])
        names = obj["feature_names"]
        return cls(
            family=family,
            model=model,
            spec=RegressorSpec(family, obj["hyperparameters"], obj["seed"]),
            feature_names=tuple(names) if names is not None else None,
            train_r2=obj["train_r2"],
        )


def _model_class(family: str):
    # local imports keep family modules independent of each other
    if family == "mlr":
        from songmood.regressors.linear import LinearModel
        return LinearModel
    if family == "rfr":
        from songmood.regressors.forest import ForestModel
        return ForestModel
    if family == "svr":
        from songmood.regressors.svr import SvrModel
        return SvrModel
    if family == "mlp":
        from songmood.regressors.mlp import MlpModel
        return MlpModel
    raise ValueError(f"unknown family {family!r}")


def fit(spec: RegressorSpec, X: np.ndarray, y: np.ndarray,
        feature_names: tuple[str, ...] | None = None) -> TrainedRegressor:
    """Fit one regressor; SVR and MLP standardize features internally."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != y.shape[0]:
        raise ValueError("X and y row counts differ")
    if X.shape[0] < 2:
        raise ValueError("need at least 2 training rows")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("non-finite training data")
    if feature_names is not None and len(feature_names) != X.shape[1]:
        raise ValueError("feature_names length mismatch")

    model = _model_class(spec.family)(spec.resolved(), seed=spec.seed)
    model.fit(X, y)

    pred = model.predict(X)
    tss = float(((y - y.mean()) ** 2).sum())
    rss = float(((y - pred) ** 2).sum())
    train_r2 = 1.0 - rss / tss if tss > 0 else (1.0 if rss <= 1e-24 else 0.0)
    return TrainedRegressor(
        family=spec.family, model=model, spec=spec,
        feature_names=tuple(feature_names) if feature_names else None,
        train_r2=train_r2,
    )


def predict(model: TrainedRegressor, X: np.ndarray) -> np.ndarray:
    return model.predict(X)


def save_regressor(model: TrainedRegressor, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_json_dict(), sort_keys=True))


def load_regressor(path: str | Path) -> TrainedRegressor:
    return TrainedRegressor.from_json_dict(json.loads(Path(path).read_text()))

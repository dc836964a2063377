"""Multiple linear regression family: a thin wrapper over the OLS kernel."""
from __future__ import annotations

import numpy as np

from songmood.numerics import OlsSummary, ols_fit, ols_predict


class LinearModel:
    """Pseudo-inverse OLS on raw (unscaled) features, with inference kept."""

    def __init__(self, hyperparameters: dict | None = None, seed: int = 0):
        self.seed = seed
        self.summary: OlsSummary | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LinearModel":
        self.summary = ols_fit(X, y)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        if self.summary is None:
            raise RuntimeError("model not fitted")
        return ols_predict(self.summary.coefficients, X)

    def to_json_dict(self) -> dict:
        return {"coefficients": self.summary.coefficients.tolist()}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "LinearModel":
        model = cls({})
        model.summary = OlsSummary(
            coefficients=np.asarray(obj["coefficients"], dtype=float),
            r_squared_train=float("nan"),
        )
        return model

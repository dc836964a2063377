"""Shared numerical kernels: standardization, PCA via SVD, OLS with t-tests.

Everything here operates on plain numpy arrays and is pure: fit functions
return immutable model objects, apply/transform functions never mutate their
inputs. Variance denominators are N-1 except where noted (the Standardizer
scales by the population SD, matching the usual feature-scaling convention).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

_RANK_TOL = 1e-10


# ---------------------------------------------------------------------------
# Special functions for p-values.
#
# The two-sided t-test p-value is I_x(v/2, 1/2) with x = v/(v+t^2), where
# I_x is the regularized incomplete beta function, evaluated here with the
# Lentz continued fraction (accurate to ~1e-14 in the interior).
# ---------------------------------------------------------------------------

def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    max_iter = 300
    eps = 1e-15
    fpmin = 1e-300

    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    if x < 0.0 or x > 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # Use the symmetry relation so the continued fraction converges fast.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_sf_two_sided(t: float, dof: float) -> float:
    """P(|T| >= t) for T ~ Student-t with `dof` degrees of freedom."""
    if dof <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0
    x = dof / (dof + t * t)
    return regularized_incomplete_beta(dof / 2.0, 0.5, x)


# ---------------------------------------------------------------------------
# Standardization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Standardizer:
    """Column-wise (x - mean) / sd with zero-variance columns passed through.

    Scaling uses the population SD of the fitted data; columns whose SD is
    (numerically) zero are flagged in `constant_mask` and left untouched by
    `apply`, including their mean.
    """

    mean: np.ndarray
    sd: np.ndarray
    constant_mask: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[1] != self.mean.shape[0]:
            raise ValueError(
                f"expected {self.mean.shape[0]} columns, got {X.shape[1]}"
            )
        out = (X - self.mean) / self.sd
        if self.constant_mask.any():
            out[:, self.constant_mask] = X[:, self.constant_mask]
        return out

    def to_json_dict(self) -> dict:
        return {
            "format": "songmood-standardizer",
            "version": 1,
            "mean": self.mean.tolist(),
            "sd": self.sd.tolist(),
            "constant_mask": self.constant_mask.astype(int).tolist(),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Standardizer":
        if obj.get("format") != "songmood-standardizer":
            raise ValueError("not a standardizer artifact")
        return cls(
            mean=np.asarray(obj["mean"], dtype=float),
            sd=np.asarray(obj["sd"], dtype=float),
            constant_mask=np.asarray(obj["constant_mask"], dtype=bool),
        )


def standardize_fit(X: np.ndarray) -> Standardizer:
    """Fit a Standardizer on (training) data."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be 2-D")
    mean = X.mean(axis=0)
    sd = X.std(axis=0)
    constant = sd <= 1e-12 * np.maximum(1.0, np.abs(mean))
    sd_safe = np.where(constant, 1.0, sd)
    return Standardizer(mean=mean, sd=sd_safe, constant_mask=constant)


def standardize_apply(scaler: Standardizer, X: np.ndarray) -> np.ndarray:
    return scaler.apply(X)


# ---------------------------------------------------------------------------
# PCA via SVD
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PcaModel:
    """Mean + top-k orthonormal components + per-component variances."""

    mean: np.ndarray
    components: np.ndarray          # k x d, rows orthonormal
    explained_variance: np.ndarray  # length k, non-increasing

    @property
    def k(self) -> int:
        return self.components.shape[0]

    def to_json_dict(self) -> dict:
        return {
            "format": "songmood-pca",
            "version": 1,
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance": self.explained_variance.tolist(),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "PcaModel":
        if obj.get("format") != "songmood-pca":
            raise ValueError("not a PCA artifact")
        return cls(
            mean=np.asarray(obj["mean"], dtype=float),
            components=np.asarray(obj["components"], dtype=float),
            explained_variance=np.asarray(obj["explained_variance"], dtype=float),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), sort_keys=True))

    @classmethod
    def load(cls, path: str | Path) -> "PcaModel":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def fit_pca(X: np.ndarray, k: int) -> PcaModel:
    """Fit a k-component PCA by SVD of the mean-centered data.

    Components carry a deterministic sign: the largest-magnitude entry of
    each component is positive. Explained variances are singular values
    squared over N-1.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be 2-D")
    n, d = X.shape
    if n < 2:
        raise ValueError("need at least 2 rows")
    if not (1 <= k <= min(n - 1, d)):
        raise ValueError(f"k={k} out of range [1, {min(n - 1, d)}]")

    mean = X.mean(axis=0)
    Xc = X - mean
    _, s, vt = np.linalg.svd(Xc, full_matrices=False)
    if s[0] <= 1e-12:
        raise ValueError("zero variance: all rows are identical")

    components = vt[:k].copy()
    for row in components:
        j = int(np.argmax(np.abs(row)))
        if row[j] < 0:
            row *= -1.0
    explained = (s[:k] ** 2) / (n - 1)
    return PcaModel(mean=mean, components=components, explained_variance=explained)


def transform_pca(model: PcaModel, X: np.ndarray) -> np.ndarray:
    """Project rows of X onto the model's components: (X - mean) @ C^T."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.mean.shape[0]:
        raise ValueError(
            f"expected {model.mean.shape[0]} columns, got {X.shape[1]}"
        )
    return (X - model.mean) @ model.components.T


def inverse_transform_pca(model: PcaModel, Z: np.ndarray) -> np.ndarray:
    Z = np.asarray(Z, dtype=float)
    return Z @ model.components + model.mean


# ---------------------------------------------------------------------------
# OLS with coefficient inference
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OlsSummary:
    """Fit of y ~ [1, X] by pseudo-inverse, with optional t-test inference.

    `coefficients[0]` is the intercept. Inference arrays are None when the
    residual degrees of freedom are not positive. `reliable` marks
    coefficients whose standard errors are meaningful; columns involved in
    an exact collinearity (null space of the design) are flagged False.
    """

    coefficients: np.ndarray
    r_squared_train: float
    std_errors: np.ndarray | None = None
    t_stats: np.ndarray | None = None
    p_values: np.ndarray | None = None
    reliable: np.ndarray | None = None
    rank_deficient: bool = False
    dof: int = 0
    residuals: np.ndarray = field(default=None, repr=False)

    @property
    def has_inference(self) -> bool:
        return self.p_values is not None


def ols_fit(X: np.ndarray, y: np.ndarray) -> OlsSummary:
    """OLS on the intercept-augmented design matrix.

    Coefficients come from the Moore-Penrose pseudo-inverse, so exactly
    collinear designs are tolerated (minimum-norm solution). Standard errors
    are sqrt(sigma^2 * diag((A'A)^+)) with sigma^2 = RSS/(N-d-1); two-sided
    p-values use the Student-t survival function above.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, d = X.shape
    if y.shape != (n,):
        raise ValueError("y length must match X rows")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("non-finite values in design or target")
    if n < 2:
        raise ValueError("need at least 2 rows")

    A = np.hstack([np.ones((n, 1)), X])
    p = d + 1
    coef = np.linalg.pinv(A) @ y

    resid = y - A @ coef
    rss = float(resid @ resid)
    tss = float(((y - y.mean()) ** 2).sum())
    if tss > 0:
        r2 = 1.0 - rss / tss
    else:
        r2 = 1.0 if rss <= 1e-24 else 0.0

    sv = np.linalg.svd(A, compute_uv=False)
    rank = int((sv > sv[0] * _RANK_TOL * max(A.shape)).sum()) if sv[0] > 0 else 0
    rank_deficient = rank < p

    dof = n - p
    if dof <= 0:
        return OlsSummary(
            coefficients=coef, r_squared_train=r2,
            rank_deficient=rank_deficient, dof=dof, residuals=resid,
        )

    sigma2 = rss / dof
    gram_pinv = np.linalg.pinv(A.T @ A)
    var = sigma2 * np.diag(gram_pinv)
    se = np.sqrt(np.maximum(var, 0.0))

    reliable = np.ones(p, dtype=bool)
    if rank_deficient:
        # Columns with support in the design's null space have no
        # identifiable coefficient; their reported errors are not to be
        # trusted for significance decisions.
        _, s_full, vt_full = np.linalg.svd(A, full_matrices=True)
        null_rows = vt_full[rank:, :]
        involved = (np.abs(null_rows) > 1e-8).any(axis=0)
        reliable = ~involved

    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, coef / se, np.nan)
    pvals = np.array([
        student_t_sf_two_sided(tv, dof) if np.isfinite(tv) else np.nan
        for tv in t
    ])
    return OlsSummary(
        coefficients=coef, r_squared_train=r2, std_errors=se, t_stats=t,
        p_values=pvals, reliable=reliable, rank_deficient=rank_deficient,
        dof=dof, residuals=resid,
    )


def ols_predict(coefficients: np.ndarray, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[1] != coefficients.shape[0] - 1:
        raise ValueError(
            f"expected {coefficients.shape[0] - 1} columns, got {X.shape[1]}"
        )
    return coefficients[0] + X @ coefficients[1:]

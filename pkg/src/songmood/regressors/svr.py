"""Epsilon-insensitive support vector regression with an RBF kernel.

The dual is solved by sequential minimal optimization on the standard
2N-variable box-constrained form (alpha for each side of the tube), with
maximal-violating-pair working-set selection and the usual two-variable
analytic update. Features are standardized before fitting; gamma defaults
to 1 / (d * var(X)) on the scaled data.
"""
from __future__ import annotations

import warnings

import numpy as np

from songmood.numerics import Standardizer, standardize_fit

_QUAD_FLOOR = 1e-12


def _rbf_rows(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    """Kernel block k(a_i, b_j) = exp(-gamma ||a_i - b_j||^2)."""
    sq = (
        (A * A).sum(axis=1)[:, None]
        + (B * B).sum(axis=1)[None, :]
        - 2.0 * A @ B.T
    )
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def _kernel_matvec(A: np.ndarray, B: np.ndarray, gamma: float,
                   vec: np.ndarray, chunk: int = 512) -> np.ndarray:
    """K(A, B) @ vec without materializing the full kernel matrix."""
    out = np.empty(A.shape[0])
    for start in range(0, A.shape[0], chunk):
        block = slice(start, start + chunk)
        out[block] = _rbf_rows(A[block], B, gamma) @ vec
    return out


class _SmoSolver:
    """min 1/2 a'Qa + p'a  s.t.  y'a = 0,  0 <= a <= C.

    Q rows are produced on demand by `q_row` and cached; `y` entries are
    +/-1. Convergence is maximal KKT violation below `tol`.
    """

    def __init__(self, q_row, p, y, c, tol, max_iter, cache_bytes=200_000_000):
        self.q_row = q_row
        self.p = p
        self.y = y
        self.c = c
        self.tol = tol
        self.max_iter = max_iter
        self.n = len(p)
        self.alpha = np.zeros(self.n)
        self.grad = p.copy()
        self._cache: dict[int, np.ndarray] = {}
        self._cache_rows = max(64, cache_bytes // (8 * self.n))
        self.converged = False

    def _row(self, i: int) -> np.ndarray:
        row = self._cache.get(i)
        if row is None:
            row = self.q_row(i)
            if len(self._cache) >= self._cache_rows:
                self._cache.pop(next(iter(self._cache)))
            self._cache[i] = row
        return row

    def _select_pair(self):
        minus_yg = -self.y * self.grad
        up = ((self.y > 0) & (self.alpha < self.c)) | ((self.y < 0) & (self.alpha > 0))
        low = ((self.y > 0) & (self.alpha > 0)) | ((self.y < 0) & (self.alpha < self.c))
        if not up.any() or not low.any():
            return -1, -1, 0.0
        up_vals = np.where(up, minus_yg, -np.inf)
        low_vals = np.where(low, minus_yg, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(low_vals))
        gap = up_vals[i] - low_vals[j]
        return i, j, gap

    def solve(self):
        for _ in range(self.max_iter):
            i, j, gap = self._select_pair()
            if i < 0 or gap < self.tol:
                self.converged = True
                break
            qi = self._row(i)
            qj = self._row(j)
            ai_old, aj_old = self.alpha[i], self.alpha[j]
            c = self.c

            if self.y[i] != self.y[j]:
                quad = max(qi[i] + qj[j] + 2.0 * qi[j], _QUAD_FLOOR)
                delta = (-self.grad[i] - self.grad[j]) / quad
                diff = ai_old - aj_old
                ai, aj = ai_old + delta, aj_old + delta
                if diff > 0 and aj < 0:
                    aj, ai = 0.0, diff
                elif diff <= 0 and ai < 0:
                    ai, aj = 0.0, -diff
                if diff > 0:
                    if ai > c:
                        ai, aj = c, c - diff
                else:
                    if aj > c:
                        aj, ai = c, c + diff
            else:
                quad = max(qi[i] + qj[j] - 2.0 * qi[j], _QUAD_FLOOR)
                delta = (self.grad[i] - self.grad[j]) / quad
                total = ai_old + aj_old
                ai, aj = ai_old - delta, aj_old + delta
                if total > c:
                    if ai > c:
                        ai, aj = c, total - c
                else:
                    if aj < 0:
                        aj, ai = 0.0, total
                if total > c:
                    if aj > c:
                        aj, ai = c, total - c
                else:
                    if ai < 0:
                        ai, aj = 0.0, total

            self.alpha[i], self.alpha[j] = ai, aj
            self.grad += qi * (ai - ai_old) + qj * (aj - aj_old)
        return self


class SvrModel:
    def __init__(self, hyperparameters: dict, seed: int = 0):
        self.c = float(hyperparameters.get("c", 1.0))
        self.epsilon = float(hyperparameters.get("epsilon", 0.1))
        self.gamma_setting = hyperparameters.get("gamma", "scale")
        self.tol = float(hyperparameters.get("tol", 1e-3))
        self.max_iter = int(hyperparameters.get("max_iter", 200_000))
        self.seed = seed
        self.scaler: Standardizer | None = None
        self.gamma: float | None = None
        self.support_vectors: np.ndarray | None = None
        self.beta: np.ndarray | None = None        # alpha - alpha*
        self.intercept: float | None = None
        self._train_beta_full: np.ndarray | None = None  # diagnostics, in-memory only
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")

    def _resolve_gamma(self, Xs: np.ndarray) -> float:
        if self.gamma_setting == "scale":
            var = float(Xs.var())
            return 1.0 / (Xs.shape[1] * var) if var > 0 else 1.0 / Xs.shape[1]
        return float(self.gamma_setting)

    def fit(self, X: np.ndarray, y: np.ndarray) -> "SvrModel":
        n = X.shape[0]
        self.scaler = standardize_fit(X)
        Xs = self.scaler.apply(X)
        self.gamma = self._resolve_gamma(Xs)

        p = np.concatenate([self.epsilon - y, self.epsilon + y])
        sign = np.concatenate([np.ones(n), -np.ones(n)])

        def q_row(t: int) -> np.ndarray:
            base = t if t < n else t - n
            k = _rbf_rows(Xs[base:base + 1], Xs, self.gamma)[0]
            if t >= n:
                k = -k
            return np.concatenate([k, -k])

        solver = _SmoSolver(q_row, p, sign, self.c, self.tol, self.max_iter)
        solver.solve()
        if not solver.converged:
            warnings.warn(
                f"SVR did not reach tolerance {self.tol} in {self.max_iter} "
                "iterations; keeping best-so-far solution",
                RuntimeWarning,
            )

        beta = solver.alpha[:n] - solver.alpha[n:]
        f_nob = _kernel_matvec(Xs, Xs, self.gamma, beta)
        self.intercept = self._kkt_intercept(beta, f_nob, y)

        keep = np.abs(beta) > 1e-12
        self.support_vectors = Xs[keep]
        self.beta = beta[keep]
        self._train_beta_full = beta  # for KKT diagnostics on the training fit
        return self

    def _kkt_intercept(self, beta: np.ndarray, f_nob: np.ndarray,
                       y: np.ndarray) -> float:
        """Intercept from KKT bounds on b; midpoint when no free vectors."""
        c, eps = self.c, self.epsilon
        free_tol = 1e-8 * max(c, 1.0)
        lower, upper = [], []
        for b_i, f_i, y_i in zip(beta, f_nob, y):
            if b_i > free_tol and b_i < c - free_tol:
                lower.append(y_i - eps - f_i)
                upper.append(y_i - eps - f_i)
            elif b_i < -free_tol and b_i > -c + free_tol:
                lower.append(y_i + eps - f_i)
                upper.append(y_i + eps - f_i)
            elif abs(b_i) <= free_tol:
                lower.append(y_i - eps - f_i)
                upper.append(y_i + eps - f_i)
            elif b_i >= c - free_tol:
                upper.append(y_i - eps - f_i)
            else:
                lower.append(y_i + eps - f_i)
        lo = max(lower) if lower else -np.inf
        hi = min(upper) if upper else np.inf
        if np.isfinite(lo) and np.isfinite(hi):
            return 0.5 * (lo + hi)
        return float(lo if np.isfinite(lo) else (hi if np.isfinite(hi) else 0.0))

    def predict(self, X: np.ndarray) -> np.ndarray:
        if self.beta is None:
            raise RuntimeError("model not fitted")
        Xs = self.scaler.apply(X)
        if len(self.beta) == 0:
            return np.full(X.shape[0], self.intercept)
        return _rbf_rows(Xs, self.support_vectors, self.gamma) @ self.beta + self.intercept

    def dual_objective(self, X: np.ndarray, y: np.ndarray) -> float:
        """0.5 b'Kb - y'b + eps * sum|b| at the fitted train solution."""
        Xs = self.scaler.apply(X)
        beta = self._train_beta_full
        k_beta = _kernel_matvec(Xs, Xs, self.gamma, beta)
        return float(
            0.5 * beta @ k_beta - y @ beta + self.epsilon * np.abs(beta).sum()
        )

    def kkt_violation(self, X: np.ndarray, y: np.ndarray) -> float:
        """Max violation of the epsilon-tube KKT conditions on training data."""
        pred = self.predict(X)
        err = pred - y
        beta = self._train_beta_full
        c, eps = self.c, self.epsilon
        bound_tol = 1e-8 * max(c, 1.0)
        worst = 0.0
        for b_i, e_i in zip(beta, err):
            if abs(b_i) <= bound_tol:
                v = abs(e_i) - eps
            elif b_i >= c - bound_tol:
                v = e_i + eps
            elif b_i > 0:
                v = abs(e_i + eps)
            elif b_i <= -c + bound_tol:
                v = -(e_i - eps)
            else:
                v = abs(e_i - eps)
            worst = max(worst, v)
        return worst

    def to_json_dict(self) -> dict:
        return {
            "c": self.c,
            "epsilon": self.epsilon,
            "gamma": self.gamma,
            "intercept": self.intercept,
            "beta": self.beta.tolist(),
            "support_vectors": self.support_vectors.tolist(),
            "scaler": self.scaler.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "SvrModel":
        model = cls({"c": obj["c"], "epsilon": obj["epsilon"], "gamma": obj["gamma"]})
        model.gamma = float(obj["gamma"])
        model.intercept = float(obj["intercept"])
        model.beta = np.asarray(obj["beta"], dtype=float)
        model.support_vectors = np.asarray(obj["support_vectors"], dtype=float)
        model.scaler = Standardizer.from_json_dict(obj["scaler"])
        return model

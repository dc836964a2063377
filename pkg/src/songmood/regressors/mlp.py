"""One-hidden-layer ReLU perceptron for regression.

Loss is half mean squared error plus an L2 penalty on the weight matrices
(biases unpenalized). Mini-batch training uses Adam; full-batch mode
(batch_size == 0) switches to gradient descent with a bold-driver step so
the recorded training loss never increases. Early stopping watches a
held-out validation fraction for `patience` non-improving epochs and keeps
the best weights seen.
"""
from __future__ import annotations

import numpy as np

from songmood.numerics import Standardizer, standardize_fit

_ADAM_B1 = 0.9
_ADAM_B2 = 0.999
_ADAM_EPS = 1e-8


def _unpack(params: np.ndarray, d: int, h: int):
    o = 0
    w1 = params[o:o + d * h].reshape(d, h); o += d * h
    b1 = params[o:o + h]; o += h
    w2 = params[o:o + h].reshape(h, 1); o += h
    b2 = params[o:o + 1]
    return w1, b1, w2, b2


def loss_and_gradient(params: np.ndarray, X: np.ndarray, y: np.ndarray,
                      d: int, h: int, l2: float):
    """Penalized half-MSE and its exact gradient w.r.t. the flat parameters."""
    n = X.shape[0]
    w1, b1, w2, b2 = _unpack(params, d, h)
    z = X @ w1 + b1
    a = np.maximum(z, 0.0)
    out = (a @ w2).ravel() + b2[0]

    err = out - y
    loss = 0.5 * float(err @ err) / n \
        + 0.5 * l2 / n * (float((w1 * w1).sum()) + float((w2 * w2).sum()))

    d_out = err[:, None] / n
    g_w2 = a.T @ d_out + (l2 / n) * w2
    g_b2 = d_out.sum(axis=0)
    d_a = d_out @ w2.T
    d_a[z <= 0] = 0.0
    g_w1 = X.T @ d_a + (l2 / n) * w1
    g_b1 = d_a.sum(axis=0)
    grad = np.concatenate([g_w1.ravel(), g_b1, g_w2.ravel(), g_b2])
    return loss, grad


class MlpModel:
    def __init__(self, hyperparameters: dict, seed: int = 0):
        self.hidden_units = int(hyperparameters.get("hidden_units", 100))
        self.l2 = float(hyperparameters.get("l2", 1e-4))
        self.learning_rate = float(hyperparameters.get("learning_rate", 1e-3))
        self.batch_size = int(hyperparameters.get("batch_size", 32))
        self.max_epochs = int(hyperparameters.get("max_epochs", 200))
        self.patience = int(hyperparameters.get("patience", 10))
        self.validation_fraction = float(
            hyperparameters.get("validation_fraction", 0.1)
        )
        self.seed = seed
        self.params: np.ndarray | None = None
        self.scaler: Standardizer | None = None
        self.n_features: int | None = None
        self.loss_curve_: list[float] = []
        if self.hidden_units < 1:
            raise ValueError("hidden_units must be >= 1")

    def init_params(self, d: int, rng: np.random.Generator) -> np.ndarray:
        h = self.hidden_units
        lim1 = np.sqrt(6.0 / (d + h))
        lim2 = np.sqrt(6.0 / (h + 1))
        return np.concatenate([
            rng.uniform(-lim1, lim1, d * h),
            np.zeros(h),
            rng.uniform(-lim2, lim2, h),
            np.zeros(1),
        ])

    def fit(self, X: np.ndarray, y: np.ndarray) -> "MlpModel":
        self.scaler = standardize_fit(X)
        Xs = self.scaler.apply(X)
        n, d = Xs.shape
        self.n_features = d
        h = self.hidden_units
        rng = np.random.default_rng(self.seed)
        params = self.init_params(d, rng)

        full_batch = self.batch_size == 0 or self.batch_size >= n
        use_val = (
            not full_batch
            and self.validation_fraction > 0
            and int(n * self.validation_fraction) >= 1
            and n >= 10
        )
        if use_val:
            perm = rng.permutation(n)
            n_val = int(n * self.validation_fraction)
            val_idx, fit_idx = perm[:n_val], perm[n_val:]
            X_fit, y_fit = Xs[fit_idx], y[fit_idx]
            X_val, y_val = Xs[val_idx], y[val_idx]
        else:
            X_fit, y_fit = Xs, y
            X_val = y_val = None

        if full_batch:
            self._fit_bold_driver(params, X_fit, y_fit, d, h)
        else:
            self._fit_adam(params, X_fit, y_fit, X_val, y_val, d, h, rng)
        return self

    def _fit_bold_driver(self, params, X, y, d, h):
        """Plain gradient descent; steps that raise the loss are rejected
        and retried with half the rate, so the loss curve is non-increasing."""
        lr = self.learning_rate
        loss, grad = loss_and_gradient(params, X, y, d, h, self.l2)
        self.loss_curve_ = [loss]
        for _ in range(self.max_epochs):
            accepted = False
            for _ in range(30):
                candidate = params - lr * grad
                new_loss, new_grad = loss_and_gradient(
                    candidate, X, y, d, h, self.l2
                )
                if new_loss <= loss:
                    params, loss, grad = candidate, new_loss, new_grad
                    lr *= 1.05
                    accepted = True
                    break
                lr *= 0.5
            self.loss_curve_.append(loss)
            if not accepted:
                break
        self.params = params

    def _fit_adam(self, params, X, y, X_val, y_val, d, h, rng):
        n = X.shape[0]
        m = np.zeros_like(params)
        v = np.zeros_like(params)
        t = 0
        best_params = params.copy()
        best_val = np.inf
        stall = 0
        self.loss_curve_ = []

        for _ in range(self.max_epochs):
            order = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                batch = order[start:start + self.batch_size]
                _, grad = loss_and_gradient(
                    params, X[batch], y[batch], d, h, self.l2
                )
                t += 1
                m = _ADAM_B1 * m + (1 - _ADAM_B1) * grad
                v = _ADAM_B2 * v + (1 - _ADAM_B2) * grad * grad
                m_hat = m / (1 - _ADAM_B1 ** t)
                v_hat = v / (1 - _ADAM_B2 ** t)
                params = params - self.learning_rate * m_hat / (
                    np.sqrt(v_hat) + _ADAM_EPS
                )
            epoch_loss, _ = loss_and_gradient(params, X, y, d, h, self.l2)
            self.loss_curve_.append(epoch_loss)

            if X_val is not None:
                val_loss, _ = loss_and_gradient(
                    params, X_val, y_val, d, h, 0.0
                )
                if val_loss < best_val - 1e-9:
                    best_val = val_loss
                    best_params = params.copy()
                    stall = 0
                else:
                    stall += 1
                    if stall >= self.patience:
                        break
        self.params = best_params if X_val is not None else params

    def predict(self, X: np.ndarray) -> np.ndarray:
        if self.params is None:
            raise RuntimeError("model not fitted")
        Xs = self.scaler.apply(X)
        w1, b1, w2, b2 = _unpack(self.params, self.n_features, self.hidden_units)
        a = np.maximum(Xs @ w1 + b1, 0.0)
        return (a @ w2).ravel() + b2[0]

    def to_json_dict(self) -> dict:
        return {
            "hidden_units": self.hidden_units,
            "n_features": self.n_features,
            "params": self.params.tolist(),
            "scaler": self.scaler.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "MlpModel":
        model = cls({"hidden_units": obj["hidden_units"]})
        model.n_features = int(obj["n_features"])
        model.params = np.asarray(obj["params"], dtype=float)
        model.scaler = Standardizer.from_json_dict(obj["scaler"])
        return model

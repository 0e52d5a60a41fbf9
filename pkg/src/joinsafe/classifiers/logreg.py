"""L2-regularized logistic regression by full-batch gradient descent.

A deliberately plain linear baseline over one-hot rows.  The loss is the
mean log-loss plus ``l2/2 * ||w||^2`` (the intercept is not penalized);
:func:`logistic_gradient` is exposed separately so it can be checked against
finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateModelError


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss(x: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, l2: float) -> float:
    z = x @ w + b
    # log(1 + exp(-t)) with t = z for y=1, -z for y=0, computed stably
    t = np.where(y == 1, z, -z)
    loss = np.logaddexp(0.0, -t).mean()
    return float(loss + 0.5 * l2 * (w @ w))


def logistic_gradient(x: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, l2: float):
    p = _sigmoid(x @ w + b)
    resid = p - y
    grad_w = x.T @ resid / len(y) + l2 * w
    grad_b = float(resid.mean())
    return grad_w, grad_b


@dataclass(eq=False)
class LogRegModel:
    weights: np.ndarray
    intercept: float
    l2: float
    final_grad_norm: float

    def decision_function(self, rows: np.ndarray) -> np.ndarray:
        return np.atleast_2d(rows) @ self.weights + self.intercept

    def predict(self, rows: np.ndarray) -> np.ndarray:
        return (self.decision_function(rows) >= 0.0).astype(np.int8)


def train_logreg(x: np.ndarray, y: np.ndarray, l2: float = 0.01,
                 learning_rate: float = 0.5, epochs: int = 400) -> LogRegModel:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if l2 < 0:
        raise ValueError("l2 strength cannot be negative")
    if len(np.unique(y)) < 2:
        raise DegenerateModelError("both classes are required to train logistic regression")
    w = np.zeros(x.shape[1])
    b = 0.0
    for _ in range(epochs):
        grad_w, grad_b = logistic_gradient(x, y, w, b, l2)
        w -= learning_rate * grad_w
        b -= learning_rate * grad_b
    grad_w, grad_b = logistic_gradient(x, y, w, b, l2)
    norm = float(np.sqrt(grad_w @ grad_w + grad_b * grad_b))
    if not np.isfinite(w).all():
        raise ValueError("gradient descent diverged; lower the learning rate")
    return LogRegModel(w, b, l2, norm)

"""Logistic regression via full-batch gradient descent."""
from __future__ import annotations

import numpy as np


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def log_loss_l2(X, y, weights, bias, l2) -> float:
    """Mean cross-entropy plus (l2/2)*||w||^2; the bias is unpenalized."""
    p = np.clip(sigmoid(X @ weights + bias), 1e-15, 1 - 1e-15)
    ce = -float(np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))
    return ce + 0.5 * l2 * float(np.dot(weights, weights))


def log_loss_gradient(X, y, weights, bias, l2) -> tuple[np.ndarray, float]:
    """Analytic gradient of log_loss_l2 in (weights, bias)."""
    err = sigmoid(X @ weights + bias) - y
    grad_w = X.T @ err / X.shape[0] + l2 * weights
    grad_b = float(np.mean(err))
    return grad_w, grad_b


def fit_logreg(X, y, lr: float, epochs: int, l2: float):
    """Gradient descent until the gradient infinity-norm drops below 1e-6.

    Returns (weights, bias, iterations, converged).
    """
    weights = np.zeros(X.shape[1])
    bias = 0.0
    for epoch in range(1, epochs + 1):
        grad_w, grad_b = log_loss_gradient(X, y, weights, bias, l2)
        if max(np.max(np.abs(grad_w), initial=0.0), abs(grad_b)) < 1e-6:
            return weights, bias, epoch - 1, True
        weights -= lr * grad_w
        bias -= lr * grad_b
    return weights, bias, epochs, False

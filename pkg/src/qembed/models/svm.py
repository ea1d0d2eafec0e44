"""Kernel SVM trained with simplified sequential minimal optimization.

The dual is optimized by the classic two-variable SMO sweep: pick a KKT
violator, pair it with a random second index, solve the 1-D subproblem in
closed form.  Pair updates preserve sum(alpha*y) = 0 exactly.  Class
probability is sigmoid(decision value); rank metrics are unaffected by
that monotone squashing.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidHyperparameter, LengthMismatch
from .linear import sigmoid

KERNEL_KINDS = ("linear", "polynomial", "rbf", "sigmoid")


@dataclass(frozen=True)
class KernelFn:
    """Kernel family plus its parameters; gamma=None resolves to 1/d at fit."""

    kind: str
    gamma: float | None = None
    degree: int = 3
    coef0: float = 0.0

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise InvalidHyperparameter(f"unknown kernel {self.kind!r}")
        if self.gamma is not None and not self.gamma > 0:
            raise InvalidHyperparameter("gamma must be positive")
        if not (isinstance(self.degree, int) and self.degree >= 1):
            raise InvalidHyperparameter("degree must be an integer >= 1")

    def resolve(self, n_features: int) -> "KernelFn":
        if self.gamma is not None or self.kind == "linear":
            return self
        return KernelFn(self.kind, 1.0 / n_features, self.degree, self.coef0)


def kernel_eval(kernel: KernelFn, a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch("kernel arguments must be equal-length vectors")
    return float(gram(kernel, a[None, :], b[None, :])[0, 0])


def gram(kernel: KernelFn, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kernel matrix K[i, j] = k(A[i], B[j])."""
    if kernel.kind == "linear":
        return A @ B.T
    g = kernel.gamma if kernel.gamma is not None else 1.0 / A.shape[1]
    if kernel.kind == "polynomial":
        return (g * (A @ B.T) + kernel.coef0) ** kernel.degree
    if kernel.kind == "sigmoid":
        return np.tanh(g * (A @ B.T) + kernel.coef0)
    sq = (
        np.sum(A**2, axis=1)[:, None]
        + np.sum(B**2, axis=1)[None, :]
        - 2.0 * (A @ B.T)
    )
    return np.exp(-g * np.maximum(sq, 0.0))


def fit_smo(
    X: np.ndarray,
    y01: np.ndarray,
    kernel: KernelFn,
    C: float,
    tol: float,
    max_sweeps: int,
    quiet_sweeps: int,
    rng: np.random.Generator,
):
    """Simplified SMO; returns (alpha, bias, sweeps, converged).

    Stops after `quiet_sweeps` consecutive full sweeps without an update,
    or at the sweep cap (converged=False).
    """
    m = X.shape[0]
    y = np.where(y01 == 1, 1.0, -1.0)
    K = gram(kernel, X, X)
    alpha = np.zeros(m)
    b = 0.0
    quiet = 0
    sweeps = 0
    while quiet < quiet_sweeps and sweeps < max_sweeps:
        sweeps += 1
        changed = 0
        for i in range(m):
            e_i = float(np.dot(K[i], alpha * y) + b - y[i])
            if not (
                (y[i] * e_i < -tol and alpha[i] < C)
                or (y[i] * e_i > tol and alpha[i] > 0)
            ):
                continue
            j = int(rng.integers(m - 1))
            if j >= i:
                j += 1
            e_j = float(np.dot(K[j], alpha * y) + b - y[j])
            a_i, a_j = alpha[i], alpha[j]
            if y[i] == y[j]:
                lo, hi = max(0.0, a_i + a_j - C), min(C, a_i + a_j)
            else:
                lo, hi = max(0.0, a_j - a_i), min(C, C + a_j - a_i)
            if lo == hi:
                continue
            eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
            if eta >= 0:
                continue
            a_j_new = np.clip(a_j - y[j] * (e_i - e_j) / eta, lo, hi)
            if abs(a_j_new - a_j) < 1e-7:
                continue
            a_i_new = a_i + y[i] * y[j] * (a_j - a_j_new)
            b1 = b - e_i - y[i] * (a_i_new - a_i) * K[i, i] - y[j] * (a_j_new - a_j) * K[i, j]
            b2 = b - e_j - y[i] * (a_i_new - a_i) * K[i, j] - y[j] * (a_j_new - a_j) * K[j, j]
            if 0 < a_i_new < C:
                b = b1
            elif 0 < a_j_new < C:
                b = b2
            else:
                b = (b1 + b2) / 2
            alpha[i], alpha[j] = a_i_new, a_j_new
            changed += 1
        quiet = quiet + 1 if changed == 0 else 0
    return alpha, float(b), sweeps, quiet >= quiet_sweeps


def decision_values(X_train, y01_train, alpha, bias, kernel, X) -> np.ndarray:
    y = np.where(y01_train == 1, 1.0, -1.0)
    return gram(kernel, X, X_train) @ (alpha * y) + bias


def svm_proba(X_train, y01_train, alpha, bias, kernel, X) -> np.ndarray:
    return sigmoid(decision_values(X_train, y01_train, alpha, bias, kernel, X))

"""K-nearest-neighbors with deterministic distance tie-breaking."""
from __future__ import annotations

import numpy as np


def knn_proba(X_train: np.ndarray, y_train: np.ndarray, k: int, X: np.ndarray) -> np.ndarray:
    """Vote fraction of class 1 among the k nearest training rows.

    Equal distances break toward the lower training-row index (stable sort),
    so predictions are reproducible.
    """
    d2 = (
        np.sum(X**2, axis=1)[:, None]
        + np.sum(X_train**2, axis=1)[None, :]
        - 2.0 * (X @ X_train.T)
    )
    nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
    return y_train[nearest].mean(axis=1)

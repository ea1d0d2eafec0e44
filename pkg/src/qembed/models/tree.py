"""CART-style binary trees.

Two growers share the node structure: a weighted-Gini classifier and a
Newton-step regression tree (gradient/hessian sums) for boosting.  Split
search is vectorized with prefix sums over each sorted column; candidate
thresholds are midpoints between distinct neighbors.  Ties break toward
the lower feature index, then the lower threshold, so training is fully
deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_EPS = 1e-12


@dataclass
class Node:
    """Internal split or leaf; `left is None` marks a leaf."""

    value: float
    n: int
    feature: int = -1
    threshold: float = 0.0
    left: "Node | None" = None
    right: "Node | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None


def node_values(node: Node, X: np.ndarray) -> np.ndarray:
    """Leaf value per row (class-1 probability or regression output)."""
    out = np.empty(X.shape[0])

    def descend(nd: Node, idx: np.ndarray) -> None:
        if nd.is_leaf:
            out[idx] = nd.value
            return
        go_left = X[idx, nd.feature] <= nd.threshold
        descend(nd.left, idx[go_left])
        descend(nd.right, idx[~go_left])

    descend(node, np.arange(X.shape[0]))
    return out


def node_to_record(node: Node) -> dict:
    if node.is_leaf:
        return {"value": node.value, "n": node.n}
    return {
        "value": node.value,
        "n": node.n,
        "feature": node.feature,
        "threshold": node.threshold,
        "left": node_to_record(node.left),
        "right": node_to_record(node.right),
    }


def node_from_record(rec: dict) -> Node:
    if "feature" not in rec:
        return Node(value=rec["value"], n=rec["n"])
    return Node(
        value=rec["value"],
        n=rec["n"],
        feature=rec["feature"],
        threshold=rec["threshold"],
        left=node_from_record(rec["left"]),
        right=node_from_record(rec["right"]),
    )


def tree_depth(node: Node) -> int:
    if node.is_leaf:
        return 0
    return 1 + max(tree_depth(node.left), tree_depth(node.right))


def _split_columns(col, min_leaf):
    """Sorted view bookkeeping shared by both growers."""
    order = np.argsort(col, kind="mergesort")
    sc = col[order]
    n = col.size
    counts = np.arange(1, n)
    valid = (sc[1:] > sc[:-1]) & (counts >= min_leaf) & (n - counts >= min_leaf)
    return order, sc, valid


def _choose_features(d: int, n_sub: int | None, rng) -> np.ndarray:
    if n_sub is None or n_sub >= d:
        return np.arange(d)
    return np.sort(rng.choice(d, size=n_sub, replace=False))


def grow_classifier(
    X: np.ndarray,
    y: np.ndarray,
    sample_weight: np.ndarray | None = None,
    max_depth: int | None = 8,
    min_leaf: int = 2,
    n_sub: int | None = None,
    rng: np.random.Generator | None = None,
) -> Node:
    """Weighted-Gini CART on binary labels; leaves hold P(class 1).

    A zero-decrease split is still taken when one exists (pure nodes and
    size/depth limits stop growth), so distinct rows always separate at
    unlimited depth.
    """
    w = np.ones(X.shape[0]) if sample_weight is None else np.asarray(sample_weight, float)

    def leaf(idx) -> Node:
        wsum = w[idx].sum()
        p1 = float(np.dot(w[idx], y[idx]) / wsum) if wsum > 0 else 0.5
        return Node(value=p1, n=idx.size)

    def grow(idx, depth) -> Node:
        pure = y[idx].min() == y[idx].max()
        stop = (
            pure
            or idx.size < 2 * min_leaf
            or (max_depth is not None and depth >= max_depth)
        )
        if stop:
            return leaf(idx)
        split = _best_gini_split(X, y, w, idx, min_leaf, n_sub, rng)
        if split is None:
            return leaf(idx)
        j, thr = split
        go_left = X[idx, j] <= thr
        node = leaf(idx)
        node.feature, node.threshold = j, thr
        node.left = grow(idx[go_left], depth + 1)
        node.right = grow(idx[~go_left], depth + 1)
        return node

    return grow(np.arange(X.shape[0]), 0)


def _best_gini_split(X, y, w, idx, min_leaf, n_sub, rng):
    best = (np.inf, -1, 0.0)
    total_w = w[idx].sum()
    total_pos = float(np.dot(w[idx], y[idx]))
    for j in _choose_features(X.shape[1], n_sub, rng):
        col = X[idx, j]
        order, sc, valid = _split_columns(col, min_leaf)
        if not valid.any():
            continue
        sw = w[idx][order]
        sy = y[idx][order]
        wl = np.cumsum(sw)[:-1]
        pl = np.cumsum(sw * sy)[:-1]
        wr = total_w - wl
        pr = total_pos - pl
        with np.errstate(divide="ignore", invalid="ignore"):
            gl = 2 * (pl / wl) * (1 - pl / wl)
            gr = 2 * (pr / wr) * (1 - pr / wr)
            imp = (wl * gl + wr * gr) / total_w
        imp = np.where(valid & (wl > 0) & (wr > 0), imp, np.inf)
        i = int(np.argmin(imp))
        if imp[i] < best[0] - _EPS:
            best = (float(imp[i]), int(j), float((sc[i] + sc[i + 1]) / 2))
    if best[1] == -1:
        return None
    return best[1], best[2]


def grow_regression(
    X: np.ndarray,
    grad: np.ndarray,
    hess: np.ndarray,
    max_depth: int | None = 3,
    min_leaf: int = 2,
) -> Node:
    """Regression tree on gradient/hessian sums; leaves take a Newton step G/(H+eps).

    Splits maximize the usual second-order gain G_L^2/H_L + G_R^2/H_R - G^2/H
    and require it positive, so boosting rounds cannot increase the local
    quadratic objective.
    """

    def leaf(idx) -> Node:
        g, h = grad[idx].sum(), hess[idx].sum()
        return Node(value=float(g / (h + _EPS)), n=idx.size)

    def grow(idx, depth) -> Node:
        if idx.size < 2 * min_leaf or (max_depth is not None and depth >= max_depth):
            return leaf(idx)
        split = _best_newton_split(X, grad, hess, idx, min_leaf)
        if split is None:
            return leaf(idx)
        j, thr = split
        go_left = X[idx, j] <= thr
        node = leaf(idx)
        node.feature, node.threshold = j, thr
        node.left = grow(idx[go_left], depth + 1)
        node.right = grow(idx[~go_left], depth + 1)
        return node

    return grow(np.arange(X.shape[0]), 0)


def _best_newton_split(X, grad, hess, idx, min_leaf):
    total_g = grad[idx].sum()
    total_h = hess[idx].sum()
    parent = total_g**2 / (total_h + _EPS)
    best = (0.0, -1, 0.0)
    for j in range(X.shape[1]):
        col = X[idx, j]
        order, sc, valid = _split_columns(col, min_leaf)
        if not valid.any():
            continue
        sg = grad[idx][order]
        sh = hess[idx][order]
        gl = np.cumsum(sg)[:-1]
        hl = np.cumsum(sh)[:-1]
        gain = gl**2 / (hl + _EPS) + (total_g - gl) ** 2 / (total_h - hl + _EPS) - parent
        gain = np.where(valid, gain, -np.inf)
        i = int(np.argmax(gain))
        if gain[i] > best[0] + _EPS:
            best = (float(gain[i]), int(j), float((sc[i] + sc[i + 1]) / 2))
    if best[1] == -1:
        return None
    return best[1], best[2]

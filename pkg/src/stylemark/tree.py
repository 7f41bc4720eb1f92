"""Decision tree induction with softened (fuzzy) thresholds.

Splits maximize information gain over midpoints between adjacent sorted
feature values. Because the features are continuous, each internal node
carries a fuzz half-width; predictions inside the fuzz band blend both
subtrees' class distributions linearly instead of committing to one side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .exceptions import SchemaError
from .features import FeatureVector
from .models import TrainConfig


@dataclass(frozen=True)
class TreeNode:
    """Internal node (feature/threshold/eps + children) or leaf (dist)."""

    feature: Optional[int] = None
    threshold: float = 0.0
    eps: float = 0.0
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None
    dist: Optional[tuple[float, ...]] = None

    @property
    def is_leaf(self) -> bool:
        return self.dist is not None


@dataclass(frozen=True)
class TreeModel:
    schema: tuple[str, ...]
    classes: tuple[str, ...]
    root: TreeNode


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def _class_counts(y: np.ndarray, n_classes: int) -> np.ndarray:
    return np.bincount(y, minlength=n_classes)


def _best_split(
    X: np.ndarray, y: np.ndarray, n_classes: int, min_leaf: int
) -> Optional[tuple[int, float, float]]:
    """(feature, threshold, gain) maximizing information gain, or None.

    Thresholds are midpoints between adjacent distinct values; both sides
    must keep at least ``min_leaf`` samples. Ties prefer the lower feature
    index, then the lower threshold.
    """
    n, d = X.shape
    parent = _entropy(_class_counts(y, n_classes))
    best: Optional[tuple[int, float, float]] = None
    for feature in range(d):
        order = np.argsort(X[:, feature], kind="stable")
        values = X[order, feature]
        labels = y[order]
        left_counts = np.zeros(n_classes)
        right_counts = _class_counts(labels, n_classes).astype(float)
        for i in range(n - 1):
            left_counts[labels[i]] += 1
            right_counts[labels[i]] -= 1
            if values[i] == values[i + 1]:
                continue
            n_left = i + 1
            n_right = n - n_left
            if n_left < min_leaf or n_right < min_leaf:
                continue
            gain = parent - (
                n_left * _entropy(left_counts) + n_right * _entropy(right_counts)
            ) / n
            threshold = 0.5 * (values[i] + values[i + 1])
            if best is None or gain > best[2] + 1e-12:
                best = (feature, threshold, gain)
    return best


def _grow(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    min_leaf: int,
    fuzz_fraction: float,
) -> TreeNode:
    counts = _class_counts(y, n_classes)
    if (counts > 0).sum() <= 1 or len(y) < 2 * min_leaf:
        return TreeNode(dist=tuple(counts / counts.sum()))
    split = _best_split(X, y, n_classes, min_leaf)
    if split is None or split[2] <= 1e-12:
        return TreeNode(dist=tuple(counts / counts.sum()))
    feature, threshold, _ = split
    col = X[:, feature]
    eps = fuzz_fraction * float(col.max() - col.min())
    mask = col <= threshold
    return TreeNode(
        feature=feature,
        threshold=threshold,
        eps=eps,
        left=_grow(X[mask], y[mask], n_classes, min_leaf, fuzz_fraction),
        right=_grow(X[~mask], y[~mask], n_classes, min_leaf, fuzz_fraction),
    )


def train_tree(
    vectors: Sequence[FeatureVector],
    labels: Sequence[str],
    cfg: TrainConfig,
) -> TreeModel:
    """Induce a tree on labeled vectors; raw features, no scaling."""
    cfg.validate()
    if not vectors:
        raise ValueError("training set is empty")
    if len(vectors) != len(labels):
        raise ValueError("vectors and labels differ in length")
    schema = vectors[0].schema
    for v in vectors:
        if v.schema != schema:
            raise SchemaError("training vectors must share one schema")
    classes = tuple(sorted(set(labels)))
    index = {c: i for i, c in enumerate(classes)}
    X = np.array([v.values for v in vectors], dtype=float)
    y = np.array([index[l] for l in labels], dtype=int)
    root = _grow(X, y, len(classes), cfg.dt_min_leaf, cfg.dt_fuzz_fraction)
    return TreeModel(schema=schema, classes=classes, root=root)


def _node_distribution(node: TreeNode, x: np.ndarray) -> np.ndarray:
    if node.is_leaf:
        return np.asarray(node.dist)
    value = x[node.feature]
    t, eps = node.threshold, node.eps
    if value <= t - eps:
        return _node_distribution(node.left, x)
    if value >= t + eps:
        return _node_distribution(node.right, x)
    w_left = (t + eps - value) / (2.0 * eps)
    return w_left * _node_distribution(node.left, x) + (1.0 - w_left) * (
        _node_distribution(node.right, x)
    )


def predict_tree(model: TreeModel, v: FeatureVector) -> tuple[str, dict[str, float]]:
    """Predicted label and blended class distribution for one vector."""
    if v.schema != model.schema:
        raise SchemaError("vector schema does not match the model")
    dist = _node_distribution(model.root, v.as_array())
    label = model.classes[int(np.argmax(dist))]
    return label, {c: float(p) for c, p in zip(model.classes, dist)}


def tree_to_payload(model: TreeModel) -> dict:
    def encode(node: TreeNode) -> dict:
        if node.is_leaf:
            return {"dist": list(node.dist)}
        return {
            "feature": node.feature,
            "threshold": node.threshold,
            "eps": node.eps,
            "left": encode(node.left),
            "right": encode(node.right),
        }

    return {"classes": list(model.classes), "root": encode(model.root)}


def tree_from_payload(data: dict, schema: Sequence[str]) -> TreeModel:
    def decode(node: dict) -> TreeNode:
        if "dist" in node:
            return TreeNode(dist=tuple(float(x) for x in node["dist"]))
        return TreeNode(
            feature=int(node["feature"]),
            threshold=float(node["threshold"]),
            eps=float(node["eps"]),
            left=decode(node["left"]),
            right=decode(node["right"]),
        )

    return TreeModel(
        schema=tuple(schema),
        classes=tuple(data["classes"]),
        root=decode(data["root"]),
    )

"""Soft-margin SVM with a polynomial kernel, trained by SMO.

One binary classifier per unordered class pair; prediction is pairwise
voting with a decision-value tie-break. The SMO inner loop follows the
classic two-Lagrange-multiplier scheme with an error cache, a
second-choice heuristic maximizing |E1 - E2|, and seeded fallback scans,
so training is deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .exceptions import SchemaError
from .features import FeatureVector
from .models import FeatureScaling, TrainConfig


def polynomial_kernel(a: np.ndarray, b: np.ndarray, degree: int) -> np.ndarray:
    """(a . b + 1)^degree for matrices of row vectors."""
    return (a @ b.T + 1.0) ** degree


class _SmoSolver:
    """State for one binary problem: alphas, bias, and the error cache."""

    def __init__(
        self,
        K: np.ndarray,
        y: np.ndarray,
        C: float,
        tol: float,
        rng: np.random.Generator,
    ):
        self.K = K
        self.y = y
        self.C = C
        self.tol = tol
        self.rng = rng
        self.n = len(y)
        self.alpha = np.zeros(self.n)
        self.b = 0.0
        # f(x_i) = sum_j alpha_j y_j K_ij + b; all alphas start at 0.
        self.errors = -y.astype(float)

    def _take_step(self, i1: int, i2: int) -> bool:
        if i1 == i2:
            return False
        a1, a2 = self.alpha[i1], self.alpha[i2]
        y1, y2 = self.y[i1], self.y[i2]
        e1, e2 = self.errors[i1], self.errors[i2]
        s = y1 * y2
        if s > 0:
            low, high = max(0.0, a1 + a2 - self.C), min(self.C, a1 + a2)
        else:
            low, high = max(0.0, a2 - a1), min(self.C, self.C + a2 - a1)
        if low >= high:
            return False
        k11, k12, k22 = self.K[i1, i1], self.K[i1, i2], self.K[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            a2_new = a2 + y2 * (e1 - e2) / eta
            a2_new = min(max(a2_new, low), high)
        else:
            # Flat or concave direction: evaluate the objective at both ends.
            f1 = y1 * (e1 + self.b) - a1 * k11 - s * a2 * k12
            f2 = y2 * (e2 + self.b) - s * a1 * k12 - a2 * k22
            l1 = a1 + s * (a2 - low)
            h1 = a1 + s * (a2 - high)
            obj_low = (
                l1 * f1 + low * f2 + 0.5 * l1 * l1 * k11
                + 0.5 * low * low * k22 + s * low * l1 * k12
            )
            obj_high = (
                h1 * f1 + high * f2 + 0.5 * h1 * h1 * k11
                + 0.5 * high * high * k22 + s * high * h1 * k12
            )
            if obj_low < obj_high - 1e-12:
                a2_new = low
            elif obj_low > obj_high + 1e-12:
                a2_new = high
            else:
                return False
        if abs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12):
            return False
        a1_new = a1 + s * (a2 - a2_new)
        # Snap to the box so support-vector pruning stays exact.
        if a1_new < 1e-10:
            a1_new = 0.0
        elif a1_new > self.C - 1e-10:
            a1_new = self.C
        if a2_new < 1e-10:
            a2_new = 0.0
        elif a2_new > self.C - 1e-10:
            a2_new = self.C

        d1 = y1 * (a1_new - a1)
        d2 = y2 * (a2_new - a2)
        b1 = self.b - e1 - d1 * k11 - d2 * k12
        b2 = self.b - e2 - d1 * k12 - d2 * k22
        if 0.0 < a1_new < self.C:
            b_new = b1
        elif 0.0 < a2_new < self.C:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)

        self.errors += d1 * self.K[i1] + d2 * self.K[i2] + (b_new - self.b)
        self.alpha[i1], self.alpha[i2] = a1_new, a2_new
        self.b = b_new
        return True

    def _second_choice(self, i2: int) -> Optional[int]:
        non_bound = np.flatnonzero((self.alpha > 0) & (self.alpha < self.C))
        if len(non_bound) == 0:
            return None
        gaps = np.abs(self.errors[non_bound] - self.errors[i2])
        return int(non_bound[int(np.argmax(gaps))])

    def _examine(self, i2: int) -> bool:
        y2, a2, e2 = self.y[i2], self.alpha[i2], self.errors[i2]
        r2 = e2 * y2
        if not ((r2 < -self.tol and a2 < self.C) or (r2 > self.tol and a2 > 0)):
            return False
        i1 = self._second_choice(i2)
        if i1 is not None and self._take_step(i1, i2):
            return True
        non_bound = np.flatnonzero((self.alpha > 0) & (self.alpha < self.C))
        if len(non_bound):
            start = int(self.rng.integers(0, len(non_bound)))
            for offset in range(len(non_bound)):
                if self._take_step(int(non_bound[(start + offset) % len(non_bound)]), i2):
                    return True
        start = int(self.rng.integers(0, self.n))
        for offset in range(self.n):
            if self._take_step((start + offset) % self.n, i2):
                return True
        return False

    def solve(self, max_sweeps: int) -> None:
        examine_all = True
        sweeps = 0
        while sweeps < max_sweeps:
            sweeps += 1
            changed = 0
            if examine_all:
                for i in range(self.n):
                    changed += self._examine(i)
            else:
                for i in np.flatnonzero((self.alpha > 0) & (self.alpha < self.C)):
                    changed += self._examine(int(i))
            if examine_all:
                if changed == 0:
                    return
                examine_all = False
            elif changed == 0:
                examine_all = True


@dataclass(frozen=True, eq=False)
class PairClassifier:
    """Binary classifier for one class pair; +1 is the first class."""

    pos_class: str
    neg_class: str
    support_x: np.ndarray
    support_y: np.ndarray
    support_alpha: np.ndarray
    bias: float

    def decision(self, x_scaled: np.ndarray, degree: int) -> float:
        k = polynomial_kernel(self.support_x, x_scaled[np.newaxis, :], degree)[:, 0]
        return float((self.support_alpha * self.support_y) @ k + self.bias)


@dataclass(frozen=True, eq=False)
class SvmModel:
    schema: tuple[str, ...]
    classes: tuple[str, ...]
    degree: int
    C: float
    scaling: FeatureScaling
    pairs: tuple[PairClassifier, ...]


def smo_train_binary(
    X: np.ndarray,
    y: np.ndarray,
    C: float,
    degree: int,
    tol: float,
    max_sweeps: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, float]:
    """Alphas and bias for one binary problem (labels must be +-1)."""
    K = polynomial_kernel(X, X, degree)
    solver = _SmoSolver(K, y.astype(float), C, tol, rng)
    solver.solve(max_sweeps)
    return solver.alpha, solver.b


def kkt_violations(
    X: np.ndarray,
    y: np.ndarray,
    alpha: np.ndarray,
    bias: float,
    C: float,
    degree: int,
) -> np.ndarray:
    """Per-sample KKT violation magnitudes at the given solution."""
    f = polynomial_kernel(X, X, degree) @ (alpha * y) + bias
    r = y * f - 1.0
    violations = np.zeros(len(y))
    at_lower = alpha <= 0
    at_upper = alpha >= C
    interior = ~at_lower & ~at_upper
    violations[at_lower] = np.maximum(0.0, -r[at_lower])
    violations[at_upper] = np.maximum(0.0, r[at_upper])
    violations[interior] = np.abs(r[interior])
    return violations


def train_svm(
    vectors: Sequence[FeatureVector],
    labels: Sequence[str],
    cfg: TrainConfig,
) -> SvmModel:
    """Train one binary SMO problem per unordered class pair.

    Features are scaled to [0, 1] with min/max fitted on the full training
    set and stored in the model.
    """
    cfg.validate()
    if len(vectors) != len(labels):
        raise ValueError("vectors and labels differ in length")
    if not vectors:
        raise ValueError("training set is empty")
    schema = vectors[0].schema
    for v in vectors:
        if v.schema != schema:
            raise SchemaError("training vectors must share one schema")
    X_raw = np.array([v.values for v in vectors], dtype=float)
    if not np.isfinite(X_raw).all():
        raise ValueError("training features must be finite")
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise ValueError("SVM training needs at least 2 classes")
    scaling = FeatureScaling.fit(X_raw)
    X = scaling.transform(X_raw)
    y_all = np.array(labels)

    pairs = []
    for pair_index, (ci, cj) in enumerate(combinations(classes, 2)):
        mask = (y_all == ci) | (y_all == cj)
        Xp = X[mask]
        yp = np.where(y_all[mask] == ci, 1.0, -1.0)
        rng = np.random.default_rng(
            np.random.SeedSequence(cfg.seed, spawn_key=(pair_index,))
        )
        alpha, bias = smo_train_binary(
            Xp, yp, cfg.svm_c, cfg.svm_degree, cfg.svm_tol, cfg.svm_max_sweeps, rng
        )
        keep = alpha > 0
        pairs.append(
            PairClassifier(
                pos_class=ci,
                neg_class=cj,
                support_x=Xp[keep],
                support_y=yp[keep],
                support_alpha=alpha[keep],
                bias=bias,
            )
        )
    return SvmModel(
        schema=schema,
        classes=classes,
        degree=cfg.svm_degree,
        C=cfg.svm_c,
        scaling=scaling,
        pairs=tuple(pairs),
    )


def predict_svm(model: SvmModel, v: FeatureVector) -> str:
    """Pairwise vote; ties go to the largest total |decision value|,
    then to the lower class index."""
    if v.schema != model.schema:
        raise SchemaError("vector schema does not match the model")
    x = model.scaling.transform(v.as_array()[np.newaxis, :])[0]
    votes = {c: 0 for c in model.classes}
    magnitude = {c: 0.0 for c in model.classes}
    for pair in model.pairs:
        value = pair.decision(x, model.degree)
        winner = pair.pos_class if value >= 0 else pair.neg_class
        votes[winner] += 1
        magnitude[pair.pos_class] += abs(value)
        magnitude[pair.neg_class] += abs(value)
    order = {c: i for i, c in enumerate(model.classes)}
    return max(
        model.classes,
        key=lambda c: (votes[c], magnitude[c], -order[c]),
    )


def svm_to_payload(model: SvmModel) -> dict:
    return {
        "classes": list(model.classes),
        "degree": model.degree,
        "C": model.C,
        "scaling": {"minimum": list(model.scaling.minimum),
                    "maximum": list(model.scaling.maximum)},
        "pairs": [
            {
                "pos_class": p.pos_class,
                "neg_class": p.neg_class,
                "support_x": p.support_x.tolist(),
                "support_y": p.support_y.tolist(),
                "support_alpha": p.support_alpha.tolist(),
                "bias": p.bias,
            }
            for p in model.pairs
        ],
    }


def svm_from_payload(data: dict, schema: Sequence[str]) -> SvmModel:
    pairs = tuple(
        PairClassifier(
            pos_class=p["pos_class"],
            neg_class=p["neg_class"],
            support_x=np.array(p["support_x"], dtype=float).reshape(
                len(p["support_alpha"]), len(schema)
            ),
            support_y=np.array(p["support_y"], dtype=float),
            support_alpha=np.array(p["support_alpha"], dtype=float),
            bias=float(p["bias"]),
        )
        for p in data["pairs"]
    )
    return SvmModel(
        schema=tuple(schema),
        classes=tuple(data["classes"]),
        degree=int(data["degree"]),
        C=float(data["C"]),
        scaling=FeatureScaling(
            tuple(float(x) for x in data["scaling"]["minimum"]),
            tuple(float(x) for x in data["scaling"]["maximum"]),
        ),
        pairs=pairs,
    )

"""Evaluation protocol: stratified k-fold CV, confusion matrices, Cohen's
kappa, drop-one feature ablation, per-author error attribution, and the
vocabulary-richness and n-gram baselines.

Per fold, author profiles (keyword sets and centroids) are rebuilt from
the training documents only, so nothing about a held-out document leaks
into the representation used to score it.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .corpus import Document
from .exceptions import SchemaError
from .features import (
    AuthorProfile,
    DEFAULT_KEYWORD_SIZE,
    FeatureVector,
    build_profiles,
    drop_coordinate,
    extract_features,
    feature_schema,
)
from .models import ML_KINDS, STAT_KINDS, TrainConfig
from .mlp import predict_mlp, train_mlp
from .stat_models import classify_stat
from .svm import predict_svm, train_svm
from .tree import predict_tree, train_tree

Predictor = Callable[[FeatureVector], str]
Trainer = Callable[[Sequence[FeatureVector], Sequence[str], TrainConfig], Predictor]


# ---------------------------------------------------------------------------
# Confusion matrices


@dataclass(frozen=True)
class ConfusionMatrix:
    """Row = true label, column = predicted label."""

    labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.labels)
        if len(self.counts) != n or any(len(row) != n for row in self.counts):
            raise ValueError("counts must be square and match the label list")
        if any(c < 0 for row in self.counts for c in row):
            raise ValueError("counts must be non-negative")

    @classmethod
    def from_pairs(
        cls,
        labels: Sequence[str],
        pairs: Sequence[tuple[str, str]],
    ) -> "ConfusionMatrix":
        index = {label: i for i, label in enumerate(labels)}
        counts = [[0] * len(labels) for _ in labels]
        for true, pred in pairs:
            counts[index[true]][index[pred]] += 1
        return cls(tuple(labels), tuple(tuple(row) for row in counts))

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def accuracy(self) -> float:
        total = self.total
        if total == 0:
            return 0.0
        return sum(self.counts[i][i] for i in range(len(self.labels))) / total

    def per_class_error(self) -> dict[str, float]:
        errors = {}
        for i, label in enumerate(self.labels):
            row_sum = sum(self.counts[i])
            errors[label] = 1.0 - self.counts[i][i] / row_sum if row_sum else 0.0
        return errors

    def avg_error(self) -> float:
        """Unweighted mean of the per-class error rates."""
        errors = self.per_class_error()
        return sum(errors.values()) / len(errors) if errors else 0.0

    def add(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if other.labels != self.labels:
            raise ValueError("cannot merge confusion matrices over different labels")
        merged = tuple(
            tuple(a + b for a, b in zip(ra, rb))
            for ra, rb in zip(self.counts, other.counts)
        )
        return ConfusionMatrix(self.labels, merged)

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "counts": [list(row) for row in self.counts],
            "per_class_error": self.per_class_error(),
            "avg_error": self.avg_error(),
            "accuracy": self.accuracy(),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["true\\pred", *self.labels])
        for label, row in zip(self.labels, self.counts):
            writer.writerow([label, *row])
        return buf.getvalue()


def error_attribution(cm: ConfusionMatrix) -> dict[str, float]:
    """Share of all errors each predicted label is responsible for.

    share(c) = off-diagonal sum of column c / total off-diagonal count;
    all zeros when there are no errors.
    """
    n = len(cm.labels)
    column_errors = {
        label: sum(cm.counts[r][c] for r in range(n) if r != c)
        for c, label in enumerate(cm.labels)
    }
    total = sum(column_errors.values())
    if total == 0:
        return {label: 0.0 for label in cm.labels}
    return {label: count / total for label, count in column_errors.items()}


# ---------------------------------------------------------------------------
# Fold machinery


def kfold_split(n: int, k: int, seed: int) -> list[list[int]]:
    """Seeded shuffle then contiguous chunks; first n % k folds get one extra."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of items n={n}")
    order = np.random.default_rng(seed).permutation(n)
    base, extra = divmod(n, k)
    folds = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append([int(x) for x in order[start : start + size]])
        start += size
    return folds


def stratified_folds(
    docs: Sequence[Document], k: int, seed: int
) -> list[list[int]]:
    """Per-author folds combined: fold i is the union of fold i per author."""
    by_author: dict[str, list[int]] = {}
    for i, doc in enumerate(docs):
        if doc.author is None:
            raise ValueError(f"document {doc.id!r} has no author label")
        by_author.setdefault(doc.author, []).append(i)
    folds: list[list[int]] = [[] for _ in range(k)]
    for author in sorted(by_author):
        indices = by_author[author]
        if len(indices) < k:
            raise ValueError(
                f"author {author!r} has {len(indices)} documents, fewer than k={k}"
            )
        for fold_idx, members in enumerate(kfold_split(len(indices), k, seed)):
            folds[fold_idx].extend(indices[m] for m in members)
    return [sorted(fold) for fold in folds]


# ---------------------------------------------------------------------------
# Cross-validation


@dataclass(frozen=True)
class FoldDetail:
    """Per-fold evidence kept for inspection (e.g. leakage probes)."""

    test_ids: tuple[str, ...]
    true_labels: tuple[str, ...]
    predictions: tuple[str, ...]
    profiles: tuple[AuthorProfile, ...]


@dataclass(frozen=True)
class CvReport:
    model_kind: str
    k: int
    seed: int
    fold_accuracies: tuple[float, ...]
    confusion: ConfusionMatrix

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.fold_accuracies))

    @property
    def variance(self) -> float:
        return float(np.var(self.fold_accuracies))

    def to_dict(self) -> dict:
        return {
            "model_kind": self.model_kind,
            "k": self.k,
            "seed": self.seed,
            "fold_accuracies": list(self.fold_accuracies),
            "mean_accuracy": self.mean_accuracy,
            "variance": self.variance,
            "confusion": self.confusion.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def folds_to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["fold", "accuracy"])
        for i, acc in enumerate(self.fold_accuracies):
            writer.writerow([i, repr(acc)])
        return buf.getvalue()


def _ml_trainer(kind: str) -> Trainer:
    def trainer(vectors, labels, cfg):
        if kind == "dt":
            model = train_tree(vectors, labels, cfg)
            return lambda v: predict_tree(model, v)[0]
        if kind == "nn":
            model = train_mlp(vectors, labels, cfg)
            return lambda v: predict_mlp(model, v)
        model = train_svm(vectors, labels, cfg)
        return lambda v: predict_svm(model, v)

    return trainer


def _resolve_trainer(model_kind) -> tuple[str, Optional[Trainer], Optional[str]]:
    """Name, trainer (ML path), and measure (stat path) for a model kind."""
    if callable(model_kind):
        name = getattr(model_kind, "__name__", "custom")
        return name, model_kind, None
    if model_kind in ML_KINDS:
        return model_kind, _ml_trainer(model_kind), None
    if model_kind in STAT_KINDS:
        return model_kind, None, model_kind
    raise ValueError(f"unknown model kind {model_kind!r}")


def cross_validate(
    model_kind,
    docs: Sequence[Document],
    k: int,
    cfg: TrainConfig,
    *,
    keyword_size: int = DEFAULT_KEYWORD_SIZE,
    stopwords: Sequence[str] = (),
    drop_feature: Optional[str] = None,
    return_details: bool = False,
):
    """Stratified k-fold cross-validation of one model kind.

    ``model_kind`` is one of dt/nn/svm/cos/cs/ed/com, or a callable
    ``trainer(vectors, labels, cfg) -> predict`` for custom models. With
    ``drop_feature`` the named coordinate is removed from every vector
    (folds stay identical since they depend only on cfg.seed).
    """
    name, trainer, measure = _resolve_trainer(model_kind)
    folds = stratified_folds(docs, k, cfg.seed)
    authors = sorted({doc.author for doc in docs})
    schema = feature_schema(authors)
    if drop_feature is not None and drop_feature not in schema:
        raise SchemaError(f"cannot drop unknown feature {drop_feature!r}")

    fold_accuracies: list[float] = []
    pooled: list[tuple[str, str]] = []
    details: list[FoldDetail] = []
    for fold in folds:
        test_set = set(fold)
        train_docs = [doc for i, doc in enumerate(docs) if i not in test_set]
        test_docs = [docs[i] for i in fold]
        profiles = build_profiles(train_docs, keyword_size, stopwords)

        def featurize(doc: Document) -> FeatureVector:
            fv = extract_features(doc, profiles)
            return drop_coordinate(fv, drop_feature) if drop_feature else fv

        if measure is not None:
            centroids = [
                p if drop_feature is None
                else _drop_centroid(p, drop_feature)
                for p in profiles
            ]
            predict: Predictor = lambda v: classify_stat(v, centroids).label(measure)
        else:
            train_vectors = [featurize(d) for d in train_docs]
            train_labels = [d.author for d in train_docs]
            predict = trainer(train_vectors, train_labels, cfg)

        pairs = [(doc.author, predict(featurize(doc))) for doc in test_docs]
        correct = sum(1 for true, pred in pairs if true == pred)
        fold_accuracies.append(correct / len(pairs))
        pooled.extend(pairs)
        if return_details:
            details.append(
                FoldDetail(
                    test_ids=tuple(d.id for d in test_docs),
                    true_labels=tuple(d.author for d in test_docs),
                    predictions=tuple(pred for _, pred in pairs),
                    profiles=tuple(profiles),
                )
            )

    report = CvReport(
        model_kind=name,
        k=k,
        seed=cfg.seed,
        fold_accuracies=tuple(fold_accuracies),
        confusion=ConfusionMatrix.from_pairs(authors, pooled),
    )
    if return_details:
        return report, details
    return report


def _drop_centroid(profile: AuthorProfile, feature: str) -> AuthorProfile:
    from dataclasses import replace

    return replace(profile, centroid=drop_coordinate(profile.centroid, feature))


# ---------------------------------------------------------------------------
# Agreement and ablation


def cohen_kappa(preds_a: Sequence[str], preds_b: Sequence[str]) -> float:
    """Chance-corrected agreement between two equally long label lists."""
    if len(preds_a) != len(preds_b):
        raise ValueError("prediction lists differ in length")
    if not preds_a:
        raise ValueError("prediction lists are empty")
    n = len(preds_a)
    observed = sum(1 for a, b in zip(preds_a, preds_b) if a == b) / n
    counts_a = Counter(preds_a)
    counts_b = Counter(preds_b)
    expected = sum(
        (counts_a[c] / n) * (counts_b[c] / n) for c in set(counts_a) | set(counts_b)
    )
    if expected == 1.0:
        return 1.0
    return (observed - expected) / (1.0 - expected)


def model_agreement(
    docs: Sequence[Document],
    k: int,
    cfg: TrainConfig,
    kinds: Sequence[str] = ML_KINDS,
    *,
    keyword_size: int = DEFAULT_KEYWORD_SIZE,
    stopwords: Sequence[str] = (),
) -> tuple[tuple[str, ...], np.ndarray]:
    """Pairwise kappa matrix over pooled CV predictions of several models.

    All models share the same folds (same seed), so the pooled prediction
    lists are aligned document by document.
    """
    pooled: dict[str, list[str]] = {}
    for kind in kinds:
        _, details = cross_validate(
            kind, docs, k, cfg,
            keyword_size=keyword_size, stopwords=stopwords, return_details=True,
        )
        pooled[kind] = [p for fold in details for p in fold.predictions]
    matrix = np.zeros((len(kinds), len(kinds)))
    for i, a in enumerate(kinds):
        for j, b in enumerate(kinds):
            matrix[i, j] = cohen_kappa(pooled[a], pooled[b])
    return tuple(kinds), matrix


@dataclass(frozen=True)
class AblationEntry:
    feature: str
    accuracy: float
    delta: float


@dataclass(frozen=True)
class AblationReport:
    model_kind: str
    k: int
    seed: int
    full_accuracy: float
    entries: tuple[AblationEntry, ...]

    def to_dict(self) -> dict:
        return {
            "model_kind": self.model_kind,
            "k": self.k,
            "seed": self.seed,
            "full_accuracy": self.full_accuracy,
            "entries": [
                {"feature": e.feature, "accuracy": e.accuracy, "delta": e.delta}
                for e in self.entries
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["feature", "accuracy_without", "delta_vs_full"])
        for e in self.entries:
            writer.writerow([e.feature, repr(e.accuracy), repr(e.delta)])
        return buf.getvalue()


def ablate(
    model_kind,
    docs: Sequence[Document],
    k: int,
    cfg: TrainConfig,
    *,
    keyword_size: int = DEFAULT_KEYWORD_SIZE,
    stopwords: Sequence[str] = (),
) -> AblationReport:
    """Drop each schema feature in turn and re-run cross-validation.

    Folds are identical across runs (they depend only on cfg.seed), so
    deltas isolate the dropped feature.
    """
    authors = sorted({doc.author for doc in docs})
    schema = feature_schema(authors)
    full = cross_validate(
        model_kind, docs, k, cfg, keyword_size=keyword_size, stopwords=stopwords
    )
    entries = []
    for feature in schema:
        dropped = cross_validate(
            model_kind, docs, k, cfg,
            keyword_size=keyword_size, stopwords=stopwords, drop_feature=feature,
        )
        entries.append(
            AblationEntry(
                feature=feature,
                accuracy=dropped.mean_accuracy,
                delta=full.mean_accuracy - dropped.mean_accuracy,
            )
        )
    return AblationReport(
        model_kind=full.model_kind,
        k=k,
        seed=cfg.seed,
        full_accuracy=full.mean_accuracy,
        entries=tuple(entries),
    )


# ---------------------------------------------------------------------------
# Baselines


def vocabulary_richness(doc: Document) -> float:
    """Type-token ratio: distinct surfaces over token count."""
    if not doc.tokens:
        raise ValueError(f"document {doc.id!r} has no tokens")
    return len(set(doc.surfaces)) / len(doc.tokens)


def vr_baseline(
    train_docs: Sequence[Document], test_docs: Sequence[Document]
) -> list[str]:
    """Nearest-neighbor on the type-token ratio; ties to the earlier
    training document."""
    if not train_docs:
        raise ValueError("baseline needs at least one training document")
    if any(d.author is None for d in train_docs):
        raise ValueError("baseline training documents must carry author labels")
    train_vr = [(vocabulary_richness(d), d.author) for d in train_docs]
    predictions = []
    for doc in test_docs:
        vr = vocabulary_richness(doc)
        best = min(range(len(train_vr)), key=lambda i: (abs(train_vr[i][0] - vr), i))
        predictions.append(train_vr[best][1])
    return predictions


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter[tuple[str, ...]]:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _map_cosine(a: Counter, b: Counter) -> float:
    if not a or not b:
        return 0.0
    dot = sum(a[g] * b[g] for g in a.keys() & b.keys())
    na = math.sqrt(sum(v * v for v in a.values()))
    nb = math.sqrt(sum(v * v for v in b.values()))
    return dot / (na * nb)


def ngram_baseline(
    train_docs: Sequence[Document],
    test_docs: Sequence[Document],
    n: int = 1,
) -> list[str]:
    """Cosine over token n-gram relative frequencies per author.

    Author profiles concatenate the author's training documents; ties go
    to the author appearing earlier in the training sequence.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if any(d.author is None for d in train_docs):
        raise ValueError("baseline training documents must carry author labels")
    authors: list[str] = []
    concatenated: dict[str, list[str]] = {}
    for doc in train_docs:
        if doc.author not in concatenated:
            authors.append(doc.author)
            concatenated[doc.author] = []
        concatenated[doc.author].extend(doc.surfaces)
    profiles = {}
    for author in authors:
        tokens = concatenated[author]
        if len(tokens) < n:
            raise ValueError(f"author {author!r} training text is shorter than n={n}")
        counts = _ngram_counts(tokens, n)
        total = sum(counts.values())
        profiles[author] = Counter({g: c / total for g, c in counts.items()})
    predictions = []
    for doc in test_docs:
        if len(doc.tokens) < n:
            raise ValueError(f"document {doc.id!r} is shorter than n={n} tokens")
        counts = _ngram_counts(doc.surfaces, n)
        total = sum(counts.values())
        freq = Counter({g: c / total for g, c in counts.items()})
        best = max(
            range(len(authors)),
            key=lambda i: (_map_cosine(freq, profiles[authors[i]]), -i),
        )
        predictions.append(authors[best])
    return predictions


def cross_validate_baseline(
    which: str,
    docs: Sequence[Document],
    k: int,
    seed: int,
    *,
    ngram_order: int = 1,
) -> CvReport:
    """Evaluate a baseline with the same stratified fold protocol."""
    if which not in ("vr", "ngram"):
        raise ValueError(f"unknown baseline {which!r}")
    folds = stratified_folds(docs, k, seed)
    authors = sorted({doc.author for doc in docs})
    fold_accuracies = []
    pooled: list[tuple[str, str]] = []
    for fold in folds:
        test_set = set(fold)
        train_docs = [doc for i, doc in enumerate(docs) if i not in test_set]
        test_docs = [docs[i] for i in fold]
        if which == "vr":
            predictions = vr_baseline(train_docs, test_docs)
        else:
            predictions = ngram_baseline(train_docs, test_docs, ngram_order)
        pairs = list(zip([d.author for d in test_docs], predictions))
        fold_accuracies.append(
            sum(1 for t, p in pairs if t == p) / len(pairs)
        )
        pooled.extend(pairs)
    return CvReport(
        model_kind=which,
        k=k,
        seed=seed,
        fold_accuracies=tuple(fold_accuracies),
        confusion=ConfusionMatrix.from_pairs(authors, pooled),
    )

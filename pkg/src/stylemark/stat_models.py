"""Similarity-based classification against author centroids.

Three measures (cosine similarity, symmetric chi-square distance,
Euclidean distance) each pick an author; their majority vote is the
combined prediction, falling back to the chi-square pick when all three
disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .exceptions import SchemaError
from .features import AuthorProfile, FeatureVector

MEASURES = ("cos", "cs", "ed")


def _check_schemas(x: FeatureVector, y: FeatureVector) -> None:
    if x.schema != y.schema:
        raise SchemaError(f"schema mismatch: {x.schema} vs {y.schema}")


def cosine_similarity(x: FeatureVector, y: FeatureVector) -> float:
    """dot(x, y) / (|x| |y|); raises on a zero vector."""
    _check_schemas(x, y)
    ax, ay = x.as_array(), y.as_array()
    nx, ny = np.linalg.norm(ax), np.linalg.norm(ay)
    if nx == 0.0 or ny == 0.0:
        raise ValueError("cosine similarity is undefined for a zero vector")
    return float(ax @ ay / (nx * ny))


def chi_square_distance(x: FeatureVector, y: FeatureVector) -> float:
    """Sum of (x_i - y_i)^2 / (x_i + y_i), skipping zero-sum coordinates."""
    _check_schemas(x, y)
    ax, ay = x.as_array(), y.as_array()
    if (ax < 0).any() or (ay < 0).any():
        raise ValueError("chi-square distance requires non-negative coordinates")
    total = ax + ay
    mask = total > 0
    diff = ax[mask] - ay[mask]
    return float(np.sum(diff * diff / total[mask]))


def euclidean_distance(x: FeatureVector, y: FeatureVector) -> float:
    _check_schemas(x, y)
    return float(np.linalg.norm(x.as_array() - y.as_array()))


@dataclass(frozen=True)
class StatPrediction:
    """Per-measure picks, the combined pick, and all raw scores."""

    cos: str
    cs: str
    ed: str
    com: str
    scores: Mapping[str, Mapping[str, float]]

    def label(self, measure: str) -> str:
        if measure not in ("cos", "cs", "ed", "com"):
            raise ValueError(f"unknown measure {measure!r}")
        return getattr(self, measure)


def classify_stat(
    v: FeatureVector, profiles: Sequence[AuthorProfile]
) -> StatPrediction:
    """Classify one vector against at least two author centroids.

    Cosine picks the argmax similarity; chi-square and Euclidean pick the
    argmin distance; ties inside a measure go to the earlier profile. The
    combined label is the majority of the three, or the chi-square label
    when no majority exists.
    """
    if len(profiles) < 2:
        raise ValueError("classification needs at least two author profiles")
    for p in profiles:
        if p.centroid is None:
            raise ValueError(f"profile for {p.author!r} has no centroid")
        if p.centroid.schema != v.schema:
            raise SchemaError(
                f"vector schema does not match centroid schema of {p.author!r}"
            )

    authors = [p.author for p in profiles]
    cos_scores = {p.author: cosine_similarity(v, p.centroid) for p in profiles}
    cs_scores = {p.author: chi_square_distance(v, p.centroid) for p in profiles}
    ed_scores = {p.author: euclidean_distance(v, p.centroid) for p in profiles}

    cos_pick = max(authors, key=lambda a: (cos_scores[a], -authors.index(a)))
    cs_pick = min(authors, key=lambda a: (cs_scores[a], authors.index(a)))
    ed_pick = min(authors, key=lambda a: (ed_scores[a], authors.index(a)))

    votes = [cos_pick, cs_pick, ed_pick]
    com_pick = cs_pick
    for candidate in votes:
        if votes.count(candidate) >= 2:
            com_pick = candidate
            break

    return StatPrediction(
        cos=cos_pick,
        cs=cs_pick,
        ed=ed_pick,
        com=com_pick,
        scores={"cos": cos_scores, "cs": cs_scores, "ed": ed_scores},
    )

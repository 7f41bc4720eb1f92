"""Training configuration, feature scaling, and model artifact I/O.

A model artifact is a versioned JSON file that bundles the trained model
with the author profiles and schema it was trained against, so a saved
artifact is sufficient to classify raw documents later.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .exceptions import ConfigError, ModelFormatError
from .features import AuthorProfile, FeatureVector

FORMAT_VERSION = 1

ML_KINDS = ("dt", "nn", "svm")
STAT_KINDS = ("cos", "cs", "ed", "com")
MODEL_KINDS = ML_KINDS + STAT_KINDS


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for all trainable models; seeded and deterministic."""

    seed: int = 0
    dt_fuzz_fraction: float = 0.05
    dt_min_leaf: int = 2
    nn_learning_rate: float = 0.1
    nn_max_epochs: int = 2000
    nn_validation_fraction: float = 0.30
    nn_patience: int = 20
    svm_c: float = 1.0
    svm_degree: int = 2
    svm_tol: float = 1e-3
    svm_max_sweeps: int = 200

    def validate(self) -> None:
        if self.dt_fuzz_fraction < 0:
            raise ConfigError("dt_fuzz_fraction must be >= 0")
        if self.dt_min_leaf < 1:
            raise ConfigError("dt_min_leaf must be >= 1")
        if self.nn_learning_rate <= 0:
            raise ConfigError("nn_learning_rate must be positive")
        if self.nn_max_epochs < 1:
            raise ConfigError("nn_max_epochs must be >= 1")
        if not 0.0 < self.nn_validation_fraction < 1.0:
            raise ConfigError("nn_validation_fraction must be in (0, 1)")
        if self.nn_patience < 1:
            raise ConfigError("nn_patience must be >= 1")
        if self.svm_c <= 0:
            raise ConfigError("svm_c must be positive")
        if self.svm_degree < 1:
            raise ConfigError("svm_degree must be >= 1")
        if self.svm_tol <= 0:
            raise ConfigError("svm_tol must be positive")
        if self.svm_max_sweeps < 1:
            raise ConfigError("svm_max_sweeps must be >= 1")


def train_config_from_dict(data: Mapping, seed: Optional[int] = None) -> TrainConfig:
    """TrainConfig from a JSON-style mapping, rejecting unknown keys."""
    known = {f.name for f in fields(TrainConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
    cfg = TrainConfig(**dict(data))
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    cfg.validate()
    return cfg


@dataclass(frozen=True)
class FeatureScaling:
    """Per-coordinate [0, 1] scaling fitted on training data.

    Constant coordinates map to 0; values outside the training range map
    linearly outside [0, 1] (no clipping).
    """

    minimum: tuple[float, ...]
    maximum: tuple[float, ...]

    @classmethod
    def fit(cls, matrix: np.ndarray) -> "FeatureScaling":
        return cls(
            tuple(float(x) for x in matrix.min(axis=0)),
            tuple(float(x) for x in matrix.max(axis=0)),
        )

    def transform(self, matrix: np.ndarray) -> np.ndarray:
        lo = np.asarray(self.minimum)
        span = np.asarray(self.maximum) - lo
        safe = np.where(span > 0, span, 1.0)
        return np.where(span > 0, (matrix - lo) / safe, 0.0)


def _array(values) -> np.ndarray:
    return np.asarray(values, dtype=float)


def profile_to_payload(profile: AuthorProfile) -> dict:
    return {
        "author": profile.author,
        "keywords": sorted(profile.keywords),
        "keyword_capacity": profile.keyword_capacity,
        "n_train_docs": profile.n_train_docs,
        "centroid": None if profile.centroid is None else list(profile.centroid.values),
    }


def profile_from_payload(data: Mapping, schema: Sequence[str]) -> AuthorProfile:
    centroid = data.get("centroid")
    return AuthorProfile(
        author=data["author"],
        keywords=frozenset(data["keywords"]),
        keyword_capacity=int(data["keyword_capacity"]),
        n_train_docs=int(data["n_train_docs"]),
        centroid=None
        if centroid is None
        else FeatureVector(tuple(float(x) for x in centroid), tuple(schema)),
    )


def save_artifact(
    path: str | Path,
    kind: str,
    schema: Sequence[str],
    profiles: Sequence[AuthorProfile],
    model_payload: Mapping,
) -> None:
    if kind not in MODEL_KINDS:
        raise ModelFormatError(f"unknown model kind {kind!r}")
    artifact = {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "schema": list(schema),
        "profiles": [profile_to_payload(p) for p in profiles],
        "model": dict(model_payload),
    }
    Path(path).write_text(
        json.dumps(artifact, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_artifact(path: str | Path) -> dict:
    """Read and structurally validate a model artifact."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"cannot read model artifact {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ModelFormatError(f"{path}: artifact must be a JSON object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"{path}: unsupported format_version {version!r}")
    for key in ("kind", "schema", "profiles", "model"):
        if key not in data:
            raise ModelFormatError(f"{path}: missing {key!r}")
    if data["kind"] not in MODEL_KINDS:
        raise ModelFormatError(f"{path}: unknown model kind {data['kind']!r}")
    return data

"""Feed-forward network trained by per-sample gradient descent.

Architecture is fixed at [D, 8, 6, 2A] with sigmoid activations: every
author owns two output nodes, so codewords are 2A bits with pairwise
Hamming distance 4 and prediction decodes to the nearest codeword. A
seeded validation split stops training when the validation loss stops
improving; the best-validation weights are kept.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .exceptions import ConfigError, SchemaError
from .features import FeatureVector
from .models import FeatureScaling, TrainConfig

HIDDEN_SIZES = (8, 6)
BITS_PER_CLASS = 2


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def init_layers(
    sizes: Sequence[int], rng: np.random.Generator
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Weights and biases drawn uniformly from [-0.5, 0.5]."""
    weights, biases = [], []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        weights.append(rng.uniform(-0.5, 0.5, size=(n_out, n_in)))
        biases.append(rng.uniform(-0.5, 0.5, size=n_out))
    return weights, biases


def forward_pass(
    weights: Sequence[np.ndarray], biases: Sequence[np.ndarray], x: np.ndarray
) -> list[np.ndarray]:
    """Activations per layer, input included."""
    activations = [x]
    for w, b in zip(weights, biases):
        activations.append(sigmoid(w @ activations[-1] + b))
    return activations


def sample_loss(
    weights: Sequence[np.ndarray],
    biases: Sequence[np.ndarray],
    x: np.ndarray,
    target: np.ndarray,
) -> float:
    """Squared-error loss 0.5 * sum((out - target)^2) for one sample."""
    out = forward_pass(weights, biases, x)[-1]
    return float(0.5 * np.sum((out - target) ** 2))


def backprop_gradients(
    weights: Sequence[np.ndarray],
    biases: Sequence[np.ndarray],
    x: np.ndarray,
    target: np.ndarray,
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Analytic gradients of sample_loss w.r.t. every weight and bias."""
    activations = forward_pass(weights, biases, x)
    grad_w = [np.zeros_like(w) for w in weights]
    grad_b = [np.zeros_like(b) for b in biases]
    delta = (activations[-1] - target) * activations[-1] * (1.0 - activations[-1])
    for layer in range(len(weights) - 1, -1, -1):
        grad_w[layer] = np.outer(delta, activations[layer])
        grad_b[layer] = delta
        if layer > 0:
            a = activations[layer]
            delta = (weights[layer].T @ delta) * a * (1.0 - a)
    return grad_w, grad_b


def class_codewords(n_classes: int) -> np.ndarray:
    """Codeword matrix: class i sets bits 2i and 2i+1 of 2*n_classes."""
    codes = np.zeros((n_classes, BITS_PER_CLASS * n_classes))
    for i in range(n_classes):
        codes[i, BITS_PER_CLASS * i : BITS_PER_CLASS * (i + 1)] = 1.0
    return codes


@dataclass(frozen=True, eq=False)
class MlpModel:
    schema: tuple[str, ...]
    classes: tuple[str, ...]
    layer_sizes: tuple[int, ...]
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    scaling: FeatureScaling
    epochs_run: int
    stop_reason: str

    def codewords(self) -> np.ndarray:
        return class_codewords(len(self.classes))


def train_mlp(
    vectors: Sequence[FeatureVector],
    labels: Sequence[str],
    cfg: TrainConfig,
) -> MlpModel:
    """Train on [0,1]-scaled features with early stopping.

    Deterministic for a fixed (data, config) pair: initialization, the
    validation split, and every epoch's sample order come from cfg.seed.
    """
    cfg.validate()
    if len(vectors) != len(labels):
        raise ValueError("vectors and labels differ in length")
    if len(vectors) < 10:
        raise ValueError("network training needs at least 10 samples")
    schema = vectors[0].schema
    for v in vectors:
        if v.schema != schema:
            raise SchemaError("training vectors must share one schema")
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise ValueError("network training needs at least 2 classes")

    X_raw = np.array([v.values for v in vectors], dtype=float)
    scaling = FeatureScaling.fit(X_raw)
    X = scaling.transform(X_raw)
    codes = class_codewords(len(classes))
    index = {c: i for i, c in enumerate(classes)}
    targets = codes[[index[l] for l in labels]]

    rng = np.random.default_rng(cfg.seed)
    sizes = (X.shape[1], *HIDDEN_SIZES, BITS_PER_CLASS * len(classes))
    weights, biases = init_layers(sizes, rng)

    order = rng.permutation(len(X))
    n_val = int(round(cfg.nn_validation_fraction * len(X)))
    if n_val == 0 or n_val == len(X):
        raise ConfigError(
            f"validation fraction {cfg.nn_validation_fraction} leaves an empty split"
        )
    val_idx, train_idx = order[:n_val], order[n_val:]

    def validation_loss() -> float:
        return float(
            np.mean([sample_loss(weights, biases, X[i], targets[i]) for i in val_idx])
        )

    best_loss = np.inf
    best_state: Optional[tuple[list[np.ndarray], list[np.ndarray]]] = None
    bad_epochs = 0
    epochs_run = 0
    stop_reason = "max_epochs"
    lr = cfg.nn_learning_rate

    for epoch in range(1, cfg.nn_max_epochs + 1):
        for i in rng.permutation(train_idx):
            grad_w, grad_b = backprop_gradients(weights, biases, X[i], targets[i])
            for layer in range(len(weights)):
                weights[layer] -= lr * grad_w[layer]
                biases[layer] -= lr * grad_b[layer]
        epochs_run = epoch
        loss = validation_loss()
        if loss < best_loss:
            best_loss = loss
            best_state = ([w.copy() for w in weights], [b.copy() for b in biases])
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= cfg.nn_patience:
                stop_reason = "patience"
                break

    if best_state is not None:
        weights, biases = best_state
    return MlpModel(
        schema=schema,
        classes=classes,
        layer_sizes=sizes,
        weights=tuple(w.copy() for w in weights),
        biases=tuple(b.copy() for b in biases),
        scaling=scaling,
        epochs_run=epochs_run,
        stop_reason=stop_reason,
    )


def mlp_outputs(model: MlpModel, v: FeatureVector) -> np.ndarray:
    if v.schema != model.schema:
        raise SchemaError("vector schema does not match the model")
    x = model.scaling.transform(v.as_array()[np.newaxis, :])[0]
    return forward_pass(list(model.weights), list(model.biases), x)[-1]


def predict_mlp(model: MlpModel, v: FeatureVector) -> str:
    """Decode the output bit string to the nearest class codeword.

    Hamming distance on thresholded bits decides; ties fall back to the
    squared distance between raw outputs and codewords, then to the lower
    class index.
    """
    out = mlp_outputs(model, v)
    bits = (out > 0.5).astype(float)
    codes = model.codewords()
    hamming = np.abs(codes - bits).sum(axis=1)
    squared = ((codes - out) ** 2).sum(axis=1)
    best = min(
        range(len(model.classes)),
        key=lambda i: (hamming[i], squared[i], i),
    )
    return model.classes[best]


def mlp_to_payload(model: MlpModel) -> dict:
    return {
        "classes": list(model.classes),
        "layer_sizes": list(model.layer_sizes),
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "scaling": {"minimum": list(model.scaling.minimum),
                    "maximum": list(model.scaling.maximum)},
        "epochs_run": model.epochs_run,
        "stop_reason": model.stop_reason,
    }


def mlp_from_payload(data: dict, schema: Sequence[str]) -> MlpModel:
    return MlpModel(
        schema=tuple(schema),
        classes=tuple(data["classes"]),
        layer_sizes=tuple(int(s) for s in data["layer_sizes"]),
        weights=tuple(np.array(w, dtype=float) for w in data["weights"]),
        biases=tuple(np.array(b, dtype=float) for b in data["biases"]),
        scaling=FeatureScaling(
            tuple(float(x) for x in data["scaling"]["minimum"]),
            tuple(float(x) for x in data["scaling"]["maximum"]),
        ),
        epochs_run=int(data["epochs_run"]),
        stop_reason=str(data["stop_reason"]),
    )

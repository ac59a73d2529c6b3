"""Feedforward perceptron with 1 or 2 hidden layers, trained by online gradient descent.

Logistic sigmoid at every unit, squared-error loss against one-hot targets
((1, 0) for class 1, (0, 1) for class 0), per-pattern updates in a seeded
shuffled order. The reported epoch loss is sum of squared errors over the
epoch divided by 2N. Training stops early once that drops below 1e-4.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels, normalization
from .dataset import LabeledDataset
from .errors import InvalidArgumentError

MSE_STOP = 1e-4
LR_FLOOR = 0.01


@dataclass(frozen=True)
class MlpConfig:
    iterations: int = 10_000
    initial_learning_rate: float = 0.3
    learning_rate_decrement: float = 0.001
    seed: int = 0

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise InvalidArgumentError("iterations must be >= 1")
        if not (self.initial_learning_rate > 0):
            raise InvalidArgumentError("initial_learning_rate must be positive")
        if self.learning_rate_decrement < 0:
            raise InvalidArgumentError("learning_rate_decrement must be >= 0")
        if self.seed < 0:
            raise InvalidArgumentError("seed must be a non-negative integer")


@dataclass
class MlpModel:
    topology: list[int]
    weights: list[np.ndarray]   # per layer, fan_in x fan_out
    biases: list[np.ndarray]
    norm_mean: np.ndarray
    norm_scale: np.ndarray
    train_time_s: float = 0.0
    final_loss: float | None = None
    epochs_run: int = 0

    def descriptor(self) -> str:
        return "-".join(str(s) for s in self.topology)


def _validate_topology(topology) -> list[int]:
    sizes = [int(s) for s in topology]
    if len(sizes) not in (3, 4):
        raise InvalidArgumentError(
            f"topology must have 1 or 2 hidden layers, got {len(sizes) - 2}"
        )
    if any(s < 1 for s in sizes):
        raise InvalidArgumentError("every layer size must be >= 1")
    if sizes[-1] != 2:
        raise InvalidArgumentError(f"output layer must have 2 units, got {sizes[-1]}")
    return sizes


def init_mlp(topology, seed: int = 0) -> MlpModel:
    """Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero."""
    sizes = _validate_topology(topology)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0]))
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = 1.0 / np.sqrt(fan_in)
        weights.append(np.ascontiguousarray(rng.uniform(-limit, limit, (fan_in, fan_out))))
        biases.append(np.zeros(fan_out))
    return MlpModel(sizes, weights, biases, np.zeros(sizes[0]), np.ones(sizes[0]))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-z))


def forward(model: MlpModel, x) -> np.ndarray:
    """Output activations, both strictly inside (0, 1)."""
    vec = np.asarray(getattr(x, "features", x), dtype=np.float64)
    if vec.shape != (model.topology[0],):
        raise InvalidArgumentError(
            f"input shape {vec.shape} does not match input layer {model.topology[0]}"
        )
    a = normalization.apply(vec, model.norm_mean, model.norm_scale)
    for w, b in zip(model.weights, model.biases):
        a = _sigmoid(a @ w + b)
    return a


def predict(model: MlpModel, x) -> int:
    out = forward(model, x)
    return 1 if out[0] >= out[1] else 0


def predict_labels(model: MlpModel, dataset) -> np.ndarray:
    """Per-record predictions, same arithmetic path as single-pattern predict."""
    records = dataset.records if isinstance(dataset, LabeledDataset) else dataset
    return np.array([predict(model, r) for r in records], dtype=np.int64)


def one_hot_targets(labels: np.ndarray) -> np.ndarray:
    t = np.empty((labels.shape[0], 2))
    t[:, 0] = labels
    t[:, 1] = 1 - labels
    return t


def train_mlp(model: MlpModel, dataset: LabeledDataset, config: MlpConfig) -> MlpModel:
    """Train a copy of the model; records wall time, final loss, epochs run."""
    x = dataset.feature_matrix()
    labels = dataset.labels()
    if x.shape[1] != model.topology[0]:
        raise InvalidArgumentError(
            f"dataset dimension {x.shape[1]} does not match input layer {model.topology[0]}"
        )
    start = time.perf_counter()
    mean, scale = normalization.fit(x)
    xn = np.ascontiguousarray((x - mean) / scale)
    targets = one_hot_targets(labels)
    ws = [w.copy() for w in model.weights]
    bs = [b.copy() for b in model.biases]
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 1]))
    n = x.shape[0]
    mse = None
    epochs_run = config.iterations
    for epoch in range(config.iterations):
        lr = max(
            config.initial_learning_rate - epoch * config.learning_rate_decrement,
            LR_FLOOR,
        )
        order = rng.permutation(n).astype(np.intp, copy=False)
        mse = _kernels.mlp_epoch(ws, bs, xn, targets, order, lr)
        if mse < MSE_STOP:
            epochs_run = epoch + 1
            break
    elapsed = time.perf_counter() - start
    return MlpModel(list(model.topology), ws, bs, mean, scale, elapsed, mse, epochs_run)


def _sample_loss(ws, bs, xn: np.ndarray, target: np.ndarray) -> float:
    a = xn
    for w, b in zip(ws, bs):
        a = _sigmoid(a @ w + b)
    e = a - target
    return float(e @ e)


def gradient_check(model: MlpModel, x, target, step: float = 1e-5) -> float:
    """Max relative discrepancy between the training gradient and central differences.

    The analytic gradient is recovered from the actual update kernel (one
    pattern, unit learning rate), so this exercises whichever backend is live.
    """
    vec = np.asarray(getattr(x, "features", x), dtype=np.float64)
    xn = np.ascontiguousarray(normalization.apply(vec, model.norm_mean, model.norm_scale))
    t = np.ascontiguousarray(target, dtype=np.float64)
    _, gws, gbs = _kernels.mlp_grad(model.weights, model.biases, xn, t)

    worst = 0.0
    for layer in range(len(model.weights)):
        for arrs, grads in ((model.weights, gws), (model.biases, gbs)):
            theta = arrs[layer]
            analytic = grads[layer]
            it = np.nditer(theta, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                saved = theta[idx]
                theta[idx] = saved + step
                up = _sample_loss(model.weights, model.biases, xn, t)
                theta[idx] = saved - step
                down = _sample_loss(model.weights, model.biases, xn, t)
                theta[idx] = saved
                fd = (up - down) / (2.0 * step)
                ga = analytic[idx]
                rel = abs(ga - fd) / max(1.0, abs(ga), abs(fd))
                if rel > worst:
                    worst = rel
    return worst


def save_mlp(path, model: MlpModel) -> None:
    doc = {
        "format": "weldmon-mlp",
        "version": 1,
        "topology": model.topology,
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "norm_mean": model.norm_mean.tolist(),
        "norm_scale": model.norm_scale.tolist(),
        "train_time_s": model.train_time_s,
        "final_loss": model.final_loss,
        "epochs_run": model.epochs_run,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_mlp(path) -> MlpModel:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != "weldmon-mlp":
        raise InvalidArgumentError(f"{path}: not an mlp model file")
    if doc.get("version") != 1:
        raise InvalidArgumentError(f"{path}: unsupported mlp model version {doc.get('version')!r}")
    return MlpModel(
        topology=[int(s) for s in doc["topology"]],
        weights=[np.ascontiguousarray(w, dtype=np.float64) for w in doc["weights"]],
        biases=[np.ascontiguousarray(b, dtype=np.float64) for b in doc["biases"]],
        norm_mean=np.asarray(doc["norm_mean"], dtype=np.float64),
        norm_scale=np.asarray(doc["norm_scale"], dtype=np.float64),
        train_time_s=float(doc["train_time_s"]),
        final_loss=None if doc["final_loss"] is None else float(doc["final_loss"]),
        epochs_run=int(doc["epochs_run"]),
    )

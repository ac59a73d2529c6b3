"""Radial basis network: k-means centers, nearest-neighbor widths, trained linear output.

Center placement runs Lloyd's algorithm from distance-weighted seeded starts.
Widths come from each center's nearest-other-center distance times
width_factor. Only the output layer is trained, by per-pattern gradient
descent on squared error plus an L2 penalty on the non-bias output weights,
under the same learning-rate schedule contract as the perceptron trainer.
Gaussian activations are precomputed once because centers stay frozen, which
is what makes this trainer cheap per epoch.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels, normalization
from .dataset import LabeledDataset
from .errors import InvalidArgumentError
from .mlp import MSE_STOP, LR_FLOOR, one_hot_targets
from .som import as_matrix

KMEANS_MAX_ITER = 300


@dataclass(frozen=True)
class RbfConfig:
    n_centers: int = 95
    iterations: int = 10_000
    initial_learning_rate: float = 0.3
    learning_rate_decrement: float = 0.001
    regularization: float = 0.3
    width_factor: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_centers < 1:
            raise InvalidArgumentError("n_centers must be >= 1")
        if self.iterations < 1:
            raise InvalidArgumentError("iterations must be >= 1")
        if not (self.initial_learning_rate > 0):
            raise InvalidArgumentError("initial_learning_rate must be positive")
        if self.learning_rate_decrement < 0:
            raise InvalidArgumentError("learning_rate_decrement must be >= 0")
        if self.regularization < 0:
            raise InvalidArgumentError("regularization must be >= 0")
        if not (self.width_factor > 0):
            raise InvalidArgumentError("width_factor must be positive")
        if self.seed < 0:
            raise InvalidArgumentError("seed must be a non-negative integer")


@dataclass
class KMeansResult:
    centers: np.ndarray
    assignments: np.ndarray
    inertia_history: list
    iterations: int


@dataclass
class RbfModel:
    centers: np.ndarray          # (n_centers, feature_dim), normalized space
    widths: np.ndarray
    output_weights: np.ndarray   # (n_centers + 1, 2); row 0 is the bias
    norm_mean: np.ndarray
    norm_scale: np.ndarray
    train_time_s: float = 0.0
    final_loss: float | None = None
    epochs_run: int = 0

    def descriptor(self) -> str:
        return f"{self.centers.shape[1]}-{self.centers.shape[0]}-2"


def _expansion_sq_dists(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = (
        np.einsum("ij,ij->i", x, x)[:, None]
        + np.einsum("ij,ij->i", centers, centers)[None, :]
        - 2.0 * (x @ centers.T)
    )
    np.maximum(d2, 0.0, out=d2)
    return d2


def kmeans(data, k: int, seed: int = 0) -> KMeansResult:
    """Lloyd's iterations from distance-weighted seeded centers.

    Empty clusters are re-seeded to the point currently farthest from its
    center, so within-cluster sum of squares never increases. Stops when
    assignments repeat or after 300 iterations.
    """
    x = as_matrix(data)
    n = x.shape[0]
    if k < 1:
        raise InvalidArgumentError("k must be >= 1")
    if k > n:
        raise InvalidArgumentError(f"k={k} exceeds the {n} available points")

    rng = np.random.default_rng(np.random.SeedSequence([seed, 0]))
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[int(rng.integers(n))]
    d2 = _expansion_sq_dists(x, centers[:1])[:, 0]
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        centers[j] = x[idx]
        np.minimum(d2, _expansion_sq_dists(x, centers[j : j + 1])[:, 0], out=d2)

    prev = None
    history: list[float] = []
    for _ in range(KMEANS_MAX_ITER):
        dists = _expansion_sq_dists(x, centers)
        assign = dists.argmin(axis=1)
        if prev is not None and np.array_equal(assign, prev):
            break
        counts = np.bincount(assign, minlength=k)
        empties = np.flatnonzero(counts == 0)
        if empties.size:
            point_d = dists[np.arange(n), assign]
            for c in empties:
                p = int(point_d.argmax())
                assign[p] = c
                point_d[p] = 0.0
            counts = np.bincount(assign, minlength=k)
        sums = np.zeros_like(centers)
        np.add.at(sums, assign, x)
        centers = sums / counts[:, None]
        diff = x - centers[assign]
        history.append(float(np.einsum("ij,ij->", diff, diff)))
        prev = assign
    return KMeansResult(centers, prev, history, len(history))


def compute_widths(centers: np.ndarray, width_factor: float = 1.0) -> np.ndarray:
    """width_factor times each center's nearest-other-center distance.

    A zero nearest distance (duplicate centers) is replaced by the mean of the
    positive nearest distances; all-identical centers are an error.
    """
    centers = np.asarray(centers, dtype=np.float64)
    if centers.shape[0] < 2:
        raise InvalidArgumentError("need at least 2 centers for the width rule")
    d2 = _expansion_sq_dists(centers, centers)
    np.fill_diagonal(d2, np.inf)
    nn = np.sqrt(d2.min(axis=1))
    positive = nn[nn > 0]
    if positive.size == 0:
        raise InvalidArgumentError("all centers are identical; widths undefined")
    if positive.size < nn.size:
        nn = np.where(nn == 0, positive.mean(), nn)
    return width_factor * nn


def _phi_row(centers: np.ndarray, widths: np.ndarray, xn: np.ndarray) -> np.ndarray:
    diff = centers - xn
    d2 = np.einsum("ij,ij->i", diff, diff)
    return np.exp(-d2 / (2.0 * widths * widths))


def rbf_features(model: RbfModel, x) -> np.ndarray:
    """Gaussian activation per center for one pattern, in (0, 1]."""
    vec = np.asarray(getattr(x, "features", x), dtype=np.float64)
    if vec.shape != (model.centers.shape[1],):
        raise InvalidArgumentError(
            f"input shape {vec.shape} does not match feature dimension {model.centers.shape[1]}"
        )
    xn = normalization.apply(vec, model.norm_mean, model.norm_scale)
    return _phi_row(model.centers, model.widths, xn)


def train_rbf(dataset: LabeledDataset, config: RbfConfig) -> RbfModel:
    """Place centers, freeze them, then fit the output layer. Records wall time."""
    x = dataset.feature_matrix()
    labels = dataset.labels()
    if x.shape[0] < config.n_centers:
        raise InvalidArgumentError(
            f"{x.shape[0]} training patterns cannot support {config.n_centers} centers"
        )
    start = time.perf_counter()
    mean, scale = normalization.fit(x)
    xn = np.ascontiguousarray((x - mean) / scale)
    km = kmeans(xn, config.n_centers, config.seed)
    widths = compute_widths(km.centers, config.width_factor)

    n = xn.shape[0]
    phi = np.empty((n, config.n_centers))
    for i in range(n):
        phi[i] = _phi_row(km.centers, widths, xn[i])
    targets = one_hot_targets(labels)
    wout = np.zeros((config.n_centers + 1, 2))
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 1]))
    # the penalty is split across patterns so one epoch applies the configured
    # coefficient once, not n times
    l2 = config.regularization / n
    mse = None
    epochs_run = config.iterations
    for epoch in range(config.iterations):
        lr = max(
            config.initial_learning_rate - epoch * config.learning_rate_decrement,
            LR_FLOOR,
        )
        order = rng.permutation(n).astype(np.intp, copy=False)
        mse = _kernels.linear_epoch(wout, phi, targets, order, lr, l2)
        if mse < MSE_STOP:
            epochs_run = epoch + 1
            break
    elapsed = time.perf_counter() - start
    return RbfModel(km.centers, widths, wout, mean, scale, elapsed, mse, epochs_run)


def output_values(model: RbfModel, x) -> np.ndarray:
    phi = rbf_features(model, x)
    return model.output_weights[0] + phi @ model.output_weights[1:]


def predict(model: RbfModel, x) -> int:
    out = output_values(model, x)
    return 1 if out[0] >= out[1] else 0


def predict_labels(model: RbfModel, dataset) -> np.ndarray:
    records = dataset.records if isinstance(dataset, LabeledDataset) else dataset
    return np.array([predict(model, r) for r in records], dtype=np.int64)


def save_rbf(path, model: RbfModel) -> None:
    doc = {
        "format": "weldmon-rbf",
        "version": 1,
        "centers": model.centers.tolist(),
        "widths": model.widths.tolist(),
        "output_weights": model.output_weights.tolist(),
        "norm_mean": model.norm_mean.tolist(),
        "norm_scale": model.norm_scale.tolist(),
        "train_time_s": model.train_time_s,
        "final_loss": model.final_loss,
        "epochs_run": model.epochs_run,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_rbf(path) -> RbfModel:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != "weldmon-rbf":
        raise InvalidArgumentError(f"{path}: not an rbf model file")
    if doc.get("version") != 1:
        raise InvalidArgumentError(f"{path}: unsupported rbf model version {doc.get('version')!r}")
    return RbfModel(
        centers=np.ascontiguousarray(doc["centers"], dtype=np.float64),
        widths=np.asarray(doc["widths"], dtype=np.float64),
        output_weights=np.ascontiguousarray(doc["output_weights"], dtype=np.float64),
        norm_mean=np.asarray(doc["norm_mean"], dtype=np.float64),
        norm_scale=np.asarray(doc["norm_scale"], dtype=np.float64),
        train_time_s=float(doc["train_time_s"]),
        final_loss=None if doc["final_loss"] is None else float(doc["final_loss"]),
        epochs_run=int(doc["epochs_run"]),
    )

"""Self-organizing map on a 1-D chain, with the least-weight-std labeling rule.

Classic online updates: the best matching unit and every unit within the
current chain radius move toward each pattern by the current learning rate
(bubble neighborhood). Radius shrinks by a fixed decrement per epoch, the
learning rate decays linearly to a floor of 0.01, and training stops when no
weight component moves more than convergence_epsilon in a full epoch.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

import numpy as np

from . import _kernels, normalization
from .dataset import LabeledDataset, from_feature_vectors
from .errors import EmptyInputError, InvalidArgumentError
from .signal_processing import FeatureVector

ALPHA_FLOOR = 0.01


@dataclass(frozen=True)
class SomConfig:
    n_clusters: int = 9
    initial_learning_rate: float = 0.3
    initial_radius: float = 5.0
    radius_decrement: float = 0.1
    convergence_epsilon: float = 1e-6
    max_epochs: int = 500
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_clusters < 1:
            raise InvalidArgumentError("n_clusters must be >= 1")
        if not (self.initial_learning_rate > 0):
            raise InvalidArgumentError("initial_learning_rate must be positive")
        if not (self.initial_radius > 0):
            raise InvalidArgumentError("initial_radius must be positive")
        if self.radius_decrement < 0:
            raise InvalidArgumentError("radius_decrement must be >= 0")
        if not (self.convergence_epsilon > 0):
            raise InvalidArgumentError("convergence_epsilon must be positive")
        if self.max_epochs < 1:
            raise InvalidArgumentError("max_epochs must be >= 1")
        if self.seed < 0:
            raise InvalidArgumentError("seed must be a non-negative integer")


@dataclass
class SomModel:
    weights: np.ndarray       # (n_clusters, feature_dim), normalized space
    grid_coords: np.ndarray   # chain coordinates, one per cluster
    norm_mean: np.ndarray
    norm_scale: np.ndarray
    config: SomConfig
    epochs_run: int
    qe_history: list = field(default_factory=list)


@dataclass
class ClusterLabeling:
    desirable: np.ndarray     # bool per cluster
    weight_std: np.ndarray    # std over each cluster's weight components
    k_desirable: int


def as_matrix(data) -> np.ndarray:
    """Coerce FeatureVector sequences, LabeledDatasets, or arrays to (n, d) float64."""
    if isinstance(data, LabeledDataset):
        return data.feature_matrix()
    if isinstance(data, np.ndarray):
        mat = np.ascontiguousarray(data, dtype=np.float64)
    else:
        rows = [fv.features if isinstance(fv, FeatureVector) else fv for fv in data]
        if not rows:
            raise EmptyInputError("no patterns")
        try:
            mat = np.ascontiguousarray(rows, dtype=np.float64)
        except ValueError as exc:
            raise InvalidArgumentError(f"patterns have mismatched dimensions ({exc})") from exc
    if mat.ndim != 2 or mat.shape[0] == 0:
        raise EmptyInputError("no patterns")
    return mat


def train_som(data, config: SomConfig) -> SomModel:
    x = as_matrix(data)
    n, d = x.shape
    mean, scale = normalization.fit(x)
    xn = np.ascontiguousarray((x - mean) / scale)

    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0]))
    lo = xn.min(axis=0)
    hi = xn.max(axis=0)
    weights = np.ascontiguousarray(rng.uniform(lo, hi, size=(config.n_clusters, d)))
    coords = np.arange(config.n_clusters, dtype=np.intp)

    alpha_span = config.initial_learning_rate - ALPHA_FLOOR
    qe_history: list[float] = []
    epochs_run = config.max_epochs
    for epoch in range(config.max_epochs):
        alpha = max(
            config.initial_learning_rate - epoch * alpha_span / config.max_epochs,
            ALPHA_FLOOR,
        )
        radius = max(config.initial_radius - epoch * config.radius_decrement, 0.0)
        order = rng.permutation(n).astype(np.intp, copy=False)
        before = weights.copy()
        _kernels.som_epoch(weights, xn, order, alpha, radius, coords)
        qe_history.append(float(_quantization_error(weights, xn)))
        if np.abs(weights - before).max() < config.convergence_epsilon:
            epochs_run = epoch + 1
            break
    return SomModel(weights, coords, mean, scale, config, epochs_run, qe_history)


def _quantization_error(weights: np.ndarray, xn: np.ndarray) -> float:
    d2 = _sq_distances(weights, xn)
    return float(d2.min(axis=1).sum())


def _sq_distances(weights: np.ndarray, xn: np.ndarray) -> np.ndarray:
    # (n, k) squared distances, chunked; same elementwise arithmetic as
    # best_matching_unit so batch assignments never disagree with single probes
    n = xn.shape[0]
    out = np.empty((n, weights.shape[0]))
    step = 4096
    for start in range(0, n, step):
        block = xn[start : start + step]
        diff = weights[None, :, :] - block[:, None, :]
        out[start : start + block.shape[0]] = np.einsum("nkd,nkd->nk", diff, diff)
    return out


def _check_dim(model: SomModel, d: int) -> None:
    if d != model.weights.shape[1]:
        raise InvalidArgumentError(
            f"pattern dimension {d} does not match model dimension {model.weights.shape[1]}"
        )


def best_matching_unit(model: SomModel, x) -> int:
    vec = x.features if isinstance(x, FeatureVector) else np.asarray(x, dtype=np.float64)
    _check_dim(model, vec.shape[-1])
    xn = normalization.apply(vec, model.norm_mean, model.norm_scale)
    diff = model.weights - xn
    return int(np.argmin(np.einsum("ij,ij->i", diff, diff)))


def assign_clusters(model: SomModel, data) -> np.ndarray:
    x = as_matrix(data)
    _check_dim(model, x.shape[1])
    xn = (x - model.norm_mean) / model.norm_scale
    return _sq_distances(model.weights, xn).argmin(axis=1)


def cluster_counts(model: SomModel, data) -> np.ndarray:
    if len(data) == 0:
        return np.zeros(model.weights.shape[0], dtype=np.int64)
    bmus = assign_clusters(model, data)
    return np.bincount(bmus, minlength=model.weights.shape[0]).astype(np.int64)


def label_clusters(model: SomModel, k_desirable: int = 2) -> ClusterLabeling:
    """Flag the k clusters whose weight components have the smallest spread.

    A steady-pattern cluster's weight is near-constant across components, so
    its std is small; clusters shaped by bursts carry large component spread.
    Ties resolve toward the lower cluster index.
    """
    k = model.weights.shape[0]
    if not (1 <= k_desirable < k):
        raise InvalidArgumentError(f"k_desirable must be in [1, {k - 1}], got {k_desirable}")
    stds = model.weights.std(axis=1)
    order = np.argsort(stds, kind="stable")
    desirable = np.zeros(k, dtype=bool)
    desirable[order[:k_desirable]] = True
    return ClusterLabeling(desirable, stds, k_desirable)


def label_dataset(model: SomModel, labeling: ClusterLabeling, data) -> LabeledDataset:
    """Attach 1 (desirable BMU) or 0 labels to every pattern."""
    bmus = assign_clusters(model, data)
    labels = labeling.desirable[bmus].astype(np.int64)
    if isinstance(data, LabeledDataset):
        return data.with_labels(labels)
    return from_feature_vectors(list(data), labels)


def save_som(path, model: SomModel) -> None:
    doc = {
        "format": "weldmon-som",
        "version": 1,
        "config": asdict(model.config),
        "grid_coords": [int(c) for c in model.grid_coords],
        "norm_mean": model.norm_mean.tolist(),
        "norm_scale": model.norm_scale.tolist(),
        "weights": model.weights.tolist(),
        "epochs_run": model.epochs_run,
        "qe_history": model.qe_history,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_som(path) -> SomModel:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != "weldmon-som":
        raise InvalidArgumentError(f"{path}: not a som model file")
    if doc.get("version") != 1:
        raise InvalidArgumentError(f"{path}: unsupported som model version {doc.get('version')!r}")
    return SomModel(
        weights=np.ascontiguousarray(doc["weights"], dtype=np.float64),
        grid_coords=np.asarray(doc["grid_coords"], dtype=np.intp),
        norm_mean=np.asarray(doc["norm_mean"], dtype=np.float64),
        norm_scale=np.asarray(doc["norm_scale"], dtype=np.float64),
        config=SomConfig(**doc["config"]),
        epochs_run=int(doc["epochs_run"]),
        qe_history=list(doc["qe_history"]),
    )

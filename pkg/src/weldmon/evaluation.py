"""Splits, confusion-matrix metrics, and model comparison.

The positive class is "desirable" (label 1) throughout: sensitivity is the
fraction of desirable patterns recognized, specificity the fraction of
undesirable patterns recognized. Ratios with a zero denominator are reported
as None rather than a number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset
from .errors import EmptyInputError, InvalidArgumentError


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise InvalidArgumentError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass
class EvalReport:
    confusion: ConfusionMatrix
    sensitivity: float | None
    specificity: float | None
    accuracy_percent: float
    training_time_seconds: float
    model_descriptor: str


def split_dataset(
    dataset: LabeledDataset,
    train_fraction: float,
    mode: str = "ordered",
    seed: int = 0,
) -> tuple[LabeledDataset, LabeledDataset]:
    """Disjoint train/test partition.

    Ordered mode keeps dataset order and trains on the first ceil(N*fraction)
    records; shuffled mode permutes with the seed first. Fractions that land
    within 1e-9 of an integer count snap to it instead of being pushed up by
    float error (10 records at 0.7 give 7, not 8).
    """
    n = len(dataset)
    if n == 0:
        raise EmptyInputError("cannot split an empty dataset")
    if not (0.0 < train_fraction < 1.0):
        raise InvalidArgumentError(f"train_fraction must be in (0, 1), got {train_fraction}")
    if mode not in ("ordered", "shuffled"):
        raise InvalidArgumentError(f"mode must be 'ordered' or 'shuffled', got {mode!r}")
    if n < 2:
        raise InvalidArgumentError("need at least 2 records to split")
    raw = n * train_fraction
    nearest = round(raw)
    train_n = nearest if abs(raw - nearest) <= 1e-9 else math.ceil(raw)
    train_n = min(max(train_n, 1), n - 1)
    records = dataset.records
    if mode == "shuffled":
        perm = np.random.default_rng(seed).permutation(n)
        records = [records[i] for i in perm]
    return LabeledDataset(records[:train_n]), LabeledDataset(records[train_n:])


def confusion(predictions, truths) -> ConfusionMatrix:
    preds = np.asarray(predictions, dtype=np.int64)
    trues = np.asarray(truths, dtype=np.int64)
    if preds.shape != trues.shape or preds.ndim != 1:
        raise InvalidArgumentError(
            f"prediction/truth shapes differ: {preds.shape} vs {trues.shape}"
        )
    for name, arr in (("predictions", preds), ("truths", trues)):
        if not np.isin(arr, (0, 1)).all():
            raise InvalidArgumentError(f"{name} must be binary 0/1")
    return ConfusionMatrix(
        tp=int(((preds == 1) & (trues == 1)).sum()),
        fp=int(((preds == 1) & (trues == 0)).sum()),
        tn=int(((preds == 0) & (trues == 0)).sum()),
        fn=int(((preds == 0) & (trues == 1)).sum()),
    )


def metrics(cm: ConfusionMatrix) -> tuple[float | None, float | None, float]:
    """(sensitivity, specificity, accuracy_percent); None marks an undefined ratio."""
    if cm.total == 0:
        raise EmptyInputError("confusion matrix is empty")
    sens = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn > 0 else None
    spec = cm.tn / (cm.tn + cm.fp) if cm.tn + cm.fp > 0 else None
    acc = 100.0 * (cm.tp + cm.tn) / cm.total
    return sens, spec, acc


def build_report(
    predictions,
    truths,
    model_descriptor: str,
    training_time_seconds: float = 0.0,
) -> EvalReport:
    cm = confusion(predictions, truths)
    sens, spec, acc = metrics(cm)
    return EvalReport(cm, sens, spec, acc, training_time_seconds, model_descriptor)


def compare_models(reports: list[EvalReport]) -> list[EvalReport]:
    """Rows sorted by accuracy, best first; equal accuracies keep input order."""
    if len(reports) < 2:
        raise InvalidArgumentError("comparison needs at least 2 reports")
    return sorted(reports, key=lambda r: -r.accuracy_percent)


def report_to_dict(report: EvalReport) -> dict:
    return {
        "model": report.model_descriptor,
        "tp": report.confusion.tp,
        "fp": report.confusion.fp,
        "tn": report.confusion.tn,
        "fn": report.confusion.fn,
        "sensitivity": report.sensitivity,
        "specificity": report.specificity,
        "accuracy_percent": report.accuracy_percent,
        "training_time_seconds": report.training_time_seconds,
    }


def _fmt(value: float | None, digits: int) -> str:
    return "undefined" if value is None else f"{value:.{digits}f}"


def format_comparison(reports: list[EvalReport]) -> str:
    """Aligned text table over the standard four columns plus the network name."""
    rows = [("Network", "Sensitivity", "Specificity", "Accuracy%", "Time(s)")]
    for r in reports:
        rows.append(
            (
                r.model_descriptor,
                _fmt(r.sensitivity, 4),
                _fmt(r.specificity, 4),
                _fmt(r.accuracy_percent, 2),
                f"{r.training_time_seconds:.2f}",
            )
        )
    widths = [max(len(row[c]) for row in rows) for c in range(5)]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines)

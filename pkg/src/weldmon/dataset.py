"""Labeled pattern database and its CSV on-disk form."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInputError, InvalidArgumentError
from .signal_processing import FeatureVector, Provenance


@dataclass
class LabeledRecord:
    """One pattern with its provenance and, once assigned, a binary class label."""

    features: np.ndarray
    label: int | None
    provenance: Provenance


class LabeledDataset:
    """Ordered collection of records; order is meaningful (ordered splits rely on it)."""

    def __init__(self, records: list[LabeledRecord]):
        self.records = list(records)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, key):
        if isinstance(key, slice):
            return LabeledDataset(self.records[key])
        return self.records[key]

    def feature_matrix(self) -> np.ndarray:
        if not self.records:
            raise EmptyInputError("dataset has no records")
        return np.ascontiguousarray([r.features for r in self.records], dtype=np.float64)

    def labels(self) -> np.ndarray:
        out = np.empty(len(self.records), dtype=np.int64)
        for i, r in enumerate(self.records):
            if r.label not in (0, 1):
                raise InvalidArgumentError(
                    f"record {i} has label {r.label!r}; expected 0 or 1"
                )
            out[i] = r.label
        return out

    def with_labels(self, labels) -> "LabeledDataset":
        labels = list(labels)
        if len(labels) != len(self.records):
            raise InvalidArgumentError(
                f"{len(labels)} labels for {len(self.records)} records"
            )
        return LabeledDataset(
            [
                LabeledRecord(r.features, int(lab), r.provenance)
                for r, lab in zip(self.records, labels)
            ]
        )


def from_feature_vectors(vectors: list[FeatureVector], labels=None) -> LabeledDataset:
    if labels is None:
        labels = [None] * len(vectors)
    if len(labels) != len(vectors):
        raise InvalidArgumentError(f"{len(labels)} labels for {len(vectors)} vectors")
    records = []
    for fv, lab in zip(vectors, labels):
        records.append(
            LabeledRecord(
                np.asarray(fv.features, dtype=np.float64),
                None if lab is None else int(lab),
                fv.provenance,
            )
        )
    return LabeledDataset(records)


def write_dataset_csv(path, dataset: LabeledDataset) -> None:
    """Header: welder_id,trial,segment_index,label,f0,...  Label cell empty when unset."""
    if len(dataset) == 0:
        raise EmptyInputError("refusing to write an empty dataset")
    dim = dataset.records[0].features.shape[0]
    header = ["welder_id", "trial", "segment_index", "label"] + [f"f{i}" for i in range(dim)]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in dataset:
            row = [
                r.provenance.welder_id,
                r.provenance.trial,
                r.provenance.segment_index,
                "" if r.label is None else r.label,
            ]
            row.extend(repr(float(v)) for v in r.features)
            writer.writerow(row)


def read_dataset_csv(path) -> LabeledDataset:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyInputError(f"{path}: empty file") from None
        if header[:4] != ["welder_id", "trial", "segment_index", "label"]:
            raise InvalidArgumentError(f"{path}: unrecognized dataset header")
        records = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise InvalidArgumentError(
                    f"{path}:{lineno}: expected {len(header)} columns, got {len(row)}"
                )
            try:
                label = None if row[3] == "" else int(row[3])
                feats = np.array([float(v) for v in row[4:]], dtype=np.float64)
                records.append(
                    LabeledRecord(feats, label, Provenance(row[0], int(row[1]), int(row[2])))
                )
            except ValueError as exc:
                raise InvalidArgumentError(f"{path}:{lineno}: {exc}") from exc
    if not records:
        raise EmptyInputError(f"{path}: no records")
    return LabeledDataset(records)

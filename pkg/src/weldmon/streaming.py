"""Real-time detector: buffer a live sample feed, classify each completed segment.

Decisions are bit-identical to the batch pipeline for any chunking of the
input, because each full segment runs through the same per-segment smoothing
and downsampling helpers and the same single-pattern predict call. A segment
containing non-finite samples is classified undesirable and flagged as a data
fault without consulting the model.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import mlp, rbf
from .errors import InvalidArgumentError
from .signal_processing import PreprocessConfig, _segment_features


@dataclass
class ErrorEvent:
    segment_index: int
    sample_offset: int
    predicted_label: int
    model: str
    data_fault: bool
    timestamp: float


class StreamingDetector:
    """Single-producer detector over a trained classifier.

    push_samples returns the (segment_index, label) decisions the new samples
    completed, plus any emitted error events. flush discards a trailing
    partial segment, mirroring the batch rule that remainders are dropped.
    """

    def __init__(self, model, config: PreprocessConfig | None = None):
        self.config = config or PreprocessConfig()
        if self.config.window > self.config.segment_len:
            raise InvalidArgumentError(
                f"window {self.config.window} exceeds segment_len {self.config.segment_len}"
            )
        if self.config.segment_len % self.config.feature_dim != 0:
            raise InvalidArgumentError(
                f"segment_len {self.config.segment_len} is not divisible by "
                f"feature_dim {self.config.feature_dim}"
            )
        if isinstance(model, mlp.MlpModel):
            self._predict = mlp.predict
            self._dim = model.topology[0]
        elif isinstance(model, rbf.RbfModel):
            self._predict = rbf.predict
            self._dim = model.centers.shape[1]
        else:
            raise InvalidArgumentError(f"unsupported model type {type(model).__name__}")
        if self._dim != self.config.feature_dim:
            raise InvalidArgumentError(
                f"model expects {self._dim} features but config produces "
                f"{self.config.feature_dim}"
            )
        self.model = model
        self.model_descriptor = model.descriptor()
        self._buffer = np.empty(self.config.segment_len)
        self._fill = 0
        self.samples_consumed = 0
        self.segments_emitted = 0
        self.events: list[ErrorEvent] = []

    def push_samples(self, samples) -> tuple[list[tuple[int, int]], list[ErrorEvent]]:
        chunk = np.asarray(samples, dtype=np.float64).ravel()
        self.samples_consumed += chunk.shape[0]
        seg_len = self.config.segment_len
        decisions: list[tuple[int, int]] = []
        new_events: list[ErrorEvent] = []
        pos = 0
        while pos < chunk.shape[0]:
            take = min(seg_len - self._fill, chunk.shape[0] - pos)
            self._buffer[self._fill : self._fill + take] = chunk[pos : pos + take]
            self._fill += take
            pos += take
            if self._fill == seg_len:
                self._fill = 0
                decisions.append(self._classify(self._buffer, new_events))
        self.events.extend(new_events)
        return decisions, new_events

    def _classify(self, segment: np.ndarray, new_events: list[ErrorEvent]) -> tuple[int, int]:
        index = self.segments_emitted
        self.segments_emitted += 1
        if not np.isfinite(segment).all():
            label = 0
            fault = True
        else:
            feats = _segment_features(segment, self.config.window, self.config.feature_dim)
            label = self._predict(self.model, feats)
            fault = False
        if label == 0:
            new_events.append(
                ErrorEvent(
                    segment_index=index,
                    sample_offset=index * self.config.segment_len,
                    predicted_label=0,
                    model=self.model_descriptor,
                    data_fault=fault,
                    timestamp=time.time(),
                )
            )
        return index, label

    def flush(self) -> int:
        """Discard any buffered partial segment; returns how many samples were dropped."""
        dropped = self._fill
        self._fill = 0
        return dropped


def event_to_dict(event: ErrorEvent) -> dict:
    return {
        "segment_index": event.segment_index,
        "sample_offset": event.sample_offset,
        "predicted_label": event.predicted_label,
        "model": event.model,
        "data_fault": event.data_fault,
    }


def batch_decisions(model, samples, config: PreprocessConfig | None = None) -> list[tuple[int, int]]:
    """Reference batch path over a whole sample array: same kernels, same predict."""
    config = config or PreprocessConfig()
    arr = np.asarray(samples, dtype=np.float64)
    n = arr.shape[0] // config.segment_len
    if isinstance(model, mlp.MlpModel):
        predict = mlp.predict
    elif isinstance(model, rbf.RbfModel):
        predict = rbf.predict
    else:
        raise InvalidArgumentError(f"unsupported model type {type(model).__name__}")
    out = []
    for i in range(n):
        seg = arr[i * config.segment_len : (i + 1) * config.segment_len]
        feats = _segment_features(seg, config.window, config.feature_dim)
        out.append((i, predict(model, feats)))
    return out

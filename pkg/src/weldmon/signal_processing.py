"""Raw voltage series to fixed-length feature vectors: filter, segment, downsample."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import EmptyInputError, InvalidArgumentError


@dataclass(frozen=True)
class Provenance:
    """Where a pattern came from: welder, trial, and segment position."""

    welder_id: str
    trial: int
    segment_index: int


@dataclass
class RawSeries:
    """A voltage waveform with sample metadata.

    samples are volts, stored as float64. source_id is an opaque tag; the
    convention "<welder_id>:<trial>" is understood downstream.
    """

    samples: np.ndarray
    sample_rate_hz: float
    source_id: str = ""

    def __post_init__(self) -> None:
        self.samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise EmptyInputError("series must be a non-empty 1-D sample array")
        if not np.isfinite(self.samples).all():
            raise InvalidArgumentError("series contains non-finite samples")
        if not (self.sample_rate_hz > 0):
            raise InvalidArgumentError("sample_rate_hz must be positive")

    def __len__(self) -> int:
        return self.samples.shape[0]


@dataclass
class Segment:
    """One fixed-length window of a series."""

    values: np.ndarray
    index: int


@dataclass
class FeatureVector:
    """A downsampled segment: the pattern unit for clustering and classification."""

    features: np.ndarray
    provenance: Provenance = field(default_factory=lambda: Provenance("", 0, 0))


@dataclass
class PreprocessConfig:
    window: int = 201
    segment_len: int = 100_000
    feature_dim: int = 50


def parse_source_id(source_id: str) -> tuple[str, int]:
    """Split a "<welder>:<trial>" tag; anything else maps to (source_id, 0)."""
    head, sep, tail = source_id.rpartition(":")
    if sep and tail.isdigit():
        return head, int(tail)
    return source_id, 0


def _smooth(values: np.ndarray, window: int) -> np.ndarray:
    # window 1 short-circuits so constants survive bit-exactly
    if window == 1:
        return values.copy()
    return _kernels.moving_average(np.ascontiguousarray(values, dtype=np.float64), window)


def moving_average_filter(series: RawSeries, window: int) -> RawSeries:
    """Centered moving-average smoothing; edge windows shrink to the available samples.

    Constant input comes back bit-exact. Sample variance does not increase
    for odd windows >= 3; even windows leave the last sample unsmoothed and
    can raise variance marginally on adversarial input.
    """
    if not isinstance(window, (int, np.integer)) or window < 1:
        raise InvalidArgumentError(f"window must be a positive integer, got {window!r}")
    if window > len(series):
        raise InvalidArgumentError(
            f"window {window} exceeds series length {len(series)}"
        )
    return RawSeries(_smooth(series.samples, int(window)), series.sample_rate_hz, series.source_id)


def segment_series(series: RawSeries, segment_len: int) -> list[Segment]:
    """Cut a series into consecutive non-overlapping blocks; the tail remainder is dropped."""
    if not isinstance(segment_len, (int, np.integer)) or segment_len < 1:
        raise InvalidArgumentError(f"segment_len must be a positive integer, got {segment_len!r}")
    n = len(series) // segment_len
    if n == 0:
        raise EmptyInputError(
            f"series of {len(series)} samples is shorter than segment_len {segment_len}"
        )
    x = series.samples
    return [Segment(x[i * segment_len : (i + 1) * segment_len], i) for i in range(n)]


def block_downsample(segment: Segment, feature_dim: int) -> FeatureVector:
    """Reduce a segment to feature_dim block means over equal contiguous blocks."""
    if not isinstance(feature_dim, (int, np.integer)) or feature_dim < 1:
        raise InvalidArgumentError(f"feature_dim must be a positive integer, got {feature_dim!r}")
    n = segment.values.shape[0]
    if n % feature_dim != 0:
        raise InvalidArgumentError(
            f"segment length {n} is not divisible by feature_dim {feature_dim}"
        )
    blocks = np.asarray(segment.values, dtype=np.float64).reshape(int(feature_dim), -1)
    base = blocks[:, 0]
    # mean of residuals against the block's first sample keeps constants bit-exact
    feats = base + (blocks - base[:, None]).mean(axis=1)
    return FeatureVector(feats, Provenance("", 0, segment.index))


def _segment_features(values: np.ndarray, window: int, feature_dim: int) -> np.ndarray:
    """Filter then block-average one raw segment. Shared by batch and streaming paths."""
    smoothed = _smooth(values, window)
    blocks = smoothed.reshape(feature_dim, -1)
    base = blocks[:, 0]
    return base + (blocks - base[:, None]).mean(axis=1)


def preprocess_series(series: RawSeries, config: PreprocessConfig) -> list[FeatureVector]:
    """Full reduction of a series: segment, smooth each segment, downsample.

    Smoothing is applied per segment (not across segment boundaries) so that a
    streaming consumer seeing one segment at a time produces identical features.
    """
    if config.window > config.segment_len:
        raise InvalidArgumentError(
            f"window {config.window} exceeds segment_len {config.segment_len}"
        )
    if config.segment_len % config.feature_dim != 0:
        raise InvalidArgumentError(
            f"segment_len {config.segment_len} is not divisible by feature_dim {config.feature_dim}"
        )
    if config.window < 1:
        raise InvalidArgumentError("window must be a positive integer")
    welder_id, trial = parse_source_id(series.source_id)
    out = []
    for seg in segment_series(series, config.segment_len):
        feats = _segment_features(seg.values, config.window, config.feature_dim)
        out.append(FeatureVector(feats, Provenance(welder_id, trial, seg.index)))
    return out


def write_raw_series(path, series: RawSeries) -> None:
    """Text format: one header line, then one decimal voltage per line."""
    lines = series.samples.astype(str)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# sample_rate_hz={series.sample_rate_hz!r} source_id={series.source_id}\n")
        fh.write("\n".join(lines))
        fh.write("\n")


def read_raw_series(path) -> RawSeries:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise InvalidArgumentError(f"{path}: missing raw-series header line")
        rate, source_id = _parse_header(header, path)
        try:
            values = np.loadtxt(fh, dtype=np.float64, ndmin=1)
        except ValueError as exc:
            raise InvalidArgumentError(f"{path}: malformed sample line ({exc})") from exc
    if values.size == 0:
        raise EmptyInputError(f"{path}: no samples")
    return RawSeries(values, rate, source_id)


def _parse_header(header: str, path) -> tuple[float, str]:
    fields = dict(
        tok.split("=", 1) for tok in header.lstrip("#").split() if "=" in tok
    )
    try:
        rate = float(fields["sample_rate_hz"])
    except (KeyError, ValueError) as exc:
        raise InvalidArgumentError(f"{path}: bad sample_rate_hz in header") from exc
    return rate, fields.get("source_id", "")

"""Synthetic arc-voltage corpus with injected instability bursts and ground truth.

Stands in for the unavailable physical dataset: Gaussian background noise
around a base arc voltage, with three parameterized burst shapes (short-circuit
dip, arc-break spike, oscillatory instability) injected per segment at a
per-welder error rate. All randomness flows from numpy's default PCG64
generator seeded per (profile.seed, trial_index), so corpora are reproducible
across machines.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import EmptyInputError, InvalidArgumentError
from .signal_processing import (
    FeatureVector,
    PreprocessConfig,
    RawSeries,
    preprocess_series,
)

SAMPLE_RATE_HZ = 20_000.0

DIP_LEVEL_RANGE_V = (1.5, 2.5)
DIP_FRACTION_RANGE = (0.10, 0.20)
SPIKE_RISE_RANGE_V = (15.0, 25.0)
SPIKE_FRACTION_RANGE = (0.30, 0.42)
OSC_CYCLES = (3.0, 7.0)


@dataclass(frozen=True)
class WelderProfile:
    welder_id: str
    error_rate: float
    base_voltage_v: float = 25.0
    noise_sd_v: float = 1.5
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 <= self.error_rate <= 1.0):
            raise InvalidArgumentError(f"error_rate {self.error_rate} outside [0, 1]")
        if self.noise_sd_v < 0:
            raise InvalidArgumentError("noise_sd_v must be >= 0")
        if not (self.base_voltage_v > 0):
            raise InvalidArgumentError("base_voltage_v must be positive")
        if self.seed < 0:
            raise InvalidArgumentError("seed must be a non-negative integer")


@dataclass
class GroundTruth:
    """Per-segment truth, aligned with segment indices; True means steady."""

    steady: np.ndarray

    def labels(self) -> np.ndarray:
        """Truth encoded the way the pattern database encodes class: 1 steady, 0 error."""
        return self.steady.astype(np.int64)


def _inject_burst(seg: np.ndarray, rng: np.random.Generator, profile: WelderProfile) -> None:
    n = seg.shape[0]
    kind = int(rng.integers(3))
    if kind == 2:
        # oscillatory instability across the whole segment; amplitude clears the
        # noise floor by 3x and stays visible even for noiseless profiles. The
        # cycle count comes from a small menu so instability episodes share a
        # handful of spectral shapes instead of smearing over a continuum.
        cycles = float(OSC_CYCLES[int(rng.integers(len(OSC_CYCLES)))])
        amp = rng.uniform(3.0 * profile.noise_sd_v + 3.0, 3.0 * profile.noise_sd_v + 5.0)
        t = np.arange(n, dtype=np.float64) / n
        seg += amp * np.sin(2.0 * np.pi * cycles * t)
        return
    # Dips and spikes anchor to a segment edge: electrode sticking happens on
    # arc strike, crater shorts and lift-off excursions at termination.  Edge
    # anchoring also gives each burst family a shared footprint, which is what
    # lets an unsupervised pass separate them from healthy welds reliably.
    if kind == 0:
        frac = rng.uniform(*DIP_FRACTION_RANGE)
        length = max(1, int(round(frac * n)))
        at_start = bool(rng.integers(2))
        level = rng.uniform(*DIP_LEVEL_RANGE_V)
        region = slice(0, length) if at_start else slice(n - length, n)
        seg[region] -= profile.base_voltage_v - level
    else:
        frac = rng.uniform(*SPIKE_FRACTION_RANGE)
        length = max(1, int(round(frac * n)))
        at_start = bool(rng.integers(2))
        region = slice(0, length) if at_start else slice(n - length, n)
        seg[region] += rng.uniform(*SPIKE_RISE_RANGE_V)


def generate_trial(
    profile: WelderProfile,
    n_segments: int,
    segment_len: int,
    trial_index: int = 0,
) -> tuple[RawSeries, GroundTruth]:
    """One welding trial: n_segments x segment_len samples plus per-segment truth.

    Pure function of (profile.seed, trial_index, arguments).
    """
    if n_segments < 1:
        raise InvalidArgumentError("n_segments must be >= 1")
    if segment_len < 1:
        raise InvalidArgumentError("segment_len must be >= 1")
    if trial_index < 0:
        raise InvalidArgumentError("trial_index must be >= 0")
    rng = np.random.default_rng(np.random.SeedSequence([profile.seed, trial_index]))
    total = n_segments * segment_len
    samples = profile.base_voltage_v + rng.normal(0.0, profile.noise_sd_v, total)
    steady = np.ones(n_segments, dtype=bool)
    for i in range(n_segments):
        if rng.uniform() < profile.error_rate:
            steady[i] = False
            _inject_burst(samples[i * segment_len : (i + 1) * segment_len], rng, profile)
    series = RawSeries(samples, SAMPLE_RATE_HZ, f"{profile.welder_id}:{trial_index}")
    return series, GroundTruth(steady)


def iter_corpus(
    profiles: list[WelderProfile],
    trials_per_welder: int = 3,
    n_segments: int = 17,
    segment_len: int = 100_000,
) -> Iterator[tuple[RawSeries, GroundTruth]]:
    """Lazily yield one (series, truth) per (profile, trial), in profile order."""
    if not profiles:
        raise EmptyInputError("profiles must be non-empty")
    if trials_per_welder < 1:
        raise InvalidArgumentError("trials_per_welder must be >= 1")
    for profile in profiles:
        for trial in range(trials_per_welder):
            yield generate_trial(profile, n_segments, segment_len, trial)


def generate_corpus(
    profiles: list[WelderProfile],
    trials_per_welder: int = 3,
    n_segments: int = 17,
    segment_len: int = 100_000,
) -> list[tuple[RawSeries, GroundTruth]]:
    """Materialized corpus; prefer iter_corpus for full-scale raw series."""
    return list(iter_corpus(profiles, trials_per_welder, n_segments, segment_len))


def generate_feature_corpus(
    profiles: list[WelderProfile],
    trials_per_welder: int = 3,
    n_segments: int = 17,
    segment_len: int = 100_000,
    config: PreprocessConfig | None = None,
) -> tuple[list[FeatureVector], np.ndarray]:
    """Generate and immediately preprocess, keeping only patterns and truth labels.

    Avoids holding every raw series in memory at once; returns feature vectors
    in corpus order and the aligned truth labels (1 steady, 0 error).
    """
    if config is None:
        config = PreprocessConfig(segment_len=segment_len)
    vectors: list[FeatureVector] = []
    truths: list[np.ndarray] = []
    for series, truth in iter_corpus(profiles, trials_per_welder, n_segments, segment_len):
        vectors.extend(preprocess_series(series, config))
        truths.append(truth.labels())
    return vectors, np.concatenate(truths)


def default_profiles(n_welders: int = 30, seed: int = 0) -> list[WelderProfile]:
    """Welder population with skill spread: error rates step linearly 0.05 to 0.65.

    The most reliable welders (the first few in the ladder) run an older rig
    with a noticeably lower arc voltage, so healthy welds form two distinct
    operating points.  That mirrors a mixed shop floor and gives clustering a
    second desirable operating mode to find, not just one.
    """
    if n_welders < 1:
        raise InvalidArgumentError("n_welders must be >= 1")
    rates = np.linspace(0.05, 0.65, n_welders) if n_welders > 1 else np.array([0.35])
    n_low_rig = min(5, max(1, n_welders // 6))
    return [
        WelderProfile(
            welder_id=f"W{i + 1:02d}",
            error_rate=float(rates[i]),
            base_voltage_v=20.5 if i < n_low_rig else 25.0,
            seed=seed + i,
        )
        for i in range(n_welders)
    ]


def write_ground_truth_csv(path, rows) -> None:
    """rows: iterable of (welder_id, trial, segment_index, true_label)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["welder_id", "trial", "segment_index", "true_label"])
        for welder_id, trial, segment_index, label in rows:
            writer.writerow([welder_id, trial, segment_index, int(label)])


def read_ground_truth_csv(path) -> dict[tuple[str, int, int], int]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["welder_id", "trial", "segment_index", "true_label"]:
            raise InvalidArgumentError(f"{path}: unrecognized ground-truth header")
        out = {}
        for row in reader:
            if not row:
                continue
            out[(row[0], int(row[1]), int(row[2]))] = int(row[3])
    return out

"""Per-feature z-score normalization shared by every trainable model.

The shift/scale pair is computed on training data and stored in the model, so
later queries see exactly the transform training saw. Features with zero
spread get scale 1 to keep the transform defined.
"""

from __future__ import annotations

import numpy as np


def fit(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = matrix.mean(axis=0)
    scale = matrix.std(axis=0)
    scale = np.where(scale == 0.0, 1.0, scale)
    return mean, scale


def apply(x: np.ndarray, mean: np.ndarray, scale: np.ndarray) -> np.ndarray:
    return (np.asarray(x, dtype=np.float64) - mean) / scale

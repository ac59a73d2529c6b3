"""Shared fixtures: the default corpus and models derived from it are expensive,
so they are built once per session and reused by module and acceptance tests."""

import time

import numpy as np
import pytest

from weldmon.dataset import from_feature_vectors
from weldmon.signal_processing import PreprocessConfig
from weldmon.som import SomConfig, train_som, label_clusters, label_dataset, as_matrix
from weldmon.synthetic import default_profiles, generate_feature_corpus


class CorpusBundle:
    """Default 30x3x17 corpus plus the SOM artifacts derived from it."""

    def __init__(self):
        t0 = time.perf_counter()
        self.vectors, self.truth = generate_feature_corpus(
            default_profiles(30, seed=0),
            trials_per_welder=3,
            n_segments=17,
            segment_len=100_000,
            config=PreprocessConfig(),
        )
        self.build_seconds = time.perf_counter() - t0
        self.matrix = as_matrix(self.vectors)

        t0 = time.perf_counter()
        self.som = train_som(self.matrix, SomConfig(seed=0))
        self.som_seconds = time.perf_counter() - t0
        self.labeling = label_clusters(self.som, k_desirable=2)
        self.labeled = label_dataset(self.som, self.labeling, from_feature_vectors(self.vectors))


@pytest.fixture(scope="session")
def corpus() -> CorpusBundle:
    return CorpusBundle()


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)

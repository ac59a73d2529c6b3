import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weldmon.errors import EmptyInputError, InvalidArgumentError
from weldmon.signal_processing import (
    FeatureVector,
    PreprocessConfig,
    Provenance,
    RawSeries,
    Segment,
    block_downsample,
    moving_average_filter,
    parse_source_id,
    preprocess_series,
    read_raw_series,
    segment_series,
    write_raw_series,
)


def brute_force_windowed_mean(x, window):
    """Independent oracle: mean over the centered window, shrunk at the edges."""
    left = (window - 1) // 2
    right = window // 2
    out = np.empty_like(x, dtype=np.float64)
    for i in range(len(x)):
        lo = max(0, i - left)
        hi = min(len(x), i + right + 1)
        out[i] = sum(x[lo:hi]) / (hi - lo)
    return out


class TestRawSeries:
    def test_rejects_empty(self):
        with pytest.raises(EmptyInputError):
            RawSeries(np.array([]), 1000.0)

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidArgumentError):
            RawSeries(np.array([1.0, np.nan]), 1000.0)

    def test_rejects_bad_rate(self):
        with pytest.raises(InvalidArgumentError):
            RawSeries(np.array([1.0]), 0.0)

    def test_len(self):
        assert len(RawSeries(np.arange(7.0), 1.0)) == 7


class TestMovingAverageFilter:
    def test_constant_series_bit_exact(self):
        series = RawSeries(np.full(1000, 5.0), 1.0)
        out = moving_average_filter(series, 25)
        assert (out.samples == 5.0).all()

    def test_window_one_is_identity(self, rng):
        x = rng.normal(25.0, 2.0, 500)
        out = moving_average_filter(RawSeries(x, 1.0), 1)
        assert (out.samples == x).all()

    def test_small_example_matches_brute_force_oracle(self):
        x = np.array([0.0, 0.0, 4.0, 0.0, 0.0])
        out = moving_average_filter(RawSeries(x, 1.0), 3)
        expected = brute_force_windowed_mean(x, 3)
        # edges: mean of 2 samples; interior: mean of 3
        assert np.allclose(expected, [0.0, 4 / 3, 4 / 3, 4 / 3, 0.0])
        assert np.allclose(out.samples, expected, atol=1e-12)

    def test_random_input_matches_oracle(self, rng):
        x = rng.normal(0, 3, 257)
        for window in (2, 3, 10, 41, 257):
            out = moving_average_filter(RawSeries(x, 1.0), window)
            assert np.allclose(out.samples, brute_force_windowed_mean(x, window), atol=1e-9)

    def test_window_validation(self):
        series = RawSeries(np.arange(10.0), 1.0)
        with pytest.raises(InvalidArgumentError):
            moving_average_filter(series, 0)
        with pytest.raises(InvalidArgumentError):
            moving_average_filter(series, 11)

    def test_preserves_metadata(self):
        series = RawSeries(np.arange(10.0), 250.0, "W01:2")
        out = moving_average_filter(series, 3)
        assert out.sample_rate_hz == 250.0 and out.source_id == "W01:2"

    @given(
        data=st.lists(st.floats(-100, 100, allow_nan=False), min_size=4, max_size=200),
        half=st.integers(1, 30),
    )
    @settings(max_examples=60, deadline=None)
    def test_odd_window_never_raises_variance(self, data, half):
        window = 2 * half + 1
        x = np.asarray(data)
        if window > len(x) or np.ptp(x) == 0:
            return
        out = moving_average_filter(RawSeries(x, 1.0), window)
        assert out.samples.var() <= x.var() + 1e-12


class TestSegmentSeries:
    def test_full_scale_geometry(self):
        series = RawSeries(np.zeros(1_700_000) + 25.0, 1.0)
        segs = segment_series(series, 100_000)
        assert len(segs) == 17
        assert all(s.values.shape[0] == 100_000 for s in segs)
        assert [s.index for s in segs] == list(range(17))

    def test_exact_single_block(self):
        x = np.arange(64.0)
        segs = segment_series(RawSeries(x, 1.0), 64)
        assert len(segs) == 1 and (segs[0].values == x).all()

    def test_remainder_discarded(self):
        segs = segment_series(RawSeries(np.arange(250_000.0), 1.0), 100_000)
        assert len(segs) == 2
        assert segs[1].values[-1] == 199_999.0

    def test_too_short_is_empty_input(self):
        with pytest.raises(EmptyInputError):
            segment_series(RawSeries(np.arange(10.0), 1.0), 11)

    def test_bad_segment_len(self):
        with pytest.raises(InvalidArgumentError):
            segment_series(RawSeries(np.arange(10.0), 1.0), 0)


class TestBlockDownsample:
    def test_constant_segment(self):
        fv = block_downsample(Segment(np.full(100, 3.25), 0), 10)
        assert (fv.features == 3.25).all() and fv.features.shape == (10,)

    def test_hand_computed_blocks(self):
        fv = block_downsample(Segment(np.array([1.0, 1.0, 3.0, 3.0]), 0), 2)
        assert fv.features.tolist() == [1.0, 3.0]

    def test_full_scale_block_means(self, rng):
        x = rng.normal(25, 1.5, 100_000)
        fv = block_downsample(Segment(x, 4), 50)
        assert fv.features.shape == (50,)
        # oracle: direct block means
        oracle = [x[i * 2000 : (i + 1) * 2000].mean() for i in range(50)]
        assert np.allclose(fv.features, oracle, atol=1e-9)
        assert fv.provenance.segment_index == 4

    def test_non_divisible_rejected(self):
        with pytest.raises(InvalidArgumentError):
            block_downsample(Segment(np.arange(10.0), 0), 3)

    @given(st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=40))
    @settings(max_examples=60, deadline=None)
    def test_mean_preservation(self, block):
        seg = np.asarray(block * 5)
        fv = block_downsample(Segment(seg, 0), 5)
        assert fv.features.mean() == pytest.approx(seg.mean(), rel=1e-9, abs=1e-9)


class TestPreprocessSeries:
    def test_default_geometry(self, rng):
        x = rng.normal(25, 1.5, 1_700_000)
        fvs = preprocess_series(RawSeries(x, 1.0, "W07:1"), PreprocessConfig())
        assert len(fvs) == 17
        assert all(v.features.shape == (50,) for v in fvs)
        assert [v.provenance.segment_index for v in fvs] == list(range(17))
        assert all(v.provenance.welder_id == "W07" and v.provenance.trial == 1 for v in fvs)

    def test_constant_single_segment(self):
        fvs = preprocess_series(RawSeries(np.full(100_000, 24.0), 1.0), PreprocessConfig())
        assert len(fvs) == 1 and (fvs[0].features == 24.0).all()

    def test_three_trials_give_51_vectors(self, rng):
        total = 0
        for _ in range(3):
            x = rng.normal(25, 1.5, 1_700_000)
            total += len(preprocess_series(RawSeries(x, 1.0), PreprocessConfig()))
        assert total == 51

    def test_shape_law(self, rng):
        config = PreprocessConfig(window=5, segment_len=60, feature_dim=12)
        for n in (60, 61, 150, 1000):
            fvs = preprocess_series(RawSeries(rng.normal(0, 1, n), 1.0), config)
            assert len(fvs) == n // 60

    def test_window_larger_than_segment_rejected(self):
        with pytest.raises(InvalidArgumentError):
            preprocess_series(
                RawSeries(np.arange(100.0), 1.0),
                PreprocessConfig(window=51, segment_len=50, feature_dim=10),
            )

    def test_deterministic(self, rng):
        x = rng.normal(25, 1.5, 200_000)
        a = preprocess_series(RawSeries(x, 1.0), PreprocessConfig())
        b = preprocess_series(RawSeries(x.copy(), 1.0), PreprocessConfig())
        for u, v in zip(a, b):
            assert (u.features == v.features).all()


class TestSerialization:
    def test_round_trip_bit_exact(self, tmp_path, rng):
        series = RawSeries(rng.normal(25, 1.5, 512), 20_000.0, "W03:2")
        path = tmp_path / "series.txt"
        write_raw_series(path, series)
        loaded = read_raw_series(path)
        assert (loaded.samples == series.samples).all()
        assert loaded.sample_rate_hz == series.sample_rate_hz
        assert loaded.source_id == "W03:2"

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1.0\n2.0\n")
        with pytest.raises(InvalidArgumentError):
            read_raw_series(path)

    def test_malformed_sample_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("# sample_rate_hz=1.0 source_id=x\n1.0\nnot-a-number\n")
        with pytest.raises(InvalidArgumentError):
            read_raw_series(path)

    def test_parse_source_id(self):
        assert parse_source_id("W01:2") == ("W01", 2)
        assert parse_source_id("plain") == ("plain", 0)
        assert parse_source_id("") == ("", 0)


def test_feature_vector_default_provenance():
    fv = FeatureVector(np.zeros(3))
    assert fv.provenance == Provenance("", 0, 0)

import numpy as np
import pytest

from weldmon.errors import EmptyInputError, InvalidArgumentError
from weldmon.signal_processing import PreprocessConfig
from weldmon.synthetic import (
    WelderProfile,
    default_profiles,
    generate_corpus,
    generate_feature_corpus,
    generate_trial,
    iter_corpus,
    read_ground_truth_csv,
    write_ground_truth_csv,
)


def quiet_profile(error_rate, seed=0):
    """Noiseless welder: steady segments are exactly constant, faults are not."""
    return WelderProfile("WT", error_rate, base_voltage_v=25.0, noise_sd_v=0.0, seed=seed)


class TestGenerateTrial:
    def test_zero_rate_noiseless_is_constant(self):
        series, truth = generate_trial(quiet_profile(0.0), 5, 400)
        assert truth.steady.all()
        assert (series.samples == 25.0).all()
        assert truth.labels().tolist() == [1] * 5

    def test_full_rate_flags_every_segment(self):
        _, truth = generate_trial(quiet_profile(1.0), 8, 400)
        assert not truth.steady.any()
        assert truth.labels().tolist() == [0] * 8

    def test_geometry_and_source_id(self):
        profile = WelderProfile("W04", 0.3, seed=11)
        series, truth = generate_trial(profile, 17, 1000, trial_index=2)
        assert series.samples.shape == (17_000,)
        assert series.source_id == "W04:2"
        assert truth.steady.shape == (17,)

    def test_truth_matches_waveform_exactly(self):
        # noiseless: a segment is steady iff it stayed at the base voltage
        series, truth = generate_trial(quiet_profile(0.5, seed=3), 40, 500)
        blocks = series.samples.reshape(40, 500)
        constant = np.array([(b == 25.0).all() for b in blocks])
        assert (constant == truth.steady).all()
        assert 0 < truth.steady.sum() < 40

    def test_deterministic_per_trial(self):
        profile = WelderProfile("W01", 0.4, seed=9)
        a, ta = generate_trial(profile, 6, 300, trial_index=1)
        b, tb = generate_trial(profile, 6, 300, trial_index=1)
        assert (a.samples == b.samples).all()
        assert (ta.steady == tb.steady).all()
        c, _ = generate_trial(profile, 6, 300, trial_index=2)
        assert not (a.samples == c.samples).all()

    def test_faults_stay_finite_and_bounded(self):
        series, _ = generate_trial(WelderProfile("W09", 1.0, seed=5), 30, 500)
        assert np.isfinite(series.samples).all()
        assert series.samples.min() > -10.0 and series.samples.max() < 80.0

    def test_validation(self):
        with pytest.raises(InvalidArgumentError):
            generate_trial(quiet_profile(0.0), 0, 100)
        with pytest.raises(InvalidArgumentError):
            generate_trial(quiet_profile(0.0), 1, 0)
        with pytest.raises(InvalidArgumentError):
            generate_trial(quiet_profile(0.0), 1, 100, trial_index=-1)


class TestProfiles:
    def test_rate_must_be_probability(self):
        with pytest.raises(InvalidArgumentError):
            WelderProfile("W01", 1.5)
        with pytest.raises(InvalidArgumentError):
            WelderProfile("W01", -0.1)

    def test_default_population(self):
        profiles = default_profiles(30, seed=0)
        assert [p.welder_id for p in profiles] == [f"W{i:02d}" for i in range(1, 31)]
        rates = [p.error_rate for p in profiles]
        assert rates[0] == pytest.approx(0.05) and rates[-1] == pytest.approx(0.65)
        assert np.allclose(np.diff(rates), np.diff(rates)[0])
        assert [p.seed for p in profiles] == list(range(30))
        voltages = sorted({p.base_voltage_v for p in profiles})
        assert len(voltages) == 2 and voltages[0] < voltages[1]
        # the lower operating point belongs to the most reliable welders
        low = [p for p in profiles if p.base_voltage_v == voltages[0]]
        assert all(p.error_rate <= rates[len(low)] for p in low)

    def test_single_welder(self):
        (p,) = default_profiles(1, seed=4)
        assert p.error_rate == pytest.approx(0.35) and p.seed == 4

    def test_invalid_count(self):
        with pytest.raises(InvalidArgumentError):
            default_profiles(0)


class TestCorpus:
    def test_corpus_shape(self):
        corpus = generate_corpus(default_profiles(2, seed=0), 3, 4, 200)
        assert len(corpus) == 6
        assert corpus[0][0].source_id == "W01:0"
        assert corpus[5][0].source_id == "W02:2"

    def test_iter_corpus_validation(self):
        with pytest.raises(EmptyInputError):
            list(iter_corpus([]))
        with pytest.raises(InvalidArgumentError):
            list(iter_corpus(default_profiles(1), trials_per_welder=0))

    def test_feature_corpus_alignment(self):
        # noiseless: truth label 1 implies a flat pattern, label 0 a disturbed one
        profiles = [quiet_profile(0.5, seed=s) for s in range(4)]
        config = PreprocessConfig(window=21, segment_len=2000, feature_dim=50)
        vectors, truth = generate_feature_corpus(
            profiles, trials_per_welder=2, n_segments=10, segment_len=2000, config=config
        )
        assert len(vectors) == 4 * 2 * 10 == truth.shape[0]
        stds = np.array([v.features.std() for v in vectors])
        assert (stds[truth == 1] < 1e-9).all()
        assert (stds[truth == 0] > 1e-3).all()

    def test_feature_corpus_full_scale(self, corpus):
        assert len(corpus.vectors) == 1530
        assert corpus.truth.shape == (1530,)
        assert set(np.unique(corpus.truth)) <= {0, 1}
        assert all(v.features.shape == (50,) for v in corpus.vectors)

    def test_steady_patterns_flatter_than_faulty(self, corpus):
        stds = np.array([v.features.std() for v in corpus.vectors])
        steady = stds[corpus.truth == 1]
        faulty = stds[corpus.truth == 0]
        assert steady.max() < np.percentile(faulty, 10)


class TestGroundTruthCsv:
    def test_round_trip(self, tmp_path):
        rows = [("W01", 0, 0, 1), ("W01", 0, 1, 0), ("W02", 2, 16, 1)]
        path = tmp_path / "truth.csv"
        write_ground_truth_csv(path, rows)
        loaded = read_ground_truth_csv(path)
        assert loaded == {("W01", 0, 0): 1, ("W01", 0, 1): 0, ("W02", 2, 16): 1}

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "truth.csv"
        path.write_text("nope\n")
        with pytest.raises(InvalidArgumentError):
            read_ground_truth_csv(path)

import numpy as np
import pytest

from pdgc.exceptions import ParseError, ValidationError
from pdgc.series import (
    Band,
    FrequencyGrid,
    MultivariateSeries,
    load_csv,
    preprocess,
    write_csv,
)


def make_series(data, fs=1.0):
    data = np.asarray(data, dtype=float)
    return MultivariateSeries(data, tuple(f"ch{i}" for i in range(data.shape[0])), fs)


class TestLoadCsv:
    def test_five_column_file(self, tmp_path):
        rng = np.random.default_rng(0)
        path = tmp_path / "beats.csv"
        rows = rng.standard_normal((250, 5))
        path.write_text(
            "HP,SAP,MAP,RESP,MCBV\n"
            + "\n".join(",".join(f"{v:.6f}" for v in row) for row in rows)
        )
        series = load_csv(path, fs=1.05)
        assert series.n_channels == 5
        assert series.n_samples == 250
        assert series.labels == ("HP", "SAP", "MAP", "RESP", "MCBV")
        assert series.fs == 1.05

    def test_headerless_labels(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("1.0,2.0\n3.0,4.0\n5.0,6.0\n")
        series = load_csv(path, fs=1.0)
        assert series.labels == ("ch0", "ch1")
        np.testing.assert_allclose(series.data, [[1, 3, 5], [2, 4, 6]])

    def test_single_column_rejected(self, tmp_path):
        path = tmp_path / "one.csv"
        path.write_text("1.0\n2.0\n3.0\n")
        with pytest.raises(ValidationError, match="2 channels"):
            load_csv(path, fs=1.0)

    def test_nan_cell_named(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1.0,2.0\n1.0,nan\n2.0,3.0\n")
        with pytest.raises(ValidationError, match=r"row 3, column 'b'"):
            load_csv(path, fs=1.0)

    def test_ragged_row_reports_index(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("1.0,2.0\n3.0\n5.0,6.0\n")
        with pytest.raises(ParseError, match="row 2"):
            load_csv(path, fs=1.0)

    def test_non_numeric_cell(self, tmp_path):
        path = tmp_path / "text.csv"
        path.write_text("1.0,2.0\n3.0,oops\n")
        with pytest.raises(ParseError, match="row 2"):
            load_csv(path, fs=1.0)

    def test_bad_fs(self, tmp_path):
        path = tmp_path / "ok.csv"
        path.write_text("1.0,2.0\n3.0,4.0\n")
        with pytest.raises(ValueError, match="sampling frequency"):
            load_csv(path, fs=0.0)

    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(7)
        series = make_series(rng.standard_normal((3, 40)) * 47.3, fs=2.5)
        path = tmp_path / "rt.csv"
        write_csv(series, path)
        back = load_csv(path, fs=2.5)
        assert back.labels == series.labels
        np.testing.assert_allclose(back.data, series.data, rtol=1e-11)


class TestPreprocess:
    def test_constant_channel_zeroed(self):
        series = make_series([np.full(50, 3.7), np.arange(50.0)])
        out = preprocess(series)
        np.testing.assert_allclose(out.data[0], 0.0, atol=1e-12)

    def test_zero_mean_noise_unchanged(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((2, 300))
        x -= x.mean(axis=1, keepdims=True)
        out = preprocess(make_series(x))
        np.testing.assert_allclose(out.data, x, atol=1e-12)

    def test_idempotent_without_cutoff(self):
        rng = np.random.default_rng(2)
        series = make_series(rng.standard_normal((3, 200)) + 5.0)
        once = preprocess(series)
        twice = preprocess(once)
        np.testing.assert_allclose(twice.data, once.data, atol=1e-10)

    def test_residual_mean_bounded_by_std(self):
        rng = np.random.default_rng(12)
        series = make_series(rng.standard_normal((4, 500)) * 37.0 + 1e6)
        for out in (preprocess(series), preprocess(series, detrend_cutoff=0.05)):
            means = np.abs(out.data.mean(axis=1))
            stds = out.data.std(axis=1)
            assert (means <= 1e-12 * stds).all()

    def test_cutoff_range_checked(self):
        series = make_series(np.random.default_rng(3).standard_normal((2, 64)))
        for bad in (0.0, 0.5, -0.1, 0.7):
            with pytest.raises(ValueError, match="cutoff"):
                preprocess(series, detrend_cutoff=bad)

    def test_detrend_removes_ramp_keeps_oscillation(self):
        # oracle: least-squares line fit measures how much ramp survives
        length = 2000
        n = np.arange(length)
        ramp = 0.01 * n
        sine = np.sin(2 * np.pi * 0.1 * n)
        x = ramp + sine
        series = make_series(np.vstack([x, np.zeros(length) + 1.0]))
        out = preprocess(series, detrend_cutoff=0.0156)

        basis = (n - n.mean()) / np.linalg.norm(n - n.mean())
        ramp_power_in = np.dot(x - x.mean(), basis) ** 2
        ramp_power_out = np.dot(out.data[0], basis) ** 2
        assert ramp_power_out < 0.01 * ramp_power_in

        probe = np.exp(-2j * np.pi * 0.1 * n)
        amp_in = 2 * abs(np.dot(x, probe)) / length
        amp_out = 2 * abs(np.dot(out.data[0], probe)) / length
        assert amp_out > 0.95 * amp_in


class TestSeriesValidation:
    def test_requires_two_samples(self):
        with pytest.raises(ValidationError, match="2 samples"):
            MultivariateSeries(np.zeros((2, 1)), ("a", "b"), 1.0)

    def test_non_finite_rejected(self):
        data = np.zeros((2, 8))
        data[1, 3] = np.inf
        with pytest.raises(ValidationError, match="non-finite"):
            make_series(data)

    def test_channel_lookup(self):
        series = make_series(np.zeros((2, 4)) + np.arange(4))
        assert series.channel_index("ch1") == 1
        assert series.channel_index(0) == 0
        with pytest.raises(ValueError, match="unknown channel"):
            series.channel_index("nope")


class TestFrequencyGrid:
    def test_uniform_endpoints(self):
        grid = FrequencyGrid.uniform(64, fs=4.0)
        assert grid.omegas[0] == 0.0
        assert grid.omegas[-1] == np.pi
        assert grid.n_points == 64
        np.testing.assert_allclose(grid.freqs_hz[-1], 2.0)

    def test_too_few_points(self):
        with pytest.raises(ValueError, match="16"):
            FrequencyGrid(np.linspace(0, np.pi, 8))

    def test_must_span_zero_to_pi(self):
        with pytest.raises(ValueError, match=r"\[0, pi\]"):
            FrequencyGrid(np.linspace(0.1, np.pi, 32))

    def test_hz_mapping(self):
        grid = FrequencyGrid.uniform(32, fs=1.0)
        assert grid.omega_of_hz(0.25) == pytest.approx(np.pi / 2)


class TestBand:
    def test_ordering_enforced(self):
        with pytest.raises(ValueError, match="f_lo < f_hi"):
            Band(0.2, 0.1)
        with pytest.raises(ValueError, match="f_lo < f_hi"):
            Band(-0.1, 0.2)

    def test_default_name(self):
        assert Band(0.03, 0.15).name == "0.03-0.15Hz"
        assert Band(0.03, 0.15, "lf").name == "lf"

import numpy as np
import pytest

from oracles import series_eval_oracle
from shotlearn.circuit import ReuploadingParams, eval_circuit, random_params
from shotlearn.fourier import (
    DegenerateSpectrumError,
    FourierSeries,
    eval_series,
    extract_series,
    load_series,
    save_series,
    series_from_samples,
    spectrum_distribution,
)


def test_eval_constant_series():
    s = FourierSeries(c0=0.5, a=np.array([0.0]), b=np.array([0.0]))
    for x in (0.0, 1.3, -4.0):
        assert eval_series(s, x) == pytest.approx(0.5, abs=1e-15)


def test_eval_unit_cosine():
    s = FourierSeries(c0=0.0, a=np.array([1.0]), b=np.array([0.0]))
    assert eval_series(s, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_eval_matches_direct_summation(series10):
    rng = np.random.default_rng(4)
    for x in rng.uniform(0.0, 2.0 * np.pi, size=10):
        direct = series_eval_oracle(series10.c0, series10.a.tolist(), series10.b.tolist(), x)
        assert abs(eval_series(series10, x) - direct) < 1e-12


def test_extract_all_zero_depth1():
    params = ReuploadingParams(layers=1, angles=np.zeros((2, 3)))
    s = extract_series(params)
    assert s.c0 == pytest.approx(0.5, abs=1e-12)
    assert s.a[0] == pytest.approx(0.5, abs=1e-12)
    assert s.b[0] == pytest.approx(0.0, abs=1e-12)


def test_extract_all_zero_depth2():
    params = ReuploadingParams(layers=2, angles=np.zeros((3, 3)))
    s = extract_series(params)
    assert s.c0 == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(s.a, [0.0, 0.5], atol=1e-12)
    assert np.allclose(s.b, [0.0, 0.0], atol=1e-12)


def test_round_trip_depth10(target10, series10, grid500, f500):
    gap = np.abs(eval_series(series10, grid500) - f500)
    assert gap.max() < 1e-9


def test_degree_bound(target10):
    # Extracting at twice the true degree exposes a numerically zero tail.
    wide = extract_series(target10, degree=2 * target10.layers)
    tail_a = wide.a[target10.layers :]
    tail_b = wide.b[target10.layers :]
    assert np.abs(tail_a).max() < 1e-9
    assert np.abs(tail_b).max() < 1e-9


def test_extraction_idempotence(series10):
    m = 4 * series10.degree + 4
    xs = 2.0 * np.pi * np.arange(m) / m
    again = series_from_samples(xs, eval_series(series10, xs), series10.degree)
    assert abs(again.c0 - series10.c0) < 1e-10
    assert np.abs(again.a - series10.a).max() < 1e-10
    assert np.abs(again.b - series10.b).max() < 1e-10


def test_series_from_samples_rejects_aliasing():
    s = FourierSeries(c0=0.0, a=np.array([0.0, 0.0, 1.0]), b=np.zeros(3))
    m = 16
    xs = 2.0 * np.pi * np.arange(m) / m
    with pytest.raises(ValueError):
        series_from_samples(xs, eval_series(s, xs), degree=1)


def test_spectrum_single_support():
    s = FourierSeries(c0=0.3, a=np.array([0.0, 0.0, 0.7]), b=np.zeros(3))
    p = spectrum_distribution(s)
    assert np.allclose(p, [0.0, 0.0, 1.0], atol=1e-15)


def test_spectrum_uniform_when_powers_equal():
    d = 5
    s = FourierSeries(c0=0.0, a=np.full(d, 0.3), b=np.full(d, 0.4))
    assert np.allclose(spectrum_distribution(s), np.full(d, 1.0 / d), atol=1e-15)


def test_spectrum_matches_brute_force(series10):
    p = spectrum_distribution(series10)
    powers = [series10.a[k] ** 2 + series10.b[k] ** 2 for k in range(series10.degree)]
    total = sum(powers)
    for k in range(series10.degree):
        assert abs(p[k] - powers[k] / total) < 1e-12
    assert abs(p.sum() - 1.0) < 1e-12
    assert p.min() >= 0.0


def test_spectrum_degenerate_error():
    s = FourierSeries(c0=1.0, a=np.zeros(4), b=np.zeros(4))
    with pytest.raises(DegenerateSpectrumError):
        spectrum_distribution(s)


def test_series_file_round_trip(tmp_path, series10):
    path = tmp_path / "series.csv"
    save_series(series10, path)
    loaded = load_series(path)
    assert loaded.c0 == series10.c0
    assert np.array_equal(loaded.a, series10.a)
    assert np.array_equal(loaded.b, series10.b)


def test_extract_round_trips_for_fresh_seeds():
    xs = np.linspace(0.0, 2.0 * np.pi, 200, endpoint=False)
    for seed in (100, 101, 102):
        params = random_params(4, seed=seed)
        s = extract_series(params)
        assert np.abs(eval_series(s, xs) - eval_circuit(params, xs)).max() < 1e-9

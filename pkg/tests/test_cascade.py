import numpy as np
import pytest

from subband_error.cascade import (
    decompose,
    direct_detail_oracle,
    generate_white_noise,
    lowpass_downsample,
    max_level,
    noise_difference_oracle,
    scale_label,
)
from subband_error.errors import BudgetExceededError, ParameterError
from subband_error.filters import FirFilter, from_coefficients


def test_white_noise_power_and_determinism():
    s = generate_white_noise(2**14, 7)
    assert abs(np.mean(s * s) - 1.0) < 0.05
    np.testing.assert_array_equal(s, generate_white_noise(2**14, 7))
    assert not np.array_equal(s, generate_white_noise(2**14, 8))
    for bad in (3, 2, 12, 0):
        with pytest.raises(ParameterError):
            generate_white_noise(bad, 0)


def test_lowpass_downsample_examples(backend, rng):
    f = from_coefficients([0.1, 0.2, 0.3, 0.4])
    np.testing.assert_allclose(lowpass_downsample(np.full(16, 2.0), f, backend), 2.0, rtol=1e-15)
    x = rng.standard_normal(16)
    np.testing.assert_array_equal(lowpass_downsample(x, FirFilter([1.0]), backend), x[::2])
    ref = [sum(f.coefficients[i] * x[(2 * y - i) % 16] for i in range(4)) for y in range(8)]
    np.testing.assert_allclose(lowpass_downsample(x, f, backend), ref, atol=1e-15)
    with pytest.raises(ParameterError):
        lowpass_downsample([1.0], f)
    with pytest.raises(ParameterError):
        lowpass_downsample(np.ones(5), f)


@pytest.mark.parametrize("mode", ["eq3", "stage"])
def test_decompose_matches_oracle(mode, backend, rng):
    s = rng.standard_normal(64)
    f = from_coefficients(rng.uniform(-1, 1, 4))
    res = decompose(s, f, 3, mode, backend=backend)
    for z in (1, 2, 3):
        for y in range(64 >> z):
            assert abs(res.detail(z)[y] - direct_detail_oracle(s, f, z, y, mode)) <= 1e-12


def test_oracle_single_level_is_plain_convolution(rng):
    s = rng.standard_normal(32)
    c = rng.standard_normal(3)
    f = FirFilter(c)
    for y in range(16):
        expect = s[2 * y] - sum(c[i] * s[(2 * y - i) % 32] for i in range(3))
        assert direct_detail_oracle(s, f, 1, y) == pytest.approx(expect, abs=1e-14)


def test_zero_detail_identities(halfband, rng):
    s = rng.standard_normal(256)
    for mode in ("eq3", "stage"):
        res = decompose(s, FirFilter([1.0]), 6, mode)
        assert all(np.all(d == 0) for d in res.details)
        res = decompose(np.full(256, -1.5), halfband, 8, mode)
        assert max(np.max(np.abs(d)) for d in res.details) <= 1e-14
    assert direct_detail_oracle(s, FirFilter([1.0]), 3, 5) == 0.0


def test_lengths_and_labels(halfband, rng):
    n, zmax = 1024, 7
    res = decompose(rng.standard_normal(n), halfband, zmax)
    assert [d.size for d in res.details] == [n >> z for z in range(1, zmax + 1)]
    assert sum(d.size for d in res.details) == n * (1 - 2.0**-zmax)
    assert res.scale_labels == [scale_label(n, z) for z in range(1, zmax + 1)]
    assert max_level(n) == 10


def test_linearity(halfband, rng):
    s = rng.standard_normal(512)
    a = decompose(s, halfband, 6, "eq3")
    b = decompose(-3.7 * s, halfband, 6, "eq3")
    for da, db in zip(a.details, b.details):
        np.testing.assert_allclose(db, -3.7 * da, rtol=1e-12, atol=1e-12)


def test_circular_shift_permutes_details(halfband, rng):
    s = rng.standard_normal(512)
    zmax = 5
    a = decompose(s, halfband, zmax, "eq3")
    b = decompose(np.roll(s, 1 << zmax), halfband, zmax, "eq3")
    for z in range(1, zmax + 1):
        np.testing.assert_allclose(b.detail(z), np.roll(a.detail(z), 1 << (zmax - z)), atol=1e-13)
        assert np.sum(b.detail(z) ** 2) == pytest.approx(np.sum(a.detail(z) ** 2), rel=1e-12)


def test_extended_precision_agrees_with_working(halfband, rng):
    s = rng.standard_normal(2048)
    w = decompose(s, halfband, 8, "stage", "working")
    e = decompose(s, halfband, 8, "stage", "extended")
    for z in range(1, 9):
        ref = e.detail(z) + e.detail_lo(z)
        assert np.max(np.abs(w.detail(z) - ref)) < 1e-13
    assert w.detail_lo(1) is None


def test_noise_difference_examples(rng):
    s = rng.standard_normal(32)
    f = from_coefficients(rng.uniform(0, 1, 3), normalize=True)
    assert noise_difference_oracle(s, f, np.zeros(3), 2, 4) == 0.0
    eps = rng.standard_normal(3) * 1e-3
    for y in range(16):
        expect = sum(eps[i] * s[(2 * y - i) % 32] for i in range(3))
        assert noise_difference_oracle(s, f, eps, 1, y) == pytest.approx(expect, abs=1e-15)
    g = FirFilter(f.coefficients + eps)
    for mode in ("eq3", "stage"):
        for y in range(8):
            direct = direct_detail_oracle(s, f, 2, y, mode) - direct_detail_oracle(s, g, 2, y, mode)
            assert abs(noise_difference_oracle(s, f, eps, 2, y, mode) - direct) <= 1e-12


def test_errors(halfband):
    s = np.ones(64)
    with pytest.raises(ParameterError):
        decompose(s, halfband, 7)
    with pytest.raises(ParameterError):
        decompose(s, halfband, 0)
    with pytest.raises(ParameterError):
        decompose(np.ones(48), halfband, 2)
    with pytest.raises(ParameterError):
        decompose(s, halfband, 2, mode="pyramid")
    with pytest.raises(ParameterError):
        decompose([1.0, np.inf, 0, 0], halfband, 1)
    with pytest.raises(BudgetExceededError):
        direct_detail_oracle(np.ones(2**12), halfband, 5, 0)
    with pytest.raises(ParameterError):
        noise_difference_oracle(s, halfband, np.zeros(3), 1, 0)

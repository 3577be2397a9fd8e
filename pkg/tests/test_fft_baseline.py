import math

import mpmath
import numpy as np
import pytest

from subband_error import fft_baseline as fb
from subband_error.errors import FitError, ParameterError


def test_twiddles_against_mpmath():
    size = 1024
    rh, rl, ih, il = fb.twiddles(size)
    with mpmath.workprec(160):
        for k in (0, 1, 100, 127, 128, 129, 255, 256, 257, 300, 511):
            w = mpmath.expjpi(-2 * mpmath.mpf(k) / size)
            assert abs(mpmath.mpf(rh[k]) + mpmath.mpf(rl[k]) - w.real) < 1e-31
            assert abs(mpmath.mpf(ih[k]) + mpmath.mpf(il[k]) - w.imag) < 1e-31


def test_zero_input_is_sentinel():
    assert fb.roundoff_snr(np.zeros(256)) == math.inf


def test_reference_self_consistency(backend, rng):
    x = rng.standard_normal(512)
    mask = fb.halfband_mask(512)
    a = fb.reference_filter(x, mask, backend)
    b = fb.reference_filter(x, mask, backend)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_halfband_mask_is_real_symmetric():
    m = fb.halfband_mask(64)
    assert m.sum() == 2 * 16 - 1  # |k| < 16, bin 0 counted once
    np.testing.assert_array_equal(m[1:], m[1:][::-1])


@pytest.mark.parametrize("size", [2**8, 2**12, 2**16])
def test_parseval(size, rng):
    x = rng.standard_normal(size)
    e = np.sum(x * x)
    assert abs(e - np.sum(np.abs(np.fft.fft(x)) ** 2) / size) / e <= 1e-10


def test_record_and_size_checks():
    rec = fb.fft_roundoff_snr(256, 10, 0)
    assert rec.snr_db > 300 and rec.ci95 > 0 and len(rec.trial_snr_db) == 10
    assert fb.fft_roundoff_snr(256, 10, 0) == rec
    for bad in (8, 300, 2**19, 2**21):
        with pytest.raises(ParameterError):
            fb.fft_roundoff_snr(bad, 10, 0)
    with pytest.raises(ParameterError):
        fb.fft_roundoff_snr(256, 5, 0)
    with pytest.raises(ParameterError):
        fb.fft_series([512, 256], 10, 0)


def test_roundtrip_mode_is_more_accurate_than_filtering(rng):
    x = rng.standard_normal(1024)
    assert fb.roundoff_snr(x, "roundtrip") > 280
    with pytest.raises(ParameterError):
        fb.roundoff_snr(x, "bandstop")


def synthetic(slopes_db):
    return [fb.FftErrorRecord(2**k, v, 0.0, 10) for k, v in slopes_db]


def test_decay_fit_fixtures():
    recs = synthetic([(k, 320 - 0.85 * (k - 8)) for k in range(8, 17)])
    fit = fb.fft_decay_fit(recs)
    assert fit["per_octave_decay_db"] == pytest.approx(-0.85, abs=1e-12)
    assert fit["per_octave_decay_bits"] == pytest.approx(-0.85 * math.log2(10) / 10, abs=1e-12)
    assert fit["total_degradation_db"] == pytest.approx(0.85 * 8)
    flat = fb.fft_decay_fit(synthetic([(k, 300.0) for k in range(8, 13)]))
    assert flat["per_octave_decay_db"] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(FitError):
        fb.fft_decay_fit(synthetic([(k, 300.0) for k in range(8, 11)]))


def test_cost_table():
    rows = fb.cost_table([256, 1024])
    assert rows[0] == {"size": 256, "fft_mults_per_element": 8, "cascade_terms_per_element": 30.0**8}

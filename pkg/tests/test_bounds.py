import math

import numpy as np
import pytest

from subband_error import bounds as bd
from subband_error.errors import BudgetExceededError, ParameterError, PreconditionError
from subband_error.filters import from_coefficients

UNIFORM4 = from_coefficients([1, 1, 1, 1], normalize=True)
DELTA = from_coefficients([1.0])


def test_numerator_examples():
    nb = bd.numerator_bounds(UNIFORM4, 1)
    assert nb["lo"] == nb["hi"] == 0.75
    nb = bd.numerator_bounds(DELTA, 2)
    assert nb["lo"] == 0.0 and nb["hi"] == 0.0
    assert nb["db_lo"] == -math.inf


def test_numerator_count_normalizations():
    nb = bd.numerator_bounds(UNIFORM4, 3, n=1024)
    assert nb["db_hi_taps"] == pytest.approx(10 * math.log10(4 / 8 * 0.75))
    assert nb["db_hi_population"] == pytest.approx(10 * math.log10(1024 / 8 * 0.75))
    with pytest.raises(PreconditionError):
        bd.numerator_bounds(from_coefficients([0.3, 0.3]), 1)
    with pytest.raises(ParameterError):
        bd.numerator_bounds(UNIFORM4, 0)


def test_numerator_level_one_exact_expectation(rng):
    # at z=1 E[d^2] = 1 - 2 f_0 + sum f^2, which the interval contains for positive filters
    for _ in range(50):
        f = from_coefficients(rng.uniform(0.05, 1, rng.integers(2, 6)), normalize=True)
        c = f.coefficients
        e = 1 - 2 * c[0] + c @ c
        nb = bd.numerator_bounds(f, 1)
        assert nb["lo"] - 1e-12 <= e <= nb["hi"] + 1e-12


def test_numerator_designed_filter_monte_carlo(halfband):
    from subband_error.cascade import decompose, generate_white_noise

    d = np.concatenate([decompose(generate_white_noise(1024, s), halfband, 1).detail(1) for s in range(1000)])
    mean, se = np.mean(d * d), np.std(d * d, ddof=1) / math.sqrt(d.size)
    nb = bd.numerator_bounds(halfband, 1)
    assert nb["lo"] - 3 * se <= mean <= nb["hi"] + 3 * se


def test_f1_hand_enumeration():
    # N=2, z=1: pairs with i1 == i1' are (0,0) and (1,1); empty products are 1; scale N/2 = 1
    f = from_coefficients([0.3, 0.7])
    assert bd.f1_bruteforce(f, 1) == pytest.approx(2.0)
    assert bd.f1_bruteforce(f, 1, n=64) == pytest.approx(64.0)


def test_f1_bounds_examples():
    lo, hi = bd.f1_bounds(UNIFORM4, 3)
    assert lo == hi == pytest.approx(4 * 3 / 8)
    lo, _ = bd.f1_bounds(from_coefficients([0.5, 0.0, 0.5]), 2)
    assert lo == 0.0


def test_f1_uniform_reading_gap():
    # The literal sum does not sit at the collapsed bound value; the gap is reported, not hidden.
    lo, hi = bd.f1_bounds(UNIFORM4, 2)
    assert lo == hi
    assert bd.f1_bruteforce(UNIFORM4, 2) != pytest.approx(lo, rel=1e-12)


def test_f1_budget(halfband):
    with pytest.raises(BudgetExceededError):
        bd.f1_bruteforce(halfband, 3)
    with pytest.raises(BudgetExceededError):
        bd.f1_bruteforce(UNIFORM4, 3, budget=100)


def test_noise_power_linearity():
    a = bd.noise_power_approx(UNIFORM4, 0.0, 1, f1=1.0)
    assert a.db == 0.0 and a.below_guard
    b = bd.noise_power_approx(UNIFORM4, 60.0, 2)
    c = bd.noise_power_approx(UNIFORM4, 70.0, 2)
    assert b.db - c.db == pytest.approx(10.0, abs=1e-12)
    assert b.f1_source == "exact" and not b.below_guard
    assert b.literal_db == pytest.approx(-60.0 - 10 * math.log10(b.f1))


def test_noise_power_fallback(halfband):
    out = bd.noise_power_approx(halfband, 100.0, 4)
    assert out.f1_source == "bounds-geometric-mean"
    lo, hi = bd.f1_bounds(halfband, 4)
    assert out.f1 == pytest.approx(math.sqrt(lo * hi))


def test_noise_power_against_monte_carlo():
    from subband_error.cascade import decompose, generate_white_noise
    from subband_error.perturbation import PerturbationSpec, perturb

    f = from_coefficients([0.2, 0.5, 0.3])
    n, z, snr = 1024, 2, 100.0
    powers = []
    for t in range(200):
        s = generate_white_noise(n, t)
        g = perturb(f, PerturbationSpec(snr, seed=10_000 + t))
        diff = decompose(s, f, z).detail(z) - decompose(s, g, z).detail(z)
        powers.append(np.sum(diff * diff))
    measured = 10 * math.log10(np.mean(powers))
    predicted = bd.noise_power_approx(f, snr, z, n=n).db
    assert abs(measured - predicted) <= 3.0


def test_snr_bound_properties():
    f = from_coefficients([0.2, 0.5, 0.3])
    a = bd.snr_upper_bound(f, 2, 80.0)
    b = bd.snr_upper_bound(f, 2, 90.0)
    assert b.db - a.db == 10.0
    u1, u2 = bd.snr_upper_bound(UNIFORM4, 1, 50.0), bd.snr_upper_bound(UNIFORM4, 2, 50.0)
    assert u2.db - u1.db == pytest.approx(-10 * math.log10(2), abs=1e-12)
    expect = 80 - 10 * math.log10(3) + 10 * math.log10(1.1) - 10 * math.log10(2) - 10 * math.log10(0.2)
    assert a.db == pytest.approx(expect, abs=1e-12)
    assert a.literal_db == pytest.approx(expect + 10 * math.log10(0.2) - math.log10(0.2), abs=1e-12)
    zero = bd.snr_upper_bound(from_coefficients([0.5, 0.0, 0.5]), 1, 50.0)
    assert zero.db == math.inf and zero.degenerate


def test_bounds_report(halfband):
    rep = bd.bounds_report(halfband, 2, 2**14)
    assert rep.assumptions_violated
    assert rep.numerator_lo <= rep.numerator_hi and rep.numerator_lo >= 0
    assert rep.f1_lo <= rep.f1_hi
    assert rep.f1_source == "exact" and rep.scale_label == 4096
    far = bd.bounds_report(halfband, 6, 2**14)
    assert far.f1_exact is None and far.f1_source != "exact"
    pos = bd.bounds_report(from_coefficients([0.2, 0.5, 0.3]), 1, 64)
    assert not pos.assumptions_violated

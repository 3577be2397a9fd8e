import math

import numpy as np
import pytest

from subband_error.errors import ParameterError
from subband_error.perturbation import (
    PerturbationSpec,
    calibrate_lambda,
    derive_seed,
    draw_noise,
    perturb,
    realized_input_snr,
)


def test_no_noise_sentinel(halfband):
    spec = PerturbationSpec(math.inf, seed=3)
    assert calibrate_lambda(halfband, spec) == 0.0
    assert perturb(halfband, spec) == halfband
    assert realized_input_snr(halfband, perturb(halfband, spec)) == math.inf


def test_lambda_conventions(halfband):
    energy = float(np.sum(halfband.coefficients**2))
    lam = calibrate_lambda(halfband, PerturbationSpec(0.0, mode="filter-power"))
    assert halfband.taps * lam**2 == pytest.approx(energy, rel=1e-14)
    assert calibrate_lambda(halfband, PerturbationSpec(40.0)) == pytest.approx(1e-2, rel=1e-14)


def test_spec_validation():
    with pytest.raises(ParameterError):
        PerturbationSpec(10.0, mode="signal-power")
    with pytest.raises(ParameterError):
        PerturbationSpec(math.nan)
    with pytest.raises(ParameterError):
        PerturbationSpec(-math.inf)


def test_realized_snr_over_many_copies(halfband):
    values = [
        realized_input_snr(halfband, perturb(halfband, PerturbationSpec(100.0, seed=derive_seed(9, k), mode="filter-power")))
        for k in range(10_000)
    ]
    assert abs(np.mean(values) - 100.0) <= 0.5


def test_perturb_is_deterministic_and_unbiased(halfband):
    spec = PerturbationSpec(30.0, seed=11)
    a, b = perturb(halfband, spec), perturb(halfband, spec)
    np.testing.assert_array_equal(a.coefficients, b.coefficients)
    assert not a.is_normalized(1e-6)  # no renormalization
    lam = calibrate_lambda(halfband, spec)
    taps = np.array([perturb(halfband, PerturbationSpec(30.0, seed=s)).coefficients for s in range(10_000)])
    se = lam / math.sqrt(taps.shape[0])
    assert np.all(np.abs(taps.mean(axis=0) - halfband.coefficients) <= 3.5 * se)


def test_derived_seeds_give_independent_draws(halfband):
    a = np.array([draw_noise(halfband, PerturbationSpec(0.0, derive_seed(1, k, 1)))[0] for k in range(1000)])
    b = np.array([draw_noise(halfband, PerturbationSpec(0.0, derive_seed(1, k, 2)))[0] for k in range(1000)])
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.05


def test_derive_seed_is_order_independent():
    assert derive_seed(5, 1, 2) == derive_seed(5, 1, 2)
    assert len({derive_seed(5, i, j) for i in range(20) for j in range(3)}) == 60
    assert derive_seed(5, 1, 2) != derive_seed(6, 1, 2)

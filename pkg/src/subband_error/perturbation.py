"""Gaussian noise injection into filter coefficients at a target input SNR."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .filters import FirFilter

CALIBRATION_MODES = ("paper-literal", "filter-power")
NO_NOISE = math.inf


@dataclass(frozen=True)
class PerturbationSpec:
    """Target input SNR in dB (``math.inf`` means no noise), seed and calibration.

    ``paper-literal``: per-tap variance 10**(-snr/10), i.e. noise measured
    against a unit-power white input.
    ``filter-power``: per-tap variance sum(f**2) * 10**(-snr/10) / taps, so the
    expected total noise power relative to the filter's energy is 10**(-snr/10).
    """

    snr_in_db: float
    seed: int = 0
    mode: str = "paper-literal"

    def __post_init__(self):
        if self.mode not in CALIBRATION_MODES:
            raise ParameterError(f"mode must be one of {CALIBRATION_MODES}, got {self.mode!r}")
        if math.isnan(self.snr_in_db) or self.snr_in_db == -math.inf:
            raise ParameterError("snr_in_db must be finite or +inf")


def derive_seed(master_seed: int, *keys: int) -> int:
    """Order-independent child seed for a work unit identified by ``keys``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def calibrate_lambda(f: FirFilter, spec: PerturbationSpec) -> float:
    """Per-tap noise standard deviation for ``spec``."""
    if spec.snr_in_db == math.inf:
        return 0.0
    scale = 10.0 ** (-spec.snr_in_db / 10.0)
    if spec.mode == "paper-literal":
        return math.sqrt(scale)
    energy = math.fsum(f.coefficients**2)
    return math.sqrt(energy * scale / f.taps)


def draw_noise(f: FirFilter, spec: PerturbationSpec) -> np.ndarray:
    lam = calibrate_lambda(f, spec)
    z = np.random.default_rng(spec.seed).standard_normal(f.taps)
    return lam * z


def perturb(f: FirFilter, spec: PerturbationSpec) -> FirFilter:
    """Return f + eps without renormalizing, so the perturbation survives."""
    eps = draw_noise(f, spec)
    return FirFilter(f.coefficients + eps, f.cutoff, f.window)


def realized_input_snr(f: FirFilter, perturbed: FirFilter) -> float:
    """10*log10(sum f**2 / sum eps**2) with eps taken from the stored taps."""
    eps = perturbed.coefficients - f.coefficients
    noise = math.fsum(eps * eps)
    if noise == 0.0:
        return math.inf
    return 10.0 * math.log10(math.fsum(f.coefficients**2) / noise)

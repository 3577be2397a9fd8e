"""Round-off of FFT-based filtering in double precision.

The working pipeline (NumPy's FFT) is compared against the same pipeline
evaluated in double-double arithmetic, whose twiddle factors are exact to
about 106 bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
from scipy import stats

from . import _backend
from .errors import FitError, ParameterError
from .perturbation import derive_seed

FFT_MODES = ("halfband", "roundtrip")
MIN_SIZE = 2**4
HARD_MAX_SIZE = 2**20
DEFAULT_MAX_SIZE = 2**18
BITS_PER_DB = math.log2(10.0) / 10.0


@dataclass
class FftErrorRecord:
    size: int
    snr_db: float
    ci95: float
    trials: int
    trial_snr_db: list[float] = field(default_factory=list, repr=False)


def _check_size(size: int, max_size: int) -> None:
    if size < MIN_SIZE or size > min(max_size, HARD_MAX_SIZE) or size & (size - 1):
        raise ParameterError(
            f"size must be a power of two in [{MIN_SIZE}, {min(max_size, HARD_MAX_SIZE)}], got {size}"
        )


@lru_cache(maxsize=8)
def twiddles(size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """exp(-2*pi*i*k/size) for k < size/2 as double-double (re_hi, re_lo, im_hi, im_lo)."""
    half, quarter, eighth = size // 2, size // 4, size // 8
    cos_t = [None] * (quarter + 1)
    sin_t = [None] * (quarter + 1)
    with mpmath.workprec(128):
        two_pi = 2 * mpmath.pi
        for k in range(eighth + 1):
            theta = two_pi * k / size
            cos_t[k] = mpmath.cos(theta)
            sin_t[k] = mpmath.sin(theta)
        for k in range(eighth + 1, quarter + 1):
            cos_t[k] = sin_t[quarter - k]
            sin_t[k] = cos_t[quarter - k]

        def _split(v):
            hi = float(v)
            return hi, float(v - hi)

        out = np.zeros((4, half))
        for k in range(half):
            if k <= quarter:
                c, s = cos_t[k], sin_t[k]
            else:
                c, s = -cos_t[half - k], sin_t[half - k]
            out[0, k], out[1, k] = _split(c)
            out[2, k], out[3, k] = _split(-s)
    for row in out:
        row.setflags(write=False)
    return out[0], out[1], out[2], out[3]


def halfband_mask(size: int) -> np.ndarray:
    """Unit gain for |bin| < size/4, zero elsewhere (keeps real signals real)."""
    k = np.arange(size)
    dist = np.minimum(k, size - k)
    return (dist < size // 4).astype(np.float64)


def _mask_for(size: int, mode: str) -> np.ndarray:
    if mode == "halfband":
        return halfband_mask(size)
    if mode == "roundtrip":
        return np.ones(size)
    raise ParameterError(f"mode must be one of {FFT_MODES}")


def reference_fft(rh, rl, ih, il, inverse: bool = False, backend=None):
    """Unscaled double-double DFT of a double-double complex vector."""
    size = rh.shape[0]
    kern = backend or _backend.active
    return kern.dd_fft(
        *(np.ascontiguousarray(a, dtype=np.float64) for a in (rh, rl, ih, il)),
        *twiddles(size),
        inverse,
    )


def working_filter(x: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.fft.ifft(np.fft.fft(x) * mask).real


def reference_filter(x: np.ndarray, mask: np.ndarray, backend=None) -> tuple[np.ndarray, np.ndarray]:
    """Forward DFT, mask, inverse DFT, all in double-double; returns (hi, lo) of the real part."""
    size = x.shape[0]
    zeros = np.zeros(size)
    rh, rl, ih, il = reference_fft(x, zeros, zeros, zeros, backend=backend)
    # mask entries are 0 or 1, so these products are exact
    rh, rl, ih, il = rh * mask, rl * mask, ih * mask, il * mask
    rh, rl, _, _ = reference_fft(rh, rl, ih, il, inverse=True, backend=backend)
    scale = 1.0 / size  # exact: size is a power of two
    return rh * scale, rl * scale


def roundoff_snr(x: np.ndarray, mode: str = "halfband", backend=None) -> float:
    """10*log10(|ref|^2 / |working - ref|^2) for one input; +inf when they agree exactly."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    mask = _mask_for(x.shape[0], mode)
    hi, lo = reference_filter(x, mask, backend=backend)
    err = (working_filter(x, mask) - hi) - lo
    noise = float(np.sum(err * err))
    if noise == 0.0:
        return math.inf
    return 10.0 * math.log10(float(np.sum(hi * hi)) / noise)


def fft_roundoff_snr(
    size: int,
    trials: int,
    seed: int,
    mode: str = "halfband",
    max_size: int = DEFAULT_MAX_SIZE,
    backend=None,
) -> FftErrorRecord:
    _check_size(size, max_size)
    if trials < 10:
        raise ParameterError("trials must be >= 10")
    values = []
    for t in range(trials):
        rng = np.random.default_rng(derive_seed(seed, size, t))
        values.append(roundoff_snr(rng.standard_normal(size), mode, backend))
    finite = np.array([v for v in values if math.isfinite(v)])
    if finite.size == 0:
        return FftErrorRecord(size, math.inf, 0.0, trials, values)
    mean = float(finite.mean())
    ci = _ci95(finite)
    return FftErrorRecord(size, mean, ci, trials, values)


def _ci95(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    sem = float(values.std(ddof=1)) / math.sqrt(values.size)
    return float(stats.t.ppf(0.975, values.size - 1)) * sem


def fft_series(sizes, trials: int, seed: int, mode: str = "halfband",
               max_size: int = DEFAULT_MAX_SIZE, backend=None) -> list[FftErrorRecord]:
    sizes = list(sizes)
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ParameterError("sizes must be strictly increasing")
    return [fft_roundoff_snr(s, trials, seed, mode, max_size, backend) for s in sizes]


def fft_decay_fit(records: list[FftErrorRecord]) -> dict:
    """Least-squares slope of mean SNR against log2(size)."""
    pts = [(math.log2(r.size), r.snr_db) for r in records if math.isfinite(r.snr_db)]
    if len({x for x, _ in pts}) < 4:
        raise FitError("need at least 4 distinct sizes")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    res = stats.linregress(x, y)
    dof = x.size - 2
    ci = float(stats.t.ppf(0.975, dof)) * res.stderr if dof > 0 else math.nan
    return {
        "per_octave_decay_db": float(res.slope),
        "per_octave_decay_db_ci95": float(ci),
        "per_octave_decay_bits": float(res.slope) * BITS_PER_DB,
        "intercept_db": float(res.intercept),
        "max_snr_db": float(y.max()),
        "total_degradation_db": float(y[0] - y[-1]),
    }


def cost_table(sizes, filter_order: int = 30) -> list[dict]:
    """Multiplications per output element: FFT filtering vs the sub-band cascade."""
    rows = []
    for size in sizes:
        octaves = int(math.log2(size))
        rows.append(
            {
                "size": int(size),
                "fft_mults_per_element": octaves,
                "cascade_terms_per_element": float(filter_order) ** octaves,
            }
        )
    return rows

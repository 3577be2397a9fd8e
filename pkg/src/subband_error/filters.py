"""FIR low-pass filters used as the downsampling prefilter."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateFilterError, ParameterError

SUM_TOL = 1e-12


@dataclass(frozen=True)
class FirFilter:
    """Immutable FIR filter.

    ``coefficients[i]`` multiplies the input delayed by ``i`` samples.
    ``cutoff`` is a fraction of Nyquist for designed filters and ``None``
    for filters built from raw coefficients.
    """

    coefficients: np.ndarray
    cutoff: float | None = None
    window: str | None = field(default=None, compare=False)

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=np.float64).ravel()
        if c.size == 0:
            raise ParameterError("filter needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise ParameterError("filter coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def __len__(self) -> int:
        return self.coefficients.size

    def __eq__(self, other):
        if not isinstance(other, FirFilter):
            return NotImplemented
        return self.cutoff == other.cutoff and np.array_equal(
            self.coefficients, other.coefficients
        )

    def __hash__(self):
        return hash((self.coefficients.tobytes(), self.cutoff))

    @property
    def order(self) -> int:
        return self.coefficients.size - 1

    @property
    def taps(self) -> int:
        return self.coefficients.size

    @property
    def dc_gain(self) -> float:
        return math.fsum(self.coefficients)

    def is_normalized(self, tol: float = SUM_TOL) -> bool:
        return abs(self.dc_gain - 1.0) <= tol

    def normalized(self) -> "FirFilter":
        return FirFilter(_unit_sum(self.coefficients), self.cutoff, self.window)

    def symmetry_error(self) -> float:
        c = self.coefficients
        return float(np.max(np.abs(c - c[::-1])))


@dataclass(frozen=True)
class FilterStats:
    min: float
    max: float
    min_abs: float
    max_abs: float
    sum: float
    l2_norm: float

    @property
    def strictly_positive(self) -> bool:
        return self.min > 0.0

    def as_dict(self) -> dict:
        return {
            "min": self.min,
            "max": self.max,
            "min_abs": self.min_abs,
            "max_abs": self.max_abs,
            "sum": self.sum,
            "l2_norm": self.l2_norm,
        }


def _unit_sum(c: np.ndarray) -> np.ndarray:
    total = math.fsum(c)
    if total == 0.0:
        raise DegenerateFilterError("cannot normalize a filter whose coefficients sum to zero")
    c = np.asarray(c, dtype=np.float64)
    # Already unit-sum to within what the residual step below can reach.
    if abs(total - 1.0) <= np.finfo(np.float64).eps:
        return c.copy()
    out = c / total
    # Absorb the residual rounding into the largest tap so the sum is as
    # close to 1 as double precision allows.
    resid = 1.0 - math.fsum(out)
    if resid:
        k = int(np.argmax(np.abs(out)))
        out[k] += resid
    return out


def hamming_window(length: int) -> np.ndarray:
    if length == 1:
        return np.ones(1)
    k = np.arange(length)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * k / (length - 1))


def design_halfband_lowpass(order: int = 30, cutoff: float = 0.5) -> FirFilter:
    """Windowed-sinc low-pass design (Hamming window), normalized to unit sum.

    Parameters
    ----------
    order : int
        Filter order; the filter has ``order + 1`` taps. Must be even and >= 2
        so that there is a center tap.
    cutoff : float
        Cutoff as a fraction of the Nyquist frequency, in (0, 1).
    """
    if isinstance(order, bool) or int(order) != order:
        raise ParameterError(f"order must be an integer, got {order!r}")
    order = int(order)
    if order < 2 or order % 2:
        raise ParameterError(f"order must be even and >= 2, got {order}")
    if not 0.0 < cutoff < 1.0:
        raise ParameterError(f"cutoff must lie in (0, 1), got {cutoff}")
    lag = np.arange(order + 1) - order / 2
    ideal = cutoff * np.sinc(cutoff * lag)
    taps = ideal * hamming_window(order + 1)
    # cos() of mirrored window arguments is not bitwise symmetric
    taps = 0.5 * (taps + taps[::-1])
    return FirFilter(_unit_sum(taps), cutoff=float(cutoff), window="hamming")


def from_coefficients(raw: Sequence[float], normalize: bool = False) -> FirFilter:
    c = np.asarray(raw, dtype=np.float64).ravel()
    if c.size == 0:
        raise ParameterError("filter needs at least one coefficient")
    if not np.all(np.isfinite(c)):
        raise ParameterError("filter coefficients must be finite")
    if normalize:
        c = _unit_sum(c)
    return FirFilter(c)


def filter_stats(f: FirFilter) -> FilterStats:
    c = f.coefficients
    a = np.abs(c)
    return FilterStats(
        min=float(c.min()),
        max=float(c.max()),
        min_abs=float(a.min()),
        max_abs=float(a.max()),
        sum=math.fsum(c),
        l2_norm=math.sqrt(math.fsum(c * c)),
    )

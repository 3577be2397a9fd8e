"""Recursive low-pass/downsample cascade and its detail coefficients.

Two detail definitions are supported:

``"eq3"``
    d_z[y] = s[2**z * y] - a_z[y]: the raw sample minus the z-fold filtered
    and decimated value.
``"stage"``
    d_z[y] = a_{z-1}[2y] - a_z[y]: the coefficient before downsampling minus
    its low-pass value, one stage at a time.

Convolution is causal and circular: a_z[y] = sum_i f[i] * a_{z-1}[(2y - i) mod len].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from ._fallback import dd_add
from .errors import BudgetExceededError, ParameterError
from .filters import FirFilter

DETAIL_MODES = ("eq3", "stage")
PRECISIONS = ("working", "extended")
ORACLE_BUDGET = 10**6


def _is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def as_signal(s) -> np.ndarray:
    x = np.ascontiguousarray(s, dtype=np.float64).ravel()
    if x.size < 2:
        raise ParameterError("signal needs at least two samples")
    if not np.all(np.isfinite(x)):
        raise ParameterError("signal samples must be finite")
    return x


def generate_white_noise(n: int, seed: int) -> np.ndarray:
    """Unit-variance i.i.d. Gaussian samples from a seeded PCG64 stream."""
    if isinstance(n, bool) or int(n) != n or not _is_pow2(int(n)) or n < 4:
        raise ParameterError(f"n must be a power of two >= 4, got {n}")
    return np.random.default_rng(seed).standard_normal(int(n))


def lowpass_downsample(s, f: FirFilter, backend=None) -> np.ndarray:
    x = as_signal(s)
    if x.size % 2:
        raise ParameterError("signal length must be even")
    kern = backend or _backend.active
    return kern.conv_decimate(x, f.coefficients)


@dataclass
class DecompositionResult:
    """Per-level outputs of :func:`decompose`; lists are indexed by ``z - 1``.

    ``details_lo`` is present for extended-precision results and holds the
    low words of double-double detail values.
    """

    details: list[np.ndarray]
    approximations: list[np.ndarray]
    n: int
    mode: str = "eq3"
    precision: str = "working"
    details_lo: list[np.ndarray] | None = field(default=None, repr=False)

    @property
    def z_max(self) -> int:
        return len(self.details)

    @property
    def scale_labels(self) -> list[int]:
        return [scale_label(self.n, z) for z in range(1, self.z_max + 1)]

    def detail(self, z: int) -> np.ndarray:
        if not 1 <= z <= self.z_max:
            raise ParameterError(f"level {z} outside 1..{self.z_max}")
        return self.details[z - 1]

    def detail_lo(self, z: int) -> np.ndarray | None:
        if self.details_lo is None:
            return None
        return self.details_lo[z - 1]


def scale_label(n: int, z: int) -> int:
    """Coefficient count at level z, the label used to name scales."""
    return n >> z


def max_level(n: int) -> int:
    return int(n).bit_length() - 1


def decompose(
    s,
    f: FirFilter,
    z_max: int,
    mode: str = "eq3",
    precision: str = "working",
    backend=None,
) -> DecompositionResult:
    """Run the cascade for levels 1..z_max.

    ``precision="extended"`` carries the whole cascade in double-double
    arithmetic and is meant as the reference against which working-precision
    results are compared.
    """
    x = as_signal(s)
    n = x.size
    if mode not in DETAIL_MODES:
        raise ParameterError(f"mode must be one of {DETAIL_MODES}")
    if precision not in PRECISIONS:
        raise ParameterError(f"precision must be one of {PRECISIONS}")
    if not _is_pow2(n):
        raise ParameterError(f"signal length must be a power of two, got {n}")
    if z_max < 1 or z_max > max_level(n):
        raise ParameterError(f"z_max must lie in 1..{max_level(n)} for n={n}, got {z_max}")
    kern = backend or _backend.active
    c = f.coefficients
    details, approx = [], []
    if precision == "working":
        a = x
        for z in range(1, z_max + 1):
            nxt = kern.conv_decimate(a, c)
            prior = x[:: 1 << z] if mode == "eq3" else a[::2]
            details.append(prior - nxt)
            approx.append(nxt)
            a = nxt
        return DecompositionResult(details, approx, n, mode, precision)

    ah, al = x, np.zeros(n)
    lows = []
    for z in range(1, z_max + 1):
        nh, nl = kern.dd_conv_decimate(ah, al, c)
        if mode == "eq3":
            ph, pl = x[:: 1 << z], np.zeros(nh.size)
        else:
            ph, pl = ah[::2], al[::2]
        dh, dl = dd_add(ph, pl, -nh, -nl)
        details.append(dh)
        lows.append(dl)
        approx.append(nh + nl)
        ah, al = nh, nl
    return DecompositionResult(details, approx, n, mode, precision, lows)


def _check_budget(taps: int, z: int, budget: int = ORACLE_BUDGET) -> None:
    if taps**z > budget:
        raise BudgetExceededError(
            f"{taps}**{z} index tuples exceed the oracle budget of {budget}"
        )


def _index_tuples(taps: int, z: int) -> np.ndarray:
    # rows are (i_1, ..., i_z); i_k is the tap used at cascade stage k
    return np.array(list(itertools.product(range(taps), repeat=z)), dtype=np.int64).reshape(-1, z)


def _cascade_direct(x: np.ndarray, c: np.ndarray, z: int, pos: int) -> float:
    """sum over tuples of prod_k c[i_k] * x[pos - sum_k 2**(k-1) i_k] (wrapped)."""
    if z == 0:
        return float(x[pos % x.size])
    tuples = _index_tuples(c.size, z)
    lag = tuples @ (1 << np.arange(z))
    weight = np.prod(c[tuples], axis=1)
    return float(np.sum(weight * x[(pos - lag) % x.size]))


def direct_detail_oracle(s, f: FirFilter, z: int, y: int, mode: str = "eq3") -> float:
    """Detail coefficient d_z[y] by explicit enumeration of all tap tuples."""
    x = as_signal(s)
    if z < 1:
        raise ParameterError("z must be >= 1")
    _check_budget(f.taps, z)
    c = f.coefficients
    low = _cascade_direct(x, c, z, y << z)
    if mode == "eq3":
        return float(x[(y << z) % x.size]) - low
    if mode == "stage":
        return _cascade_direct(x, c, z - 1, y << z) - low
    raise ParameterError(f"mode must be one of {DETAIL_MODES}")


def _expansion_direct(x: np.ndarray, c: np.ndarray, eps: np.ndarray, z: int, pos: int) -> float:
    """sum over tuples of [prod(c+eps) - prod c] * x[...], expanded term by term.

    The bracket is written as the sum over nonempty subsets T of stages of
    prod_{k in T} eps[i_k] * prod_{k not in T} c[i_k].
    """
    if z == 0:
        return 0.0
    tuples = _index_tuples(c.size, z)
    lag = tuples @ (1 << np.arange(z))
    cv, ev = c[tuples], eps[tuples]
    bracket = np.zeros(tuples.shape[0])
    for mask in range(1, 1 << z):
        term = np.ones(tuples.shape[0])
        for k in range(z):
            term = term * (ev[:, k] if mask >> k & 1 else cv[:, k])
        bracket += term
    return float(np.sum(bracket * x[(pos - lag) % x.size]))


def noise_difference_oracle(s, f: FirFilter, eps, z: int, y: int, mode: str = "eq3") -> float:
    """d_z[y] - d~_z[y] for the filter perturbed by ``eps``, via full expansion."""
    x = as_signal(s)
    e = np.asarray(eps, dtype=np.float64).ravel()
    if e.size != f.taps:
        raise ParameterError("eps must have one entry per filter tap")
    if z < 1:
        raise ParameterError("z must be >= 1")
    _check_budget(f.taps, z)
    c = f.coefficients
    # d - d~ = (low~ - low) at level z, minus the same at level z-1 for stage mode
    diff = _expansion_direct(x, c, e, z, y << z)
    if mode == "eq3":
        return diff
    if mode == "stage":
        return diff - _expansion_direct(x, c, e, z - 1, y << z)
    raise ParameterError(f"mode must be one of {DETAIL_MODES}")

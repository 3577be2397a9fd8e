"""Analytic numerator bounds, the first-order noise factor f1 and the SNR bound.

Bounds assume a unit-sum filter with strictly positive taps. Filters that
break positivity (any practical half-band design) are still evaluated; the
report carries ``assumptions_violated`` instead of refusing.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import _backend
from .errors import BudgetExceededError, ParameterError, PreconditionError
from .filters import FirFilter

F1_BUDGET = 10**8
NOISE_GUARD_DB = 50.0
COUNT_MODES = ("taps", "population")
F1_READINGS = {
    "all-pairs": "equal excluded tap index and equal weighted index sums, over every (j, j') pair",
    "same-scale": "as all-pairs, restricted to j == j' (excluded factors at the same stage)",
}


def _db(x: float) -> float:
    return 10.0 * math.log10(x) if x > 0 else -math.inf


def _check_level(z: int) -> None:
    if isinstance(z, bool) or int(z) != z or z < 1:
        raise ParameterError(f"z must be an integer >= 1, got {z!r}")


def _require_unit_sum(f: FirFilter) -> None:
    if not f.is_normalized():
        raise PreconditionError(f"filter taps sum to {f.dc_gain!r}, expected 1")


def _count(f: FirFilter, z: int, n: int | None, mode: str) -> float:
    """Coefficient-count factor: N / 2**z with N the tap count or the signal length."""
    if mode == "taps":
        return f.taps / 2.0**z
    if mode == "population":
        if n is None or n < 2**z:
            raise ParameterError("population count needs a signal length n >= 2**z")
        return n / 2.0**z
    raise ParameterError(f"count mode must be one of {COUNT_MODES}")


def per_coefficient_bounds(f: FirFilter) -> tuple[float, float]:
    c = f.coefficients
    lo = max(0.0, 1.0 - 2.0 * float(c.max()) + float(c.min()))
    hi = 1.0 - 2.0 * float(c.min()) + float(c.max())
    return lo, hi


def numerator_bounds(f: FirFilter, z: int, n: int | None = None) -> dict:
    """Per-coefficient bounds on E[d**2] and their level-sum dB forms.

    Both count normalizations are returned: ``*_taps`` uses the tap count
    and ``*_population`` the level's coefficient count n / 2**z.
    """
    _check_level(z)
    _require_unit_sum(f)
    lo, hi = per_coefficient_bounds(f)
    out = {"lo": lo, "hi": hi}
    modes = COUNT_MODES if n is not None else ("taps",)
    for mode in modes:
        cnt = _count(f, z, n, mode)
        out[f"db_lo_{mode}"] = _db(cnt * lo)
        out[f"db_hi_{mode}"] = _db(cnt * hi)
    out["db_lo"], out["db_hi"] = out["db_lo_taps"], out["db_hi_taps"]
    return out


def f1_bruteforce(
    f: FirFilter,
    z: int,
    same_scale: bool = False,
    n: int | None = None,
    budget: int = F1_BUDGET,
    backend=None,
) -> float:
    """Literal enumeration of the first-order noise factor.

    Sums the pair product of tap products that each omit one stage, over all
    tuple pairs whose omitted taps share an index and whose weighted index
    sums agree, then scales by N / 2**z (N = tap count, or ``n`` when given).
    """
    _check_level(z)
    terms = f.taps ** (2 * z)
    if terms > budget:
        raise BudgetExceededError(f"{f.taps}**{2 * z} = {terms} terms exceed the budget of {budget}")
    kern = backend or _backend.active
    raw = kern.f1_enumerate(np.ascontiguousarray(f.coefficients), int(z), bool(same_scale))
    scale = (f.taps if n is None else n) / 2.0**z
    return float(raw) * scale


def f1_bounds(f: FirFilter, z: int) -> tuple[float, float]:
    _check_level(z)
    c = f.coefficients
    base = f.taps**2 * z / 2.0**z
    return base * float(np.min(np.abs(c))), base * float(c.max())


@dataclass(frozen=True)
class NoisePower:
    db: float
    f1: float
    f1_source: str
    below_guard: bool
    literal_db: float


def noise_power_approx(
    f: FirFilter,
    snr_in_db: float,
    z: int,
    n: int | None = None,
    f1: float | None = None,
    budget: int = F1_BUDGET,
) -> NoisePower:
    """First-order output noise power, -SNR_I + 10*log10(f1), in dB.

    f1 is enumerated exactly when affordable, otherwise taken as the
    geometric mean of its bounds. ``literal_db`` keeps the printed sign,
    -SNR_I - 10*log10(f1). Inputs below 50 dB set ``below_guard``.
    """
    _check_level(z)
    if not math.isfinite(snr_in_db):
        raise ParameterError("snr_in_db must be finite")
    source = "given"
    if f1 is None:
        try:
            f1 = f1_bruteforce(f, z, n=n, budget=budget)
            source = "exact"
        except BudgetExceededError:
            lo, hi = f1_bounds(f, z)
            scale = 1.0 if n is None else n / f.taps
            if lo > 0:
                f1, source = math.sqrt(lo * hi) * scale, "bounds-geometric-mean"
            else:
                f1, source = hi * scale, "bounds-upper"
    if f1 <= 0:
        raise ParameterError("f1 must be positive")
    return NoisePower(
        -snr_in_db + _db(f1), f1, source, snr_in_db < NOISE_GUARD_DB, -snr_in_db - _db(f1)
    )


@dataclass(frozen=True)
class SnrBound:
    db: float
    degenerate: bool
    literal_db: float


def snr_upper_bound(f: FirFilter, z: int, snr_in_db: float, n: int | None = None,
                    count: str = "taps") -> SnrBound:
    """SNR_I - 10log N + 10log(1 - 2 min f + max f) - 10log z - 10log min|f|.

    A zero tap makes the last term infinite; the result is then +inf with
    ``degenerate`` set. ``literal_db`` uses the printed final term, -log10(min|f|).
    """
    _check_level(z)
    _require_unit_sum(f)
    _, hi = per_coefficient_bounds(f)
    big_n = f.taps if count == "taps" else _count(f, 0, n, count)
    head = snr_in_db - _db(big_n) + _db(hi) - _db(z)
    min_abs = float(np.min(np.abs(f.coefficients)))
    if min_abs == 0.0:
        return SnrBound(math.inf, True, math.inf)
    return SnrBound(head - _db(min_abs), False, head - math.log10(min_abs))


@dataclass(frozen=True)
class BoundsReport:
    level: int
    scale_label: int
    numerator_lo: float
    numerator_hi: float
    numerator_db_lo: float
    numerator_db_hi: float
    numerator_db_lo_population: float
    numerator_db_hi_population: float
    f1_lo: float
    f1_hi: float
    f1_exact: float | None
    f1_source: str
    noise_power_db: float
    noise_power_literal_db: float
    snr_upper_db: float
    snr_upper_literal_db: float
    snr_bound_degenerate: bool
    assumptions_violated: bool
    snr_in_db: float

    def as_dict(self) -> dict:
        return asdict(self)


def bounds_report(
    f: FirFilter, z: int, n: int, snr_in_db: float = 100.0, budget: int = F1_BUDGET
) -> BoundsReport:
    nb = numerator_bounds(f, z, n)
    lo, hi = f1_bounds(f, z)
    try:
        exact = f1_bruteforce(f, z, budget=budget)
    except BudgetExceededError:
        exact = None
    noise = noise_power_approx(f, snr_in_db, z, f1=exact, budget=0)
    bound = snr_upper_bound(f, z, snr_in_db, n)
    return BoundsReport(
        level=z,
        scale_label=n >> z,
        numerator_lo=nb["lo"],
        numerator_hi=nb["hi"],
        numerator_db_lo=nb["db_lo"],
        numerator_db_hi=nb["db_hi"],
        numerator_db_lo_population=nb["db_lo_population"],
        numerator_db_hi_population=nb["db_hi_population"],
        f1_lo=lo,
        f1_hi=hi,
        f1_exact=exact,
        f1_source="exact" if exact is not None else noise.f1_source,
        noise_power_db=noise.db,
        noise_power_literal_db=noise.literal_db,
        snr_upper_db=bound.db,
        snr_upper_literal_db=bound.literal_db,
        snr_bound_degenerate=bound.degenerate,
        assumptions_violated=bool(np.any(f.coefficients <= 0)),
        snr_in_db=snr_in_db,
    )

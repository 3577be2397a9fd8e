"""Output SNR, Monte-Carlo sweeps, regressions and regime detection."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import stats

from .cascade import DecompositionResult, decompose, generate_white_noise, scale_label
from .config import ExperimentConfig
from .errors import AnalysisError, DataError, FitError, ParameterError, StructuralError
from .filters import FirFilter, design_halfband_lowpass
from .perturbation import PerturbationSpec, calibrate_lambda, derive_seed, perturb

AGGREGATE = 0
PLATEAU_SLOPE = 0.1
BREAKDOWN_SLOPE = 1.5
# Reference values from the published experiment, used only for reporting.
PUBLISHED_SLOPE = 0.994
PUBLISHED_INTERCEPT = -25.8
PUBLISHED_LEVEL_INTERCEPTS = {2: -44.78, 3: -39.86, 4: -25.23, 5: -14.59, 6: -11.26, 7: -9.87, 8: -7.60, 9: -4.61}
PUBLISHED_PLATEAU_DB = 270.0
PUBLISHED_BREAKDOWN_DB = 50.0
PUBLISHED_DB_PER_OCTAVE = -1.6
PUBLISHED_DB_PER_OCTAVE_LOG = -0.92


@dataclass(frozen=True)
class SnrSweepRecord:
    snr_in_db: float
    level: int
    scale_label: int
    trial: int
    signal_power: float
    noise_power: float
    snr_out_db: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r_squared: float
    ci95_slope: float
    ci95_intercept: float
    window: tuple[float, float]
    n_points: int
    residual_mean: float = 0.0

    def as_dict(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window)
        return d


@dataclass(frozen=True)
class Regimes:
    plateau_threshold_db: float
    breakdown_threshold_db: float
    bins: tuple[float, ...]
    bin_means: tuple[float, ...]
    local_slopes: tuple[float, ...]

    def as_dict(self) -> dict:
        return {
            "plateau_threshold_db": self.plateau_threshold_db,
            "breakdown_threshold_db": self.breakdown_threshold_db,
            "bins": list(self.bins),
            "bin_means": list(self.bin_means),
            "local_slopes": list(self.local_slopes),
        }


def snr_db(signal_power: float, noise_power: float) -> float:
    if noise_power == 0.0:
        return math.inf
    if signal_power == 0.0:
        return -math.inf
    return 10.0 * math.log10(signal_power / noise_power)


def level_powers(reference: DecompositionResult, perturbed: DecompositionResult, z: int) -> tuple[float, float]:
    """(sum d**2, sum (d - d~)**2) at level z. Low words of a double-double reference are included."""
    d = reference.detail(z)
    dt = perturbed.detail(z)
    if d.shape != dt.shape:
        raise StructuralError(f"level {z}: shapes {d.shape} and {dt.shape} differ")
    lo = reference.detail_lo(z)
    diff = d - dt if lo is None else (d - dt) + lo
    return float(np.dot(d, d)), float(np.dot(diff, diff))


def output_snr(
    reference: DecompositionResult,
    perturbed: DecompositionResult,
    levels: Iterable[int] | None = None,
) -> float:
    """Summed detail power over summed squared difference, in dB (+inf if identical)."""
    if reference.n != perturbed.n or reference.z_max != perturbed.z_max:
        raise StructuralError("decompositions do not share a level structure")
    zs = list(levels) if levels is not None else list(range(1, reference.z_max + 1))
    sig = noise = 0.0
    for z in zs:
        s, e = level_powers(reference, perturbed, z)
        sig += s
        noise += e
    return snr_db(sig, noise)


def trial_records(
    reference: DecompositionResult,
    perturbed: DecompositionResult,
    snr_in_db: float,
    trial: int,
    levels: Iterable[int],
    aggregate: tuple[int, int],
) -> list[SnrSweepRecord]:
    out = []
    powers = {}
    for z in levels:
        s, e = level_powers(reference, perturbed, z)
        powers[z] = (s, e)
        out.append(SnrSweepRecord(snr_in_db, z, scale_label(reference.n, z), trial, s, e, snr_db(s, e)))
    lo, hi = aggregate
    sig = math.fsum(powers[z][0] for z in range(lo, hi + 1))
    noise = math.fsum(powers[z][1] for z in range(lo, hi + 1))
    out.append(SnrSweepRecord(snr_in_db, AGGREGATE, 0, trial, sig, noise, snr_db(sig, noise)))
    return out


def config_filter(config: ExperimentConfig) -> FirFilter:
    return design_halfband_lowpass(config.filter_order, config.cutoff)


def run_sweep(
    config: ExperimentConfig,
    backend=None,
    progress: Callable[[int, int], None] | None = None,
) -> list[SnrSweepRecord]:
    """Monte-Carlo sweep over the input-SNR grid.

    Every (grid point, trial) pair draws a fresh signal and a fresh
    perturbation from seeds derived from ``master_seed``, so results do not
    depend on execution order. The reference decomposition uses
    ``config.reference_precision``; the perturbed one always runs in double.
    """
    config.validate()
    f = config_filter(config)
    grid = config.snr_grid
    records: list[SnrSweepRecord] = []
    total = len(grid) * config.trials
    done = 0
    for gi, snr in enumerate(grid):
        for t in range(config.trials):
            s = generate_white_noise(config.n, derive_seed(config.master_seed, gi, t, 0))
            ref = decompose(s, f, config.z_max, config.detail_mode, config.reference_precision, backend)
            spec = PerturbationSpec(snr, derive_seed(config.master_seed, gi, t, 1), config.calibration_mode)
            pert = decompose(s, perturb(f, spec), config.z_max, config.detail_mode, "working", backend)
            records.extend(trial_records(ref, pert, snr, t, config.levels, config.aggregate_range))
            done += 1
            if progress is not None:
                progress(done, total)
    return records


def _select(records: Iterable[SnrSweepRecord], level: int) -> list[SnrSweepRecord]:
    return [r for r in records if r.level == level]


def fit_linear(
    records: Iterable[SnrSweepRecord],
    window: Sequence[float] = (50.0, 270.0),
    level: int = AGGREGATE,
) -> RegressionFit:
    """OLS of snr_out on snr_in inside ``window`` (inclusive); infinite outputs are dropped."""
    lo, hi = float(window[0]), float(window[1])
    pts = [
        (r.snr_in_db, r.snr_out_db)
        for r in _select(records, level)
        if lo <= r.snr_in_db <= hi and math.isfinite(r.snr_out_db)
    ]
    if len({p[0] for p in pts}) < 3:
        raise FitError(f"level {level}: need >= 3 distinct input SNRs in [{lo}, {hi}]")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    return _ols(x, y, (lo, hi))


def _ols(x: np.ndarray, y: np.ndarray, window: tuple[float, float]) -> RegressionFit:
    n = x.size
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    slope = float(dx @ (y - ym)) / sxx
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    ssr = float(resid @ resid)
    sst = float((y - ym) @ (y - ym))
    r2 = 1.0 - ssr / sst if sst > 0 else 1.0
    if n > 2:
        s2 = ssr / (n - 2)
        tq = float(stats.t.ppf(0.975, n - 2))
        ci_slope = tq * math.sqrt(s2 / sxx)
        ci_int = tq * math.sqrt(s2 * (1.0 / n + xm * xm / sxx))
    else:
        ci_slope = ci_int = math.nan
    return RegressionFit(slope, intercept, max(0.0, min(1.0, r2)), ci_slope, ci_int, window, n,
                         float(np.mean(resid)))


def fit_levels(records: Sequence[SnrSweepRecord], window: Sequence[float] = (50.0, 270.0)) -> dict[int, RegressionFit]:
    levels = sorted({r.level for r in records if r.level != AGGREGATE})
    return {z: fit_linear(records, window, z) for z in levels}


def binned_means(
    records: Iterable[SnrSweepRecord], level: int = AGGREGATE, bin_width: float | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Mean finite snr_out per input-SNR bin. Bins are left edges; ``None`` bins by distinct value."""
    groups: dict[float, list[float]] = defaultdict(list)
    for r in _select(records, level):
        if not math.isfinite(r.snr_out_db):
            continue
        key = r.snr_in_db if bin_width is None else math.floor(r.snr_in_db / bin_width) * bin_width
        groups[key].append(r.snr_out_db)
    edges = np.array(sorted(groups))
    means = np.array([math.fsum(groups[k]) / len(groups[k]) for k in edges])
    return edges, means


def detect_regimes(
    records: Sequence[SnrSweepRecord],
    level: int = AGGREGATE,
    bin_width: float | None = None,
    plateau_slope: float = PLATEAU_SLOPE,
    breakdown_slope: float = BREAKDOWN_SLOPE,
) -> Regimes:
    """Locate the high-SNR plateau and the low-SNR breakdown.

    Local slopes are finite differences of consecutive binned means. The
    plateau threshold is the lowest bin edge from which every slope above it
    is below ``plateau_slope``; the breakdown threshold is the highest bin
    edge below which every slope exceeds ``breakdown_slope``. Missing regions
    are reported as +inf (plateau) and -inf (breakdown).
    """
    sel = [r for r in _select(records, level) if math.isfinite(r.snr_in_db)]
    if not sel:
        raise AnalysisError(f"no records with finite input SNR for level {level}")
    span = max(r.snr_in_db for r in sel) - min(r.snr_in_db for r in sel)
    if span < 100.0:
        raise AnalysisError(f"input SNR span {span} dB is below the required 100 dB")
    x, m = binned_means(sel, level, bin_width)
    if x.size < 2:
        raise AnalysisError("need at least two populated bins")
    slopes = np.diff(m) / np.diff(x)

    plateau = math.inf
    k = slopes.size - 1
    while k >= 0 and slopes[k] < plateau_slope:
        plateau = float(x[k])
        k -= 1
    breakdown = -math.inf
    k = 0
    while k < slopes.size and slopes[k] > breakdown_slope:
        breakdown = float(x[k + 1])
        k += 1
    return Regimes(plateau, breakdown, tuple(map(float, x)), tuple(map(float, m)), tuple(map(float, slopes)))


def ratio_approx_diagnostic(signal_powers: Sequence[float], noise_powers: Sequence[float]) -> dict:
    """Coefficients of variation of S and N, and the relative gap between
    mean(S/N) and mean(S)/mean(N)."""
    s = np.asarray(signal_powers, dtype=np.float64)
    n = np.asarray(noise_powers, dtype=np.float64)
    if s.shape != n.shape or s.ndim != 1:
        raise DataError("signal and noise samples must be paired 1-D sequences")
    if s.size < 30:
        raise DataError("need at least 30 paired samples")
    if np.any(s <= 0) or np.any(n <= 0) or not (np.all(np.isfinite(s)) and np.all(np.isfinite(n))):
        raise DataError("powers must be finite and positive")
    ms, mn = s.mean(), n.mean()
    ratio_of_means = ms / mn
    gap = abs(np.mean(s / n) - ratio_of_means) / ratio_of_means
    return {
        "c_S": float(s.std(ddof=1) / ms),
        "c_N": float(n.std(ddof=1) / mn),
        "max_relative_gap": float(gap),
    }


def octave_decay(levels: Sequence[int], intercepts: Sequence[float]) -> dict:
    z = np.asarray(levels, dtype=np.float64)
    b = np.asarray(intercepts, dtype=np.float64)
    if z.size < 4:
        raise AnalysisError("need per-level fits for at least 4 levels")
    per_octave = float(np.polyfit(z, b, 1)[0])
    per_log = float(np.polyfit(10.0 * np.log10(z), b, 1)[0])
    return {"db_per_octave_measured": per_octave, "db_per_octave_log_fit": per_log}


def compare_octave_decay(
    records: Sequence[SnrSweepRecord], window: Sequence[float] = (50.0, 270.0)
) -> dict:
    """Slope of per-level intercept against depth z and against 10*log10(z)."""
    fits = fit_levels(records, window)
    return octave_decay(list(fits), [f.intercept for f in fits.values()])


def precision_requirement(
    fit: RegressionFit,
    f: FirFilter,
    max_noise_fraction: float = 0.01,
    calibration_mode: str = "paper-literal",
) -> dict:
    """Coefficient accuracy needed so output noise stays below a fraction of output power.

    Inverts snr_out = intercept + slope * snr_in for the target output SNR and
    converts the result to a per-tap noise standard deviation.
    """
    if not 0 < max_noise_fraction < 1:
        raise ParameterError("max_noise_fraction must lie in (0, 1)")
    if fit.slope <= 0:
        raise ParameterError("fit slope must be positive to invert")
    def invert(target_db):
        required = (target_db - fit.intercept) / fit.slope
        return required, calibrate_lambda(f, PerturbationSpec(required, 0, calibration_mode))

    target = -10.0 * math.log10(max_noise_fraction)
    required, lam = invert(target)
    # same fraction read as an amplitude ratio, for comparison only
    amp_required, amp_lam = invert(2.0 * target)
    return {
        "max_noise_fraction": max_noise_fraction,
        "target_snr_out_db": target,
        "required_snr_in_db": required,
        "coefficient_error": lam,
        "amplitude_reading_required_snr_in_db": amp_required,
        "amplitude_reading_coefficient_error": amp_lam,
    }


def mk_interpretation(n: int, m: int = 7, k: int = 6) -> dict:
    """How the published (m, k) pair maps onto cascade levels under one reading."""
    return {
        "m": m,
        "k": k,
        "reading": "levels m+1..m+k are estimated after m prior downsamplings",
        "levels": [m + 1, m + k],
        "scale_labels": [scale_label(n, m + 1), scale_label(n, m + k)],
        "plotted_range_levels": [5, 12],
        "plotted_range_labels": [scale_label(n, 5), scale_label(n, 12)],
    }

"""Declarative experiment configuration (JSON)."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .cascade import DETAIL_MODES, PRECISIONS, max_level
from .errors import ParameterError
from .fft_baseline import FFT_MODES
from .io import dumps
from .perturbation import CALIBRATION_MODES


@dataclass
class ExperimentConfig:
    """All knobs of a run. Defaults follow the published experiment.

    ``aggregate_levels`` restricts the all-levels (level 0) record to a
    sub-range of ``[z_min, z_max]``; ``None`` aggregates every level.
    """

    n: int = 2**14
    filter_order: int = 30
    cutoff: float = 0.5
    z_min: int = 1
    z_max: int = 12
    snr_start_db: float = 380.0
    snr_stop_db: float = 0.0
    snr_step_db: float = 10.0
    trials: int = 100
    master_seed: int = 0
    calibration_mode: str = "paper-literal"
    fit_window: tuple[float, float] = (50.0, 270.0)
    output_dir: str = "out"
    detail_mode: str = "stage"
    reference_precision: str = "extended"
    aggregate_levels: tuple[int, int] | None = None
    fft_sizes: tuple[int, ...] = tuple(2**k for k in range(8, 17))
    fft_trials: int = 20
    fft_mode: str = "halfband"

    def __post_init__(self):
        for key in ("snr_start_db", "snr_stop_db"):
            if isinstance(getattr(self, key), str):
                setattr(self, key, float(getattr(self, key)))
        self.fit_window = tuple(float(v) for v in self.fit_window)
        if self.aggregate_levels is not None:
            self.aggregate_levels = tuple(int(v) for v in self.aggregate_levels)
        self.fft_sizes = tuple(int(v) for v in self.fft_sizes)
        self.validate()

    def validate(self) -> None:
        n = self.n
        if not isinstance(n, int) or n < 4 or n & (n - 1):
            raise ParameterError(f"n must be a power of two >= 4, got {n!r}")
        if not 1 <= self.z_min <= self.z_max <= max_level(n):
            raise ParameterError(
                f"need 1 <= z_min <= z_max <= log2(n)={max_level(n)}, got [{self.z_min}, {self.z_max}]"
            )
        if not self.snr_step_db > 0:
            raise ParameterError("snr_step_db must be positive")
        for key in ("snr_start_db", "snr_stop_db"):
            v = getattr(self, key)
            # +inf (no perturbation) is allowed only as a single-point grid
            if math.isnan(v) or v == -math.inf or (v == math.inf and self.snr_start_db != self.snr_stop_db):
                raise ParameterError(f"{key} must be finite, or +inf for a single-point grid")
        if self.trials < 1 or self.fft_trials < 1:
            raise ParameterError("trials must be >= 1")
        if self.calibration_mode not in CALIBRATION_MODES:
            raise ParameterError(f"calibration_mode must be one of {CALIBRATION_MODES}")
        if self.detail_mode not in DETAIL_MODES:
            raise ParameterError(f"detail_mode must be one of {DETAIL_MODES}")
        if self.reference_precision not in PRECISIONS:
            raise ParameterError(f"reference_precision must be one of {PRECISIONS}")
        if self.fft_mode not in FFT_MODES:
            raise ParameterError(f"fft_mode must be one of {FFT_MODES}")
        lo, hi = self.fit_window
        if not lo < hi:
            raise ParameterError("fit_window must be [lo, hi] with lo < hi")
        if self.aggregate_levels is not None:
            a, b = self.aggregate_levels
            if not self.z_min <= a <= b <= self.z_max:
                raise ParameterError("aggregate_levels must lie inside [z_min, z_max]")
        if self.filter_order < 2 or self.filter_order % 2:
            raise ParameterError("filter_order must be even and >= 2")

    @property
    def snr_grid(self) -> list[float]:
        start, stop, step = self.snr_start_db, self.snr_stop_db, self.snr_step_db
        if start == stop:
            return [start]
        count = int(math.floor(abs(stop - start) / step + 1e-9)) + 1
        sign = -1.0 if stop < start else 1.0
        return [start + sign * k * step for k in range(count)]

    @property
    def levels(self) -> range:
        return range(self.z_min, self.z_max + 1)

    @property
    def aggregate_range(self) -> tuple[int, int]:
        return self.aggregate_levels or (self.z_min, self.z_max)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["fit_window"] = list(self.fit_window)
        out["fft_sizes"] = list(self.fft_sizes)
        if self.aggregate_levels is not None:
            out["aggregate_levels"] = list(self.aggregate_levels)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        with open(path) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ParameterError("config file must hold a JSON object")
        return cls.from_dict(data)


def reference_config(**overrides) -> ExperimentConfig:
    """Published setup; the all-scales aggregate covers labels 2**2..2**9."""
    base = ExperimentConfig(aggregate_levels=(5, 12))
    return base.replace(**overrides) if overrides else base

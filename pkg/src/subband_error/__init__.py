"""Error propagation through a recursive low-pass/downsample cascade."""

from .analysis import (
    RegressionFit,
    SnrSweepRecord,
    compare_octave_decay,
    detect_regimes,
    fit_levels,
    fit_linear,
    output_snr,
    precision_requirement,
    ratio_approx_diagnostic,
    run_sweep,
)
from .bounds import (
    BoundsReport,
    bounds_report,
    f1_bounds,
    f1_bruteforce,
    noise_power_approx,
    numerator_bounds,
    snr_upper_bound,
)
from .cascade import (
    DecompositionResult,
    decompose,
    direct_detail_oracle,
    generate_white_noise,
    lowpass_downsample,
    noise_difference_oracle,
)
from .config import ExperimentConfig, reference_config
from .errors import *  # noqa: F401,F403
from .fft_baseline import FftErrorRecord, fft_decay_fit, fft_roundoff_snr, fft_series
from .filters import FirFilter, design_halfband_lowpass, filter_stats, from_coefficients
from .perturbation import PerturbationSpec, calibrate_lambda, derive_seed, perturb, realized_input_snr

__version__ = "0.1.0"

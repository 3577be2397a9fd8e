"""Command-line entry point: ``subband-error <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import _backend
from . import analysis as an
from . import bounds as bd
from . import fft_baseline as fb
from .cascade import decompose, generate_white_noise
from .config import ExperimentConfig, reference_config
from .errors import SubbandError
from .filters import filter_stats
from .io import read_signal_csv, write_csv, write_json
from .perturbation import derive_seed

SWEEP_COLUMNS = ("snr_in_db", "level", "scale_label", "trial", "signal_power", "noise_power", "snr_out_db")
LABEL_CONVENTION = "scale label 2**j is the coefficient count n / 2**z at level z"

# (flag, config key, type)
OVERRIDES = (
    ("--n", "n", int),
    ("--filter-order", "filter_order", int),
    ("--cutoff", "cutoff", float),
    ("--z-min", "z_min", int),
    ("--z-max", "z_max", int),
    ("--snr-start", "snr_start_db", float),
    ("--snr-stop", "snr_stop_db", float),
    ("--snr-step", "snr_step_db", float),
    ("--calibration-mode", "calibration_mode", str),
    ("--detail-mode", "detail_mode", str),
    ("--reference-precision", "reference_precision", str),
    ("--fft-trials", "fft_trials", int),
    ("--fft-mode", "fft_mode", str),
)


class _Outputs:
    """Tracks files written by a subcommand so a failure can remove them."""

    def __init__(self, root: Path):
        self.root = root
        self.paths: list[Path] = []
        self._created_root = not root.exists()

    def path(self, name: str) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        p = self.root / name
        self.paths.append(p)
        return p

    def rollback(self) -> None:
        for p in self.paths:
            p.unlink(missing_ok=True)
        if self._created_root:
            try:
                self.root.rmdir()
            except OSError:
                pass


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON experiment config")
    common.add_argument("--out", type=Path, help="output directory (default: config output_dir)")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--trials", type=int, help="Monte-Carlo trials per grid point")
    common.add_argument("--fit-window", type=float, nargs=2, metavar=("LO", "HI"))
    common.add_argument("--aggregate-levels", type=int, nargs=2, metavar=("ZLO", "ZHI"))
    common.add_argument("--backend", choices=("auto", "python", "compiled"), default=None)
    common.add_argument("--quiet", action="store_true")
    for flag, key, typ in OVERRIDES:
        common.add_argument(flag, dest=key, type=typ)

    p = argparse.ArgumentParser(prog="subband-error", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("design", parents=[common], help="design the low-pass filter")
    dec = sub.add_parser("decompose", parents=[common], help="per-level detail coefficients")
    dec.add_argument("--input", type=Path, help="signal CSV (one sample per line)")
    sub.add_parser("sweep", parents=[common], help="Monte-Carlo input/output SNR sweep")
    bnd = sub.add_parser("bounds", parents=[common], help="analytic bounds per level")
    bnd.add_argument("--snr-in", type=float, default=100.0)
    sub.add_parser("fft-baseline", parents=[common], help="FFT round-off reference")
    sub.add_parser("report", parents=[common], help="join results into summary.json")
    return p


def _config_from(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else reference_config()
    changes = {key: getattr(args, key) for _, key, _ in OVERRIDES if getattr(args, key) is not None}
    if args.seed is not None:
        changes["master_seed"] = args.seed
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.fit_window is not None:
        changes["fit_window"] = tuple(args.fit_window)
    if args.aggregate_levels is not None:
        changes["aggregate_levels"] = tuple(args.aggregate_levels)
    if args.out is not None:
        changes["output_dir"] = str(args.out)
    if cfg.aggregate_levels is not None and "aggregate_levels" not in changes:
        lo, hi = cfg.aggregate_levels
        # an explicit level range that no longer contains the default aggregate replaces it
        if not changes.get("z_min", cfg.z_min) <= lo <= hi <= changes.get("z_max", cfg.z_max):
            changes["aggregate_levels"] = None
    return cfg.replace(**changes) if changes else cfg


def _log(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr)


def cmd_design(cfg, out: _Outputs, args, backend) -> dict:
    f = an.config_filter(cfg)
    write_csv(out.path("filter.csv"), ("index", "coefficient"), enumerate(f.coefficients))
    info = {
        "filter_order": cfg.filter_order,
        "cutoff": cfg.cutoff,
        "window": f.window,
        "taps": f.taps,
        "dc_gain": f.dc_gain,
        "symmetry_error": f.symmetry_error(),
        "stats": filter_stats(f).as_dict(),
    }
    write_json(out.path("filter.json"), info)
    return info


def cmd_decompose(cfg, out: _Outputs, args, backend) -> dict:
    if args.input is not None:
        s = read_signal_csv(args.input)
        source = str(args.input)
    else:
        s = generate_white_noise(cfg.n, derive_seed(cfg.master_seed, 0))
        source = "white-noise"
    f = an.config_filter(cfg)
    res = decompose(s, f, cfg.z_max, cfg.detail_mode, "working", backend)
    for z in cfg.levels:
        write_csv(out.path(f"details_z{z}.csv"), ("y", "detail"), enumerate(res.detail(z)))
    return {"source": source, "n": res.n, "levels": list(cfg.levels), "mode": cfg.detail_mode}


def sweep_summary(cfg: ExperimentConfig, records) -> dict:
    try:
        agg = an.fit_linear(records, cfg.fit_window).as_dict()
        per_level = an.fit_levels(records, cfg.fit_window)
    except SubbandError as exc:
        agg, per_level = {"error": str(exc)}, {}
    out = {
        "config": cfg.to_dict(),
        "aggregate": agg,
        "aggregate_levels": list(cfg.aggregate_range),
        "per_level": {str(z): dict(fit.as_dict(), scale_label=cfg.n >> z) for z, fit in per_level.items()},
        "scale_label_convention": LABEL_CONVENTION,
        "mk_interpretation": an.mk_interpretation(cfg.n),
    }
    try:
        out["regimes"] = an.detect_regimes(records, bin_width=cfg.snr_step_db).as_dict()
    except SubbandError as exc:
        out["regimes"] = {"error": str(exc)}
    if len(per_level) >= 4:
        out["octave_decay"] = an.octave_decay(list(per_level), [f.intercept for f in per_level.values()])
    probe = [r for r in records if r.level == an.AGGREGATE and r.snr_in_db == 100.0]
    if len(probe) >= 30:
        out["ratio_diagnostic_100db"] = an.ratio_approx_diagnostic(
            [r.signal_power for r in probe], [r.noise_power for r in probe]
        )
    return out


def cmd_sweep(cfg, out: _Outputs, args, backend) -> dict:
    total = len(cfg.snr_grid) * cfg.trials

    def progress(done, _total):
        if done % max(1, total // 10) == 0:
            _log(args, f"sweep: {done}/{total} trials")

    records = an.run_sweep(cfg, backend, progress)
    write_csv(out.path("sweep.csv"), SWEEP_COLUMNS, ([getattr(r, c) for c in SWEEP_COLUMNS] for r in records))
    summary = sweep_summary(cfg, records)
    write_json(out.path("fits.json"), summary)
    return summary


def bounds_table(cfg, snr_in: float) -> list[dict]:
    f = an.config_filter(cfg)
    return [bd.bounds_report(f, z, cfg.n, snr_in).as_dict() for z in cfg.levels]


def cmd_bounds(cfg, out: _Outputs, args, backend) -> dict:
    rows = bounds_table(cfg, args.snr_in)
    doc = {"snr_in_db": args.snr_in, "levels": rows, "f1_readings": bd.F1_READINGS,
           "f1_default_reading": "all-pairs"}
    write_json(out.path("bounds.json"), doc)
    if not args.quiet:
        print(json.dumps(doc["levels"], default=str, indent=2))
    return doc


def fft_summary(cfg, records) -> dict:
    doc = {
        "mode": cfg.fft_mode,
        "records": [{"size": r.size, "snr_db": r.snr_db, "ci95": r.ci95, "trials": r.trials} for r in records],
        "cost_table": fb.cost_table([r.size for r in records], cfg.filter_order),
    }
    doc["decay_fit"] = fb.fft_decay_fit(records) if len(records) >= 4 else None
    return doc


def cmd_fft(cfg, out: _Outputs, args, backend) -> dict:
    records = fb.fft_series(cfg.fft_sizes, cfg.fft_trials, cfg.master_seed, cfg.fft_mode, backend=backend)
    rows = ((r.size, t, v) for r in records for t, v in enumerate(r.trial_snr_db))
    write_csv(out.path("fft_errors.csv"), ("size", "trial", "snr_db"), rows)
    doc = fft_summary(cfg, records)
    write_json(out.path("fft_summary.json"), doc)
    return doc


def _load_or_run(path: Path, run):
    if path.exists():
        return json.loads(path.read_text())
    return run()


def report_rows(fits: dict, fft: dict | None) -> list[tuple[str, str, str]]:
    def num(x, fmt="{:.3f}"):
        return fmt.format(x) if isinstance(x, (int, float)) else str(x)

    agg = fits["aggregate"]
    rows = [
        ("aggregate slope", num(agg["slope"]), str(an.PUBLISHED_SLOPE)),
        ("aggregate intercept (dB)", num(agg["intercept"], "{:.2f}"), str(an.PUBLISHED_INTERCEPT)),
    ]
    reg = fits.get("regimes", {})
    rows.append(("plateau threshold (dB)", num(reg.get("plateau_threshold_db"), "{}"), f"> {an.PUBLISHED_PLATEAU_DB:g}"))
    rows.append(("breakdown threshold (dB)", num(reg.get("breakdown_threshold_db"), "{}"), f"< {an.PUBLISHED_BREAKDOWN_DB:g}"))
    for z, fit in sorted(fits["per_level"].items(), key=lambda kv: int(kv[0])):
        label = fit["scale_label"]
        j = int(round(math.log2(label))) if label > 0 else None
        published = an.PUBLISHED_LEVEL_INTERCEPTS.get(j)
        rows.append((f"intercept z={z} (label 2^{j})", num(fit["intercept"], "{:.2f}"),
                     "-" if published is None else f"{published:.2f}"))
    decay = fits.get("octave_decay")
    if decay:
        rows.append(("intercept dB/octave", num(decay["db_per_octave_measured"], "{:.2f}"), str(an.PUBLISHED_DB_PER_OCTAVE)))
        rows.append(("intercept dB per 10log10(z)", num(decay["db_per_octave_log_fit"], "{:.2f}"),
                     str(an.PUBLISHED_DB_PER_OCTAVE_LOG)))
    prec = fits.get("precision_requirement")
    if prec:
        rows.append(("required input SNR for 1% noise (dB)", num(prec["required_snr_in_db"], "{:.1f}"), "100"))
        rows.append(("required coefficient error", num(prec["coefficient_error"], "{:.2e}"), "5e-05"))
    if fft:
        first = fft["records"][0]
        rows.append((f"FFT SNR at size {first['size']} (dB)", num(first["snr_db"], "{:.1f}"), "> 300"))
        if fft.get("decay_fit"):
            d = fft["decay_fit"]
            rows.append(("FFT total degradation (dB)", num(d["total_degradation_db"], "{:.1f}"), "about 20"))
            rows.append(("FFT decay dB/octave | bits/octave",
                         f"{d['per_octave_decay_db']:.3f} | {d['per_octave_decay_bits']:.3f}", "0.85 (units unstated)"))
    return rows


def format_table(rows) -> str:
    w0 = max(len(r[0]) for r in rows)
    w1 = max(max(len(r[1]) for r in rows), len("measured"))
    lines = [f"{'quantity':<{w0}}  {'measured':>{w1}}  published", "-" * (w0 + w1 + 13)]
    lines += [f"{a:<{w0}}  {b:>{w1}}  {c}" for a, b, c in rows]
    return "\n".join(lines) + "\n"


def cmd_report(cfg, out: _Outputs, args, backend) -> dict:
    root = Path(cfg.output_dir)
    fits = _load_or_run(root / "fits.json", lambda: cmd_sweep(cfg, out, args, backend))
    bnds = _load_or_run(root / "bounds.json", lambda: {"levels": bounds_table(cfg, 100.0)})
    fft = _load_or_run(root / "fft_summary.json", lambda: cmd_fft(cfg, out, args, backend))
    deepest = max(fits["per_level"], key=int)
    deep = fits["per_level"][deepest]
    fit = an.RegressionFit(deep["slope"], deep["intercept"], deep["r_squared"], deep["ci95_slope"],
                           deep["ci95_intercept"], tuple(deep["window"]), deep["n_points"])
    fits = dict(fits, precision_requirement=dict(
        an.precision_requirement(fit, an.config_filter(cfg), 0.01, cfg.calibration_mode), level=int(deepest)))
    rows = report_rows(fits, fft)
    summary = {
        "sweep": fits,
        "bounds": bnds["levels"],
        "fft": fft,
        "table": [list(r) for r in rows],
    }
    write_json(out.path("summary.json"), summary)
    text = format_table(rows)
    out.path("report.txt").write_text(text)
    if not args.quiet:
        print(text, end="")
    return summary


COMMANDS = {
    "design": cmd_design,
    "decompose": cmd_decompose,
    "sweep": cmd_sweep,
    "bounds": cmd_bounds,
    "fft-baseline": cmd_fft,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    out = None
    try:
        cfg = _config_from(args)
        backend = _backend.get(args.backend) if args.backend else None
        out = _Outputs(Path(cfg.output_dir))
        COMMANDS[args.command](cfg, out, args, backend)
    except (SubbandError, ValueError, ArithmeticError, OSError, KeyError, RuntimeError) as exc:
        if out is not None:
            out.rollback()
        err = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        print(json.dumps(err), file=sys.stderr)
        return 2
    except BaseException:
        if out is not None:
            out.rollback()
        raise
    return 0


if __name__ == "__main__":
    sys.exit(main())

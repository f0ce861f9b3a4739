"""
Command-Line Entry Point for the Biofilm Electrochemical Signalling Simulator.

Subcommands:
    simulate  Run one experiment from a config file or a committed preset
    sweep     Run the pulse-train preset over a list of pulse periods
    validate  Check a configuration without running it

Exit codes: 0 success, 2 validation failure, 3 stability fault, 4 I/O error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from joblib import Parallel, delayed

from integrator import config_fingerprint, run
from observe import Trajectory, compute_metrics
from reports import (
    emit_events_csv,
    emit_metrics_json,
    emit_spacetime_csv,
    emit_svg_plot,
    emit_sweep_summary,
    emit_timeseries_csv,
)
from scenario import PERIODIC_PRESETS, PRESET_NAMES, ExperimentConfig, load_config, preset
from src.config.settings import (
    APP_NAME,
    APP_VERSION,
    DEFAULT_SWEEP_PERIODS_HR,
    EVENTS_FILENAME,
    SPACETIME_FILENAME,
    SWEEP_SUMMARY_FILENAME,
    get_sweep_threads,
)
from src.exceptions import (
    BiofilmSimError,
    ConfigParseError,
    EmptySeriesError,
    OutputError,
    StabilityError,
    StateCorruptionError,
    ValidationError,
)
from src.types import ExitCode
from src.utils.logging import configure_app_logging, get_logger


logger = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=APP_NAME,
        description="Simulate potassium signalling waves in a growing bacterial biofilm.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {APP_VERSION}")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--log-file", default=None, help="Also write JSON log lines to this file")
    parser.add_argument("--log-json", action="store_true", help="Emit JSON log lines on stderr")

    subparsers = parser.add_subparsers(dest="command", required=True)

    simulate = subparsers.add_parser("simulate", help="Run one experiment")
    source = simulate.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=Path, help="Path to a JSON configuration")
    source.add_argument("--preset", choices=PRESET_NAMES, help="Committed scenario preset")
    simulate.add_argument("--period", type=float, default=None, help="Pulse period T_p (hr), pulse-train only")
    simulate.add_argument("--out-dir", type=Path, default=Path("."), help="Directory for output files")

    sweep = subparsers.add_parser("sweep", help="Run the pulse-train preset over several periods")
    sweep.add_argument("--preset", default="pulse-train", help="Periodic preset to sweep")
    sweep.add_argument(
        "--periods",
        default=",".join(f"{p:g}" for p in DEFAULT_SWEEP_PERIODS_HR),
        help="Comma-separated pulse periods (hr)",
    )
    sweep.add_argument("--out-dir", type=Path, default=Path("."), help="Directory for output files")

    validate = subparsers.add_parser("validate", help="Validate a configuration")
    source = validate.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=Path, help="Path to a JSON configuration")
    source.add_argument("--preset", choices=PRESET_NAMES, help="Committed scenario preset")

    return parser


def exit_code_for(exc: BiofilmSimError) -> ExitCode:
    """Map a simulator error onto the process exit code."""
    if isinstance(exc, (ValidationError, ConfigParseError, EmptySeriesError)):
        return ExitCode.VALIDATION
    if isinstance(exc, (StabilityError, StateCorruptionError)):
        return ExitCode.STABILITY
    if isinstance(exc, OutputError):
        return ExitCode.IO
    return ExitCode.VALIDATION


def _load(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is not None:
        if getattr(args, "period", None) is not None:
            raise ValidationError("--period applies to presets only", field="period")
        return load_config(args.config)
    return preset(args.preset, period=getattr(args, "period", None))


def write_outputs(config: ExperimentConfig, traj: Trajectory, out_dir: Path) -> dict[str, Any]:
    """Compute the metrics and write every enabled output into ``out_dir``."""
    if len(traj) == 0:
        raise ValidationError("trajectory has no probe samples", field="probes")
    metrics = compute_metrics(traj, config.metrics)

    outputs = config.outputs
    emit_timeseries_csv(traj, out_dir / outputs.timeseries_path)
    if not traj.events.empty:
        emit_events_csv(traj, out_dir / EVENTS_FILENAME)
    if config.spacetime.enabled:
        emit_spacetime_csv(traj, out_dir / (outputs.spacetime_path or SPACETIME_FILENAME))
    emit_metrics_json(metrics, out_dir / outputs.metrics_path)
    if outputs.svg_path:
        emit_svg_plot(
            traj,
            outputs.svg_field,
            config.probes[0].x,
            out_dir / outputs.svg_path,
            title=config.scenario,
        )
    return metrics


def cmd_simulate(args: argparse.Namespace) -> ExitCode:
    config = _load(args)
    traj = run(config)
    write_outputs(config, traj, args.out_dir)
    logger.info("Simulation outputs complete", extra={"out_dir": str(args.out_dir), "scenario": config.scenario})
    return ExitCode.SUCCESS


def parse_periods(raw: str) -> list[float]:
    """Parse a comma-separated list of positive periods, sorted ascending without duplicates."""
    try:
        periods = [float(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise ValidationError(f"cannot parse '{raw}' as a list of numbers", field="periods") from exc
    if not periods:
        raise ValidationError("at least one period is required", field="periods")
    if any(p <= 0 for p in periods):
        raise ValidationError("periods must be positive", field="periods")
    return sorted(set(periods))


def run_period(name: str, period: float, out_dir: Path) -> dict[str, Any]:
    """One sweep point: run the preset at ``period`` and summarize the first probe."""
    config = preset(name, period=period)
    traj = run(config)
    metrics = write_outputs(config, traj, out_dir / f"period_{period:g}")
    first = metrics[f"{config.probes[0].x:g}"]
    return {
        "period_hr": period,
        "peak_count": len(first["peak_times"]),
        "mean_attenuation": first["mean_attenuation"],
    }


def cmd_sweep(args: argparse.Namespace) -> ExitCode:
    if args.preset not in PERIODIC_PRESETS:
        raise ValidationError(
            f"preset '{args.preset}' cannot be swept (choose from {', '.join(PERIODIC_PRESETS)})",
            field="preset",
        )
    periods = parse_periods(args.periods)
    n_jobs = min(get_sweep_threads(), len(periods))
    logger.info("Starting sweep", extra={"preset": args.preset, "periods": periods, "workers": n_jobs})

    rows = Parallel(n_jobs=n_jobs)(
        delayed(run_period)(args.preset, period, args.out_dir) for period in periods
    )
    emit_sweep_summary(rows, args.out_dir / SWEEP_SUMMARY_FILENAME)
    logger.info("Sweep complete", extra={"runs": len(rows)})
    return ExitCode.SUCCESS


def cmd_validate(args: argparse.Namespace) -> ExitCode:
    config = _load(args)
    print(f"valid {config.scenario or 'custom'} {config_fingerprint(config)}")
    return ExitCode.SUCCESS


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, dispatch the subcommand and return its exit code."""
    args = build_parser().parse_args(argv)

    level = None
    if args.log_level:
        level = logging.getLevelName(args.log_level.upper())
        if not isinstance(level, int):
            level = None
    try:
        configure_app_logging(level=level, log_file=args.log_file, use_json=args.log_json or None)
    except OSError as exc:
        print(f"error: cannot open log file: {exc}", file=sys.stderr)
        return int(ExitCode.IO)

    try:
        return int(COMMANDS[args.command](args))
    except BiofilmSimError as exc:
        code = exit_code_for(exc)
        logger.error(str(exc), extra={"error": type(exc).__name__, "exit_code": int(code)})
        return int(code)


if __name__ == "__main__":
    sys.exit(main())

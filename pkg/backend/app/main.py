"""
Command-line entry point: python -m backend.app.main <command> [options]

Exit codes: 0 success, 1 verification failure, 2 unphysical input,
3 CM parse error, 4 configuration error, 5 numerical failure on valid input.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional

import pandas as pd

from backend.app import config
from backend.app.exceptions import CMParseError, ConfigError, SteeringError, UnphysicalStateError
from backend.app.models import GridAxis, RunConfig
from backend.app.services.cm_reader import read_cm
from backend.app.steering.report import build_report, require_bona_fide
from backend.evaluators.monte_carlo import batch_to_frame, sample_gaussian
from backend.pipelines.run_verify import run_verify, summarize
from backend.pipelines.scans import scan_bounds, scan_regions, write_frame

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_UNPHYSICAL = 2
EXIT_PARSE = 3
EXIT_CONFIG = 4
EXIT_NUMERICAL = 5


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors (exit 4), not argparse's default exit 2
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=str, help=f"JSON RunConfig file (default: ${config.CONFIG_ENV_VAR})")
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", type=float, help="PSD / eigenvalue threshold")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--output", type=str, help="write to this file instead of stdout")
    common.add_argument("--workers", type=int)
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true")
    verbosity.add_argument("--quiet", "-q", action="store_true")

    parser = _Parser(prog="steering", description="Gaussian EPR steering of bipartite covariance matrices")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    report = commands.add_parser("report", parents=[common], help="full report for one CM file")
    report.add_argument("--input", type=str, required=True)
    report.add_argument("--bits", action="store_true", help="key rates in bits instead of nats")

    regions = commands.add_parser("scan-regions", parents=[common], help="purity-region map at fixed eta")
    regions.add_argument("--eta", type=float)
    regions.add_argument("--grid", type=GridAxis.parse, help="mu grid MIN:MAX:STEPS (both axes)")

    bounds = commands.add_parser("scan-bounds", parents=[common], help="steering versus entanglement curves")
    bounds.add_argument("--grid", type=GridAxis.parse, help="s grid MIN:MAX:STEPS")
    bounds.add_argument("--s-max", type=float, dest="s_max")
    bounds.add_argument("--a", type=float)

    verify = commands.add_parser("verify", parents=[common], help="run the property and oracle suites")
    verify.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    verify.add_argument("--samples", type=int, help="Monte Carlo samples per oracle state")

    sample = commands.add_parser("sample", parents=[common], help="draw Gaussian samples from a CM")
    sample.add_argument("--input", type=str, required=True)
    sample.add_argument("--samples", type=int)

    return parser


def _load_config_file(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot load config {path}: {e}") from e
    if not isinstance(payload, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return payload


def _axis(value, default: GridAxis) -> GridAxis:
    if value is None:
        return default
    if isinstance(value, GridAxis):
        return value
    if isinstance(value, str):
        return GridAxis.parse(value)
    try:
        return GridAxis.model_validate(value)
    except ValueError as e:
        raise ConfigError(f"invalid grid {value!r}: {e}") from e


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """Config file (--config or the environment) with command-line flags on top."""
    fields = _load_config_file(args.config or config.default_config_path())
    defaults = RunConfig()

    for name in ("seed", "eta", "a", "samples", "workers", "format"):
        value = getattr(args, name, None)
        if value is not None:
            fields[name] = value
    if args.output:
        fields["output_path"] = args.output
    if getattr(args, "bits", False):
        fields["bits"] = True
    if args.tol is not None:
        fields["tolerances"] = {**fields.get("tolerances", {}), "psd": args.tol}

    grid = getattr(args, "grid", None)
    if args.command == "scan-regions":
        fields["mu_grid"] = _axis(grid or fields.get("mu_grid"), defaults.mu_grid)
    if args.command == "scan-bounds":
        s_grid = _axis(grid or fields.get("s_grid"), defaults.s_grid)
        if args.s_max is not None:
            s_grid = _axis({"min": s_grid.min, "max": args.s_max, "steps": s_grid.steps}, s_grid)
        fields["s_grid"] = s_grid
    if args.command == "verify" and args.samples is not None:
        suite_params = fields.setdefault("suite_params", {})
        suite_params["oracle_reid"] = {**suite_params.get("oracle_reid", {}), "samples": args.samples}

    return RunConfig.build(**fields)


def _emit(text: str, path: Optional[Path]) -> None:
    if path is None:
        print(text, end="" if text.endswith("\n") else "\n")
    else:
        Path(path).write_text(text)
        logger.info("Wrote %s", path)


def cmd_report(args, run_config: RunConfig) -> int:
    sigma = read_cm(args.input)
    report = build_report(sigma, bits=run_config.bits)
    if run_config.format == "csv":
        text = pd.json_normalize(report).to_csv(index=False, float_format=f"%.{config.OUTPUT_DIGITS}g")
    else:
        text = json.dumps(report, indent=2)
    _emit(text, run_config.output_path)
    return EXIT_OK


def _emit_frame(frame: pd.DataFrame, args, run_config: RunConfig) -> None:
    fmt = args.format or "csv"
    if run_config.output_path is None:
        _emit(write_frame(frame, None, fmt), None)
    else:
        write_frame(frame, run_config.output_path, fmt)


def cmd_scan_regions(args, run_config: RunConfig) -> int:
    _emit_frame(scan_regions(run_config), args, run_config)
    return EXIT_OK


def cmd_scan_bounds(args, run_config: RunConfig) -> int:
    _emit_frame(scan_bounds(run_config), args, run_config)
    return EXIT_OK


def cmd_verify(args, run_config: RunConfig) -> int:
    show_progress = not args.quiet and sys.stderr.isatty()
    try:
        results = run_verify(run_config, args.suite, progress=show_progress)
    except KeyError as e:
        raise ConfigError(str(e)) from e
    summary = summarize(results)
    _emit(json.dumps(summary, indent=2), run_config.output_path)
    failed = [result.name for result in results if not result.passed]
    if failed:
        logger.error("Verification failed: %s", ", ".join(failed))
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_sample(args, run_config: RunConfig) -> int:
    sigma = read_cm(args.input)
    require_bona_fide(sigma)
    batch = sample_gaussian(sigma, run_config.samples, run_config.seed, run_config.workers)
    text = batch_to_frame(batch).to_csv(index=False, float_format=f"%.{config.OUTPUT_DIGITS}g")
    _emit(text, run_config.output_path)
    return EXIT_OK


COMMANDS = {
    "report": cmd_report,
    "scan-regions": cmd_scan_regions,
    "scan-bounds": cmd_scan_bounds,
    "verify": cmd_verify,
    "sample": cmd_sample,
}


def _configure_logging(argv: list[str]) -> None:
    level = logging.WARNING
    if "--verbose" in argv or "-v" in argv:
        level = logging.DEBUG
    elif "--quiet" in argv or "-q" in argv:
        level = logging.ERROR
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def main(argv: Optional[list[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    _configure_logging(argv)
    saved_tolerances = dict(config.TOLERANCES)
    try:
        args = build_parser().parse_args(argv)
        run_config = load_run_config(args)
        config.override_tolerances(**run_config.tolerances)
        return COMMANDS[args.command](args, run_config)
    except UnphysicalStateError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNPHYSICAL
    except CMParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SteeringError as e:
        # ill-conditioned blocks, inconsistent invariants and the like
        print(f"numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    finally:
        config.TOLERANCES.update(saved_tolerances)


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line front end: presets, duration scans, distance scans, fits.

Simulation output is CSV (one row per pulse duration); fit and protocol
results are JSON reports. Given the same config file and seed, outputs are
byte-identical across runs.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .analysis import fit_damped_cosine, frequency_ratio
from .config import (
    PRESET_NAMES,
    load_config_document,
    load_preset_document,
    config_from_dict,
    protocol_from_dict,
    protocol_shots,
)
from .errors import ConfigError, FitError
from .measurement import DataSet, run_exact, run_experiment
from .protocol import run_protocol

EXIT_OK = 0
EXIT_MISSING_FILE = 3
EXIT_BAD_CONFIG = 4
EXIT_SIMULATION_FAILED = 5

_EXIT_CODE_HELP = """\
exit codes:
  0  success
  2  command-line usage error
  3  input file missing or unreadable
  4  config/schema violation (malformed JSON, bad value, unknown key, bad CSV)
  5  simulation or fit failure
"""


def _load_document(args) -> dict:
    if getattr(args, "preset", None):
        return load_preset_document(args.preset)
    return load_config_document(args.config)


def _apply_overrides(config, args):
    if getattr(args, "seed", None) is not None:
        config = replace(config, seed=args.seed)
    if getattr(args, "shots", None) is not None:
        config = replace(config, n_shots=args.shots)
    return config


def cmd_run(args) -> int:
    document = _load_document(args)
    config = _apply_overrides(config_from_dict(document), args)
    output = Path(args.output)
    if getattr(args, "preset", None) == "fig4":
        # fig4 compares the isolated atom against the two-atom scan, so it
        # produces one CSV per scenario, ready for `rydsim fit`.
        targets = [
            ("single-atom-a", output.with_name(output.stem + "_single" + output.suffix)),
            ("two-atom", output.with_name(output.stem + "_two" + output.suffix)),
        ]
    else:
        targets = [(config.mode, output)]
    for mode, path in targets:
        data = run_experiment(replace(config, mode=mode))
        data.to_csv(path)
        print(f"wrote {path} ({len(data.durations_ns)} rows, mode {mode})")
    return EXIT_OK


def cmd_scan_distance(args) -> int:
    document = _load_document(args)
    config = _apply_overrides(config_from_dict(document), args)
    if args.steps < 1:
        raise ConfigError(f"steps must be >= 1, got {args.steps}")
    if args.r_min <= 0 or args.r_max < args.r_min:
        raise ConfigError("need 0 < r-min <= r-max")
    radii = np.linspace(args.r_min, args.r_max, args.steps)

    # the scan maps the coherent blockade crossover, so it uses the exact
    # noiseless limit; the isolated-atom reference does not depend on R
    single = run_exact(replace(config, mode="single-atom-a"))
    fit_single = fit_damped_cosine(single, "p_a")

    lines = ["r_um,max_p_both,omega_single_mhz,omega_collective_mhz,ratio"]
    for r_um in radii:
        data = run_exact(replace(config.at_separation(float(r_um)), mode="two-atom"))
        fit_marginal = fit_damped_cosine(data, "p_a")
        ratio = frequency_ratio(fit_marginal, fit_single).ratio
        lines.append(
            f"{r_um:.6g},{np.max(data.p_both):.6g},{fit_single.omega_mhz:.6g},"
            f"{fit_marginal.omega_mhz:.6g},{ratio:.6g}"
        )
    Path(args.output).write_text("\n".join(lines) + "\n")
    print(f"wrote {args.output} ({len(radii)} rows)")
    return EXIT_OK


def cmd_fit(args) -> int:
    data = DataSet.from_csv(args.csv)
    try:
        fit = fit_damped_cosine(data, args.column)
    except KeyError as exc:
        raise ConfigError(str(exc)) from None
    fit.write_report(args.output)
    print(f"omega_mhz = {fit.omega_mhz:.6g} +- {fit.omega_stderr_mhz:.3g}")
    print(f"wrote {args.output}")
    return EXIT_OK


def cmd_protocol(args) -> int:
    document = _load_document(args)
    experiment = _apply_overrides(config_from_dict(document), args)
    protocol = protocol_from_dict(document, experiment)
    n_shots = args.shots if args.shots is not None else protocol_shots(document)
    seed = args.seed if args.seed is not None else experiment.seed
    result = run_protocol(protocol, n_shots=n_shots, seed=seed)
    result.write_report(args.output)
    print(
        f"mean_fidelity = {result.mean_fidelity:.6g}  "
        f"mean_ground_population = {result.mean_ground_population:.6g}"
    )
    print(f"wrote {args.output}")
    return EXIT_OK


def _add_config_arguments(parser, require_source=True):
    group = parser.add_mutually_exclusive_group(required=require_source)
    group.add_argument("--config", help="path to a JSON config file")
    group.add_argument("--preset", choices=PRESET_NAMES, help="named built-in scenario")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--shots", type=int, help="override the config shot count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydsim",
        description="Two-atom Rydberg blockade simulator",
        epilog=_EXIT_CODE_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser(
        "run",
        help="simulate a pulse-duration scan and write a CSV",
        description="Simulate a pulse-duration scan and write a CSV. The fig4 "
        "preset writes two CSVs, <output>_single and <output>_two.",
        epilog=_EXIT_CODE_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    _add_config_arguments(p_run)
    p_run.add_argument("--output", required=True, help="output CSV path")
    p_run.set_defaults(func=cmd_run)

    p_scan = sub.add_parser(
        "scan-distance",
        help="map the blockade crossover against interatomic distance",
        description="Exact noiseless scan over interatomic distance: maximum "
        "double-excitation probability and the fitted oscillation frequency of "
        "the single-atom excitation probability, against the isolated-atom "
        "reference. Explicit channel shifts are rescaled by the 1/R^3 law.",
        epilog=_EXIT_CODE_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    _add_config_arguments(p_scan)
    p_scan.add_argument("--r-min", type=float, required=True, help="smallest distance (um)")
    p_scan.add_argument("--r-max", type=float, required=True, help="largest distance (um)")
    p_scan.add_argument("--steps", type=int, required=True, help="number of distances")
    p_scan.add_argument("--output", required=True, help="output CSV path")
    p_scan.set_defaults(func=cmd_scan_distance)

    p_fit = sub.add_parser(
        "fit",
        help="fit A - B exp(-t/tau) cos(2 pi omega t) to a CSV column",
        epilog=_EXIT_CODE_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p_fit.add_argument("csv", help="CSV produced by `rydsim run`")
    p_fit.add_argument(
        "--column",
        default="p_a",
        help="observable column to fit (default p_a)",
    )
    p_fit.add_argument("--output", required=True, help="output JSON report path")
    p_fit.set_defaults(func=cmd_fit)

    p_proto = sub.add_parser(
        "protocol",
        help="run the two-pulse phase-erasure sequence",
        description="Run the two-pulse phase-erasure sequence and report the "
        "mean Bell fidelity conditioned on the ground manifold.",
        epilog=_EXIT_CODE_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    _add_config_arguments(p_proto)
    p_proto.add_argument("--output", required=True, help="output JSON report path")
    p_proto.set_defaults(func=cmd_protocol)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_FILE
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except FitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION_FAILED


if __name__ == "__main__":
    sys.exit(main())

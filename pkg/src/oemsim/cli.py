"""Command-line interface.

Subcommands: ``simulate`` (one scenario to CSV), ``sweep`` (a parameter grid
to CSV), ``validate`` (check a scenario file), ``figures`` (run the bundled
reproduction scenario/sweep sets).  Exit codes: 0 success, 1 configuration
error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigError, DivergenceError, InvalidParameterError, OemError
from .harness import (bundled_scenario, bundled_sweep, emit_sweep, emit_trajectory,
                      load_scenario, load_sweep, run_scenario, run_sweep)

FIG2_SCENARIOS = ("fig2_baseline", "fig2_laser", "fig2_laser_spring",
                  "fig2_laser_voltage", "fig2_full")
FIG3_SWEEPS = ("fig3_coupling", "fig3_spring_amplitude", "fig3_spring_grid",
               "fig3_sideband_ratio")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oemsim",
        description="Squeezing and entanglement dynamics of a modulated "
                    "optoelectromechanical system.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one scenario and write CSV")
    p.add_argument("scenario", type=Path)
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")

    p = sub.add_parser("sweep", help="evaluate a parameter sweep and write CSV")
    p.add_argument("sweep", type=Path)
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = sub.add_parser("validate", help="check a scenario file against all invariants")
    p.add_argument("scenario", type=Path)

    p = sub.add_parser("figures", help="run the bundled reproduction sets")
    p.add_argument("which", nargs="?", choices=("fig2", "fig3"), default=None,
                   help="restrict to one figure's set (default: both)")
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--jobs", type=int, default=1)
    return parser


def _cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    result = run_scenario(scenario)
    dest = emit_trajectory(result.record, args.out / f"{scenario.name}.csv", scenario)
    print(f"{scenario.name}: min var(Q0) = {result.min_variance:.6g}, "
          f"max E_N = {result.max_log_negativity:.6g} -> {dest}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    spec = load_sweep(args.sweep)
    result = run_sweep(spec, jobs=args.jobs)
    dest = emit_sweep(result, args.out / f"{spec.name}.csv")
    unstable = int((~result.stable).sum())
    note = f" ({unstable} unstable cell(s))" if unstable else ""
    print(f"{spec.name}: {result.stable.size} cells{note} -> {dest}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    print(f"{scenario.name}: valid")
    return EXIT_OK


def _cmd_figures(args) -> int:
    if args.which in (None, "fig2"):
        for name in FIG2_SCENARIOS:
            result = run_scenario(bundled_scenario(name))
            dest = emit_trajectory(result.record, args.out / f"{name}.csv",
                                   result.scenario)
            print(f"{name}: min var(Q0) = {result.min_variance:.6g}, "
                  f"max E_N = {result.max_log_negativity:.6g} -> {dest}")
    if args.which in (None, "fig3"):
        for name in FIG3_SWEEPS:
            result = run_sweep(bundled_sweep(name), jobs=args.jobs)
            dest = emit_sweep(result, args.out / f"{name}.csv")
            print(f"{name}: {result.stable.size} cells -> {dest}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "simulate": _cmd_simulate,
        "sweep": _cmd_sweep,
        "validate": _cmd_validate,
        "figures": _cmd_figures,
    }[args.command]
    try:
        return handler(args)
    except (ConfigError, InvalidParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergenceError, OemError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

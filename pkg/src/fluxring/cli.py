"""Command-line front end.

Subcommands run one experiment each; `sweep` fans a base experiment over a
parameter grid and `reproduce` applies a stored figure recipe. Flags
override config-file values, which override defaults. Exit codes: 0 on
success, 1 for configuration errors, 2 for runtime or regime errors, 3 for
I/O failures.
"""

from __future__ import annotations

import argparse
import sys

from .config import SWEEPABLE, ConfigError, parse_config, read_config_file
from .runner import FIGURE_PRESETS, reproduce_config, run_experiment

_EXPERIMENT_COMMANDS = ("evolve", "autocorr", "fringe", "revival", "qubit-transfer")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    add = parser.add_argument
    add("--config", help="key = value config file; flags override it")
    add("--n-sites", dest="n_sites", type=int, help="number of lattice sites")
    add("--topology", choices=("ring", "chain"))
    add("--hopping", type=float, help="hopping energy J (default 1)")
    add("--flux", type=float, help="flux through the ring, in flux quanta")
    add("--flux-phase", dest="flux_phase", type=float,
        help="alternative to --flux: the bond phase angle 2*pi*flux/N")
    add("--alpha", type=float, help="inverse packet width")
    add("--k0", type=float, help="carrier momentum")
    add("--center", type=float, help="initial packet center (default midpoint)")
    add("--t-max", dest="t_max", type=float, help="time span, units of 1/J")
    add("--samples", dest="n_samples", type=int, help="number of time samples")
    add("--theta", type=float, help="qubit polar angle")
    add("--phi-angle", dest="phi_angle", type=float, help="qubit azimuthal angle")
    add("--target", type=float, help="destination site for qubit transfer")
    add("--threshold", type=float, help="revival detection threshold (default 0.8)")
    add("--jobs", type=int, help="max concurrent sweep workers (default: all cores)")
    add("--out", help="output directory (default $FLUXRING_OUT or '.')")
    add("--format", help="comma-separated output formats: csv, plotdata")
    add("--timestamp", help="pin the provenance timestamp for reproducible bytes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluxring",
        description="Wave-packet transport on flux-threaded rings and open chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name in _EXPERIMENT_COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        _add_common_flags(p)

    p = sub.add_parser("sweep", help="run an experiment over a parameter grid")
    _add_common_flags(p)
    p.add_argument("--experiment", choices=_EXPERIMENT_COMMANDS,
                   help="base experiment (or set it in the config file)")
    p.add_argument("--sweep", action="append", default=None, metavar="NAME=V1,V2,...",
                   help=f"grid values for one parameter; repeatable. "
                        f"Parameters: {', '.join(sorted(SWEEPABLE))}")

    p = sub.add_parser("reproduce", help="rebuild a reference-figure dataset")
    _add_common_flags(p)
    p.add_argument("--figure", required=True, choices=sorted(FIGURE_PRESETS),
                   help="which figure recipe to run")
    return parser


def _overrides_from_args(args: argparse.Namespace) -> dict:
    keys = (
        "n_sites", "topology", "hopping", "flux", "flux_phase", "alpha", "k0",
        "center", "t_max", "n_samples", "theta", "phi_angle", "target",
        "threshold", "jobs", "out", "format", "timestamp",
    )
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _parse_sweep_flags(entries: list[str]) -> dict[str, list]:
    grid: dict[str, list] = {}
    for entry in entries:
        name, sep, values = entry.partition("=")
        name = name.strip()
        if not sep or not values.strip():
            raise ConfigError(f"--sweep expects NAME=V1,V2,..., got {entry!r}")
        if name not in SWEEPABLE:
            raise ConfigError(f"unknown sweep parameter '{name}'")
        items = [v.strip() for v in values.split(",") if v.strip()]
        if name == "topology":
            grid[name] = items
        else:
            try:
                grid[name] = [float(v) for v in items]
            except ValueError:
                raise ConfigError(
                    f"sweep parameter '{name}': expected numbers, got {values!r}"
                ) from None
    return grid


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1

    try:
        overrides = _overrides_from_args(args)
        if args.command == "reproduce":
            if getattr(args, "config", None):
                overrides = {**read_config_file(args.config), **overrides}
            config = reproduce_config(args.figure, overrides)
            stem = f"figure{args.figure}"
        else:
            if args.command == "sweep":
                if getattr(args, "experiment", None) is not None:
                    overrides["experiment"] = args.experiment
                if args.sweep:
                    overrides["sweep"] = _parse_sweep_flags(args.sweep)
            else:
                overrides["experiment"] = args.command
            config = parse_config(getattr(args, "config", None), overrides)
            stem = None
        _, paths = run_experiment(config, name=stem)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())

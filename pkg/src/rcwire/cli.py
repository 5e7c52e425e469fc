"""Command-line front end for the experiment pipelines.

Exit codes: 0 on success, 2 when the configuration is rejected, 3 when a
run fails numerically.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import bench
from .errors import ConditioningError, ConfigError, QuadratureError

_EXPERIMENT_FOR = {
    "fig2": "fig2",
    "fig3": "fig3",
    "fig4": "fig4",
    "sweep": "custom-sweep",
    "validate-config": None,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcwire",
        description="Benchmark a perturbative master equation against exact "
        "steady states of damped harmonic networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "fig2": "friction sweep: fidelities and steady heat currents",
        "fig3": "cold-bath spectrum and integrated correlation tables",
        "fig4": "transient dynamics of the hot-node position spread",
        "sweep": "custom single-parameter sweep with the fig2 row schema",
        "validate-config": "resolve and check a config file, print it, run nothing",
    }
    for name, text in helps.items():
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("--config", help="JSON configuration file")
        cmd.add_argument("--out", help="output directory (default from config)")
        cmd.add_argument("--tol", type=float, help="relative quadrature tolerance")
        cmd.add_argument(
            "--points",
            type=int,
            help="points per output grid (sweep grid, or every table grid "
            "of the figure pipelines)",
        )
    return parser


def _resolve(args) -> bench.ExperimentConfig:
    if args.config is not None:
        config = bench.load_config(args.config)
    elif args.command == "validate-config":
        raise ConfigError("validate-config needs --config")
    else:
        config = bench.default_config(_EXPERIMENT_FOR[args.command])
    expected = _EXPERIMENT_FOR[args.command]
    if expected is not None and config.experiment != expected:
        raise ConfigError(
            f"config is for {config.experiment!r} but the command wants {expected!r}"
        )
    overrides = {}
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.tol is not None:
        overrides["rtol"] = args.tol
    if args.points is not None:
        if args.points < 2:
            raise ConfigError("--points must be at least 2")
        overrides.update(
            {
                "fig2": {"sweep_points": args.points},
                "custom-sweep": {"sweep_points": args.points},
                "fig3": {"omega_points": args.points, "corr_points": args.points},
                "fig4": {
                    "n_short": args.points,
                    "n_mid": args.points,
                    "n_long": args.points,
                },
            }[config.experiment]
        )
    return replace(config, **overrides) if overrides else config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _resolve(args)
        bench.validate_config(config)
        if args.command == "validate-config":
            print(json.dumps(bench.resolved_mapping(config), indent=2))
            return 0
        result = bench.RUNNERS[config.experiment](config)
        for path in bench.write_result(result, args.out):
            print(path)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, QuadratureError, ConditioningError) as exc:
        # model, stability, physicality, and quadrature failures that the
        # pipelines could not absorb into a row
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end.

Five subcommands map onto the experiment scenarios:

* ``optimize-cluster``: expected-active-link profile over cluster sizes.
* ``optimize-bandwidth``: closed-form band split with a grid cross-check.
* ``compare``: simulated throughput of the candidate strategies.
* ``validate``: self-consistency checks; exit 1 when any gated check fails.
* ``simulate``: one campaign, per-trial CSV.

Exit codes: 0 success, 1 validation failure, 2 configuration error (bad
flag values, malformed config file, divergent parameter combinations).
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

import yaml

from .errors import ConfigurationError
from .experiments import (
    ExperimentSpec,
    cmd_compare,
    cmd_optimize_bandwidth,
    cmd_optimize_cluster,
    cmd_simulate,
    cmd_validate,
    spec_from_mapping,
)

__all__ = ["build_parser", "main"]

_SCENARIO_OF = {
    "optimize-cluster": "cluster-sweep",
    "optimize-bandwidth": "bandwidth-sweep",
    "compare": "throughput-compare",
    "validate": "validate",
    "simulate": "simulate",
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML file of parameter overrides")
    parser.add_argument("--seed", type=int, help="base RNG seed")
    parser.add_argument("--trials", type=int, help="trials per simulation campaign")
    parser.add_argument("--beta", type=float, help="popularity skew exponent")
    parser.add_argument("--mu", type=float, help="per-user rate floor in bit/s")
    parser.add_argument("--out", help="output CSV path")
    parser.add_argument("--jobs", type=int, help="worker processes for campaigns")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coopd2d",
        description="Cached device-to-device hotspot analysis and simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("optimize-cluster", "sweep cluster sizes for expected active links"),
        ("optimize-bandwidth", "closed-form bandwidth split with grid cross-check"),
        ("compare", "simulate and compare transmission strategies"),
        ("validate", "run self-consistency checks"),
        ("simulate", "run one campaign and dump per-trial records"),
    ):
        p = sub.add_parser(name, help=blurb)
        _add_common(p)
        if name == "simulate":
            p.add_argument(
                "--strategy",
                choices=("coop", "nocoop", "tdma"),
                help="transmission strategy (default coop)",
            )
            p.add_argument(
                "--eta",
                type=float,
                help="fixed cooperative band fraction (default: optimized split)",
            )
    return parser


def _load_spec(args: argparse.Namespace) -> ExperimentSpec:
    mapping: dict = {}
    if args.config:
        with open(args.config) as fh:
            loaded = yaml.safe_load(fh)
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigurationError("config file must contain a mapping at top level")
        mapping = loaded
    spec = spec_from_mapping(_SCENARIO_OF[args.command], mapping)

    overrides = {}
    for flag, field in (
        ("seed", "seed"),
        ("trials", "trials"),
        ("beta", "beta"),
        ("mu", "mu_bps"),
        ("out", "out"),
        ("jobs", "n_jobs"),
        ("strategy", "strategy"),
        ("eta", "eta"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field] = value
    return replace(spec, **overrides) if overrides else spec


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    try:
        spec = _load_spec(args)
        if args.command == "validate":
            return 0 if cmd_validate(spec) else 1
        runner = {
            "optimize-cluster": cmd_optimize_cluster,
            "optimize-bandwidth": cmd_optimize_bandwidth,
            "compare": cmd_compare,
            "simulate": cmd_simulate,
        }[args.command]
        path = runner(spec)
        print("wrote %s" % path)
    except (ConfigurationError, OSError, yaml.YAMLError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

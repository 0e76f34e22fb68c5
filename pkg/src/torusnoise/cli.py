"""Command-line entry point: ``torusnoise <command> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import experiments
from .channels import TracePreservationError
from .io import SpecError
from .torus import DimensionError

HELP = {
    "eta-sweep": "eta against alpha for the simple dissipation channel",
    "gamma-map": "Husimi image of the non-unitality operator of a channel",
    "invariant": "invariant state of noise composed with a unitary map",
    "classical": "attractor histogram of the dissipative standard map",
    "compare": "correlate the quantum invariant state with the classical attractor",
    "report": "non-unitality summary of one channel",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torusnoise")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in experiments.COMMANDS:
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--config", help="JSON file with config fields")
        p.add_argument("--out", help="output directory")
        p.add_argument("--n", type=int, help="Hilbert space dimension")
        p.add_argument("--seed", type=int)
        p.add_argument("--grid", help="phase-space grid as NQxNP")
        p.add_argument("--tol", type=float)
        p.add_argument("--max-iter", type=int, dest="max_iter")
        p.add_argument("--channel", type=json.loads, help="channel spec as inline JSON")
        if name == "eta-sweep":
            p.add_argument("--eps", type=float, nargs="+")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {k: getattr(args, k, None)
                 for k in ("out", "n", "seed", "grid", "tol", "max_iter", "channel", "eps")}
    if overrides["eps"] is not None and len(overrides["eps"]) == 1:
        overrides["eps"] = overrides["eps"][0]
    try:
        cfg = experiments.load_config(args.command, args.config, **overrides)
        summary = experiments.run(cfg)
    except (experiments.ConfigError, SpecError, DimensionError, TracePreservationError,
            experiments.GridMismatchError, ValueError, OSError) as exc:
        print(f"torusnoise {args.command}: error: {exc}", file=sys.stderr)
        return 2
    brief = {k: v for k, v in summary.items() if k not in ("config", "panels")}
    if "report" in brief:
        brief["report"] = {k: v for k, v in brief["report"].items() if k != "purity_trace"}
    print(json.dumps(experiments.io._jsonable(brief), sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: run experiments, list the catalog, inspect grids."""
from __future__ import annotations

import argparse
import math
import sys

from .errors import ConfigError, DomainError, ResolutionError
from .experiments import (list_experiments, load_config_file, make_config,
                          run, worker_count)
from .grids import RadialGrid


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hankelsq",
        description="numerical verification experiments for radial square "
                    "functions and related operators")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment and write reports")
    p_run.add_argument("experiment")
    p_run.add_argument("--config", help="flat key=value config file")
    p_run.add_argument("--set", dest="sets", action="append", default=[],
                       metavar="KEY=VALUE", help="override a single parameter")
    p_run.add_argument("--out", default="out", help="output directory")

    sub.add_parser("list", help="list the experiment catalog")

    p_gi = sub.add_parser("grid-info", help="describe a radial grid")
    p_gi.add_argument("--d", type=float, default=3.0)
    p_gi.add_argument("--r-min-exp", type=float, default=-12.0)
    p_gi.add_argument("--r-max-exp", type=float, default=12.0)
    p_gi.add_argument("--n", type=int, default=4096)
    return parser


def _cmd_run(args) -> int:
    overrides = {}
    if args.config:
        overrides.update(load_config_file(args.config))
    for item in args.sets:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, val = item.partition("=")
        overrides[key.strip()] = val.strip()
    cfg = make_config(args.experiment, overrides)
    print(f"running {cfg.experiment} with {worker_count()} worker(s)")
    try:
        report = run(cfg)
    except (DomainError, ResolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    paths = report.write(args.out)
    n_fail = sum(1 for r in report.rows if r[-1] == "fail")
    for path in paths:
        print(f"wrote {path}")
    print(f"{len(report.rows)} rows, {n_fail} failed")
    return 0 if report.passed else 1


def _cmd_list() -> int:
    for name, summary in list_experiments():
        print(f"{name:24s} {summary}")
    return 0


def _cmd_grid_info(args) -> int:
    grid = RadialGrid(args.d, 2.0**args.r_min_exp, 2.0**args.r_max_exp, args.n)
    rel = abs(grid.total_mass - grid.exact_mass) / grid.exact_mass
    print(f"d          = {grid.d}")
    print(f"nodes      = {grid.n} on [{grid.r_min:g}, {grid.r_max:g}]")
    print(f"log_step   = {grid.log_step:.6e}")
    print(f"octaves    = {math.log2(grid.r_max / grid.r_min):g}")
    print(f"mass       = {grid.total_mass:.12e}")
    print(f"exact mass = {grid.exact_mass:.12e}  (rel err {rel:.2e})")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list":
            return _cmd_list()
        return _cmd_grid_info(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line driver.

    vvqe <mode> [--config FILE] [--hamiltonian PATH] [--seed N] [--out DIR]

Exit status: 0 on success, 2 for configuration or input errors, 3 when a
solver fails (artifacts are still written).
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import MODES, ConfigError, load_config, parse_config
from .experiments import run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vvqe", description="Variance-based variational eigensolver experiments.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", help="YAML/JSON experiment file")
        p.add_argument("--hamiltonian", help="Pauli Hamiltonian file or bundled fixture name")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory (default: config 'out' or .)")
    return parser


def _load(args):
    if args.config:
        cfg = load_config(args.config)
        if cfg.mode != args.mode:
            raise ConfigError(f"config is for mode {cfg.mode!r}, not {args.mode!r}")
        data = cfg.model_dump(exclude_unset=True)
    else:
        data = {"mode": args.mode}
    if args.hamiltonian is not None:
        data["hamiltonian"] = args.hamiltonian
    if args.seed is not None:
        data["seed"] = args.seed
    if args.out is not None:
        data["out"] = args.out
    return parse_config(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _load(args)
        result = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in result.files:
        print(path)
    if result.failed:
        print(f"solver failed: {result.summary.get('message', '')}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

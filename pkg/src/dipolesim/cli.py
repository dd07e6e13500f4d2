"""Command line interface: run scenarios, list builtins, validate configs.

Exit codes: 0 success, 1 configuration/validation failure, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .exceptions import ConfigError
from .scenarios import (BUILTIN_DESCRIPTIONS, builtin_config, list_builtins,
                        run_scenario, validate_config)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dipolesim",
        description="Simulate emission and population transfer in small "
                    "chains of dipole-coupled two-level atoms (rates in units "
                    "of the single-atom decay rate).")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a builtin scenario or a YAML config file")
    run_p.add_argument("target", help="builtin name (see 'list') or path to a config file")
    run_p.add_argument("--out-dir", default="out", help="directory for output files")
    run_p.add_argument("--seed", type=int, default=None, help="override the RNG seed")
    run_p.add_argument("--theta-points", type=int, default=None,
                       help="override the angular grid size (odd)")
    run_p.add_argument("--step", type=float, default=None, help="override the output grid step")
    run_p.add_argument("--quiet", action="store_true", help="suppress the report echo")

    sub.add_parser("list", help="list builtin scenarios")

    val_p = sub.add_parser("validate", help="validate a YAML config file")
    val_p.add_argument("file", help="path to the config file")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "list":
        for name, desc in list_builtins():
            print(f"{name:8s} {desc}")
        return 0

    if args.command == "validate":
        try:
            text = Path(args.file).read_text()
        except OSError as exc:
            print(f"cannot read {args.file}: {exc}", file=sys.stderr)
            return 1
        try:
            validate_config(text)
        except ConfigError as exc:
            for err in exc.errors:
                print(f"error: {err}", file=sys.stderr)
            return 1
        print("ok")
        return 0

    # run
    try:
        if args.target in BUILTIN_DESCRIPTIONS:
            config = builtin_config(args.target, seed=args.seed,
                                    theta_points=args.theta_points, step=args.step)
        else:
            config = validate_config(Path(args.target).read_text())
            for key, value in (("seed", args.seed), ("theta_points", args.theta_points),
                               ("step", args.step)):
                if value is not None:
                    config.run[key] = value
    except ConfigError as exc:
        for err in exc.errors:
            print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"cannot read {args.target}: {exc}", file=sys.stderr)
        return 1

    try:
        report = run_scenario(config, args.out_dir)
    except Exception as exc:  # runtime failure: distinct exit code for scripting
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        print(report.to_text(), end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry points: run experiment sweeps, list fixtures, self-verify."""

from __future__ import annotations

import argparse
import sys

from .fixtures import FIXTURE_NAMES, load_fixture
from .harness import load_config, run_experiment, write_csv
from .linalg import PreconditionError, ValidationError


def _cmd_run(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.samples is not None:
        config.samples = args.samples if args.samples == "auto" else int(args.samples)
    if args.out is not None:
        config.out = args.out
    if args.normalize:
        config.normalize = True
    rows = run_experiment(config)
    if config.out:
        print(f"wrote {len(rows)} rows to {config.out}")
    else:
        write_csv(rows, sys.stdout, config.build_scenario().n_users)
    return 0


def _cmd_fixtures(args) -> int:
    if args.action == "list":
        for name in FIXTURE_NAMES:
            scen = load_fixture(name)
            dims = " ".join(f"{scen.n_rx(l)}x{scen.n_tx}" for l in range(scen.n_users))
            print(f"{name}: {scen.n_users} users, per-user channel {dims}")
        return 0
    raise ValidationError(f"unknown fixtures action {args.action!r}")


def _cmd_verify(args) -> int:
    from .verify import run_all_checks

    results = run_all_checks()
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name}: {r.detail}")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimobc",
        description="Transmit design and Monte-Carlo rate evaluation for the "
        "statistical-CSI MIMO broadcast channel.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment sweep from a JSON config")
    run_p.add_argument("--config", required=True, help="path to the JSON experiment config")
    run_p.add_argument("--seed", type=int, default=None, help="override the config seed")
    run_p.add_argument(
        "--samples", default=None, help='override the sample count (integer or "auto")'
    )
    run_p.add_argument("--out", default=None, help="override the output CSV path")
    run_p.add_argument(
        "--normalize",
        action="store_true",
        help="rescale channel statistics to mean energy N_r*N_t per user",
    )
    run_p.set_defaults(fn=_cmd_run)

    fix_p = sub.add_parser("fixtures", help="inspect built-in scenarios")
    fix_p.add_argument("action", choices=["list"], help="what to do")
    fix_p.set_defaults(fn=_cmd_fixtures)

    ver_p = sub.add_parser(
        "verify-paper", help="run the built-in reference-value and identity checks"
    )
    ver_p.set_defaults(fn=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValidationError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``fddrice {sweep,ber,identifiability,preset}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..errors import ConfigError
from ..rice import plan_smoothing
from .ber import run_ber
from .config import ExperimentConfig
from .presets import NAMES, run_preset
from .sweep import format_csv, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _overrides(args) -> dict:
    return {"seed": args.seed, "trials": args.trials, "out": args.out,
            "timing": True if args.timing else None}


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_sweep(args) -> int:
    cfg = ExperimentConfig.load(args.config).with_overrides(**_overrides(args))
    res = run_sweep(cfg)
    _emit(res.to_csv(), cfg.out)
    return EXIT_NUMERIC if res.any_point_all_failed() else EXIT_OK


def _cmd_ber(args) -> int:
    cfg = ExperimentConfig.load(args.config).with_overrides(**_overrides(args))
    res = run_ber(cfg)
    _emit(res.to_csv(), cfg.out)
    return EXIT_NUMERIC if res.any_point_all_failed() else EXIT_OK


def _cmd_preset(args) -> int:
    text, failed = run_preset(args.name, **_overrides(args))
    _emit(text, args.out)
    return EXIT_NUMERIC if failed else EXIT_OK


def _cmd_identifiability(args) -> int:
    rows = []
    for m_r in args.mr:
        for n in args.n:
            try:
                plan = plan_smoothing(m_r, n, n)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            rows.append([m_r, n, n, plan.p_r, plan.q_r, plan.k_max])
    _emit(format_csv(["m_r", "n_x", "n_y", "p_r", "q_r", "k_max"], rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="master seed override")
    common.add_argument("--trials", type=int, help="trials per sweep point override")
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("--timing", action="store_true",
                        help="fill the seconds column (makes output nondeterministic)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="fddrice", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", parents=[common], help="NMSE sweep from a JSON config")
    s.add_argument("--config", required=True)
    s.set_defaults(func=_cmd_sweep)

    b = sub.add_parser("ber", parents=[common], help="BER sweep from a JSON config")
    b.add_argument("--config", required=True)
    b.set_defaults(func=_cmd_ber)

    i = sub.add_parser("identifiability", parents=[common],
                       help="largest identifiable path count per array/training size")
    i.add_argument("--mr", type=int, nargs="+", default=[2, 3, 4, 5, 6, 7])
    i.add_argument("--n", type=int, nargs="+", default=[4, 6],
                   help="training columns per axis (n_x = n_y)")
    i.set_defaults(func=_cmd_identifiability)

    r = sub.add_parser("preset", parents=[common], help="run a named scenario")
    r.add_argument("name", choices=NAMES)
    r.set_defaults(func=_cmd_preset)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

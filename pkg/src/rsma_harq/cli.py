"""Command-line entry point: ``sweep``, ``validate`` and ``single``.

Exit codes: 0 success, 1 configuration error, 2 validation failure.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import fields

import yaml

from .experiment import (ConfigError, SweepPoint, SweepSpec, format_record, point_records, run_sweep,
                         run_validate, write_csv)
from .engine import BlockSums, optimize_fdma_w, run_block

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION = 0, 1, 2


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in _csv_list(text)]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _add_spec_flags(p: argparse.ArgumentParser) -> None:
    # each flag writes the SweepSpec field of the same name; aliases follow the field names
    p.add_argument("--schemes", type=_csv_list, help="comma-separated subset of RSMA,NOMA,FDMA")
    p.add_argument("--harq", "--kinds", dest="kinds", type=_csv_list, help="comma-separated subset of CC,IR")
    p.add_argument("--retx", "--L-values", dest="L_values", type=_int_list, help="retransmission limits L")
    p.add_argument("--gamma1-db", dest="gamma1_db", type=float)
    p.add_argument("--gamma2-db", dest="gamma2_db", type=float)
    p.add_argument("--rate-start", dest="rate_start", type=float)
    p.add_argument("--rate-stop", dest="rate_stop", type=float)
    p.add_argument("--rate-step", dest="rate_step", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--chunk", type=int)
    p.add_argument("--fdma-trials", dest="fdma_trials", type=int)
    p.add_argument("--config", help="YAML file with SweepSpec fields")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rsma-harq", description="Two-user uplink RSMA/NOMA/FDMA HARQ simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="Monte Carlo sweep over rates, written as CSV")
    _add_spec_flags(sw)
    sw.add_argument("--out", default="sweep.csv", help="output CSV path")
    sw.add_argument("--quiet", action="store_true")

    va = sub.add_parser("validate", help="closed forms against quadrature and Monte Carlo oracles")
    va.add_argument("--points", type=int, default=200)
    va.add_argument("--seed", type=int, default=0)
    va.add_argument("--mc-draws", dest="mc_draws", type=int, default=1_000_000)

    si = sub.add_parser("single", help="one configuration, printed as key: value blocks")
    si.add_argument("--scheme", default="RSMA")
    si.add_argument("--harq", dest="kind", default="CC")
    si.add_argument("--retx", dest="L", type=int, default=2)
    si.add_argument("--rate", type=float, default=2.0)
    si.add_argument("--gamma1-db", dest="gamma1_db", type=float, default=20.0)
    si.add_argument("--gamma2-db", dest="gamma2_db", type=float, default=15.0)
    si.add_argument("--trials", type=int, default=100_000)
    si.add_argument("--seed", type=int, default=1)
    si.add_argument("--fdma-w1", dest="fdma_w1", type=float, default=None,
                    help="FDMA bandwidth share of user 1 (default: Monte Carlo search)")
    return parser


def load_spec(args: argparse.Namespace) -> SweepSpec:
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = yaml.safe_load(fh) or {}
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError("config", f"invalid YAML in {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config", "top level must be a mapping")
        data.update(loaded)
    for f in fields(SweepSpec):
        val = getattr(args, f.name, None)
        if val is not None:
            data[f.name] = val
    return SweepSpec.from_mapping(data)


def cmd_sweep(args) -> int:
    spec = load_spec(args)
    progress = None
    if not args.quiet:
        def progress(done, total):
            if done == total or done % 50 == 0:
                print(f"\r{done}/{total} chunks", end="" if done < total else "\n", file=sys.stderr)
    records = run_sweep(spec, progress)
    write_csv(records, args.out)
    if not args.quiet:
        print(f"wrote {len(records)} rows to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.points < 1:
        raise ConfigError("points", "must be >= 1")
    if args.mc_draws < 0:
        raise ConfigError("mc_draws", "must be >= 0")
    report = run_validate(args.points, args.seed, args.mc_draws)
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_single(args) -> int:
    spec = SweepSpec(schemes=(args.scheme,), kinds=(args.kind,), L_values=(args.L,), rate_start=args.rate,
                     rate_stop=args.rate, rate_step=1.0, gamma1_db=args.gamma1_db, gamma2_db=args.gamma2_db,
                     trials=args.trials, seed=args.seed)
    point = SweepPoint(spec.schemes[0], spec.kinds[0], args.L, args.rate)
    cfg = point.config(spec)
    w1 = None
    if point.scheme == "FDMA":
        if args.fdma_w1 is not None and not 0.0 < args.fdma_w1 < 1.0:
            raise ConfigError("fdma_w1", "must lie in (0, 1)")
        w1 = args.fdma_w1 if args.fdma_w1 is not None else optimize_fdma_w(cfg, spec.fdma_trials, spec.seed)
        cfg = point.config(spec, w1)
    total = BlockSums()
    start = 0
    while start < spec.trials:
        n = min(spec.chunk, spec.trials - start)
        total = total.merge(run_block(cfg, spec.seed, start, n))
        start += n
    print("\n\n".join(format_record(r) for r in point_records(point, spec, total, w1)))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"sweep": cmd_sweep, "validate": cmd_validate, "single": cmd_single}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``slowpolar <subcommand>``."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .geometry import SlowParams
from .oracle import BudgetExceeded
from .scl import ListConfig, SclDecoder
from .shaping import ShapingRule, read_data_phases, with_crc, write_data_phases
from .sim import (SimConfig, cea_bench, construct, parse_channel, rows_to_csv, simulate)
from .transform import forward, inverse

EXIT_USAGE = 2
EXIT_RESOURCE = 3


class UsageError(Exception):
    pass


def _bits(text: str, length: int) -> np.ndarray:
    text = text.strip()
    if len(text) != length or set(text) - {"0", "1"}:
        raise UsageError(f"expected {length} bits of 0/1, got {text!r}")
    return np.array([int(c) for c in text], dtype=np.uint8)


def _symbols(text: str) -> list[int]:
    text = text.strip()
    if "," in text:
        return [int(v) for v in text.split(",")]
    return [int(c) for c in text]


def _add_geometry(p):
    p.add_argument("--l0", type=int, required=True)
    p.add_argument("--m0", type=int, required=True)
    p.add_argument("--n", type=int, required=True)


def cmd_transform(args) -> int:
    params = SlowParams(args.l0, args.m0, args.n)
    if args.forward is not None:
        out = forward(params, _bits(args.forward, params.length))
    else:
        out = inverse(params, _bits(args.inverse, params.length))
    print("".join(str(int(b)) for b in out))
    return 0


def cmd_decode(args) -> int:
    params = SlowParams(args.l0, args.m0, args.n)
    process = parse_channel(args.channel)
    y = _symbols(args.y)
    if len(y) != params.length:
        raise UsageError(f"expected {params.length} observations, got {len(y)}")
    phases = read_data_phases(args.data_phases) if args.data_phases else range(params.length)
    shaping = with_crc(params.length, phases, args.crc) if args.crc else \
        ShapingRule.from_data_phases(params.length, phases)
    crc = shaping.frozen if args.crc else None
    decoder = SclDecoder(params, process, y)
    entries = decoder.run(shaping, ListConfig(args.list_size, crc), args.seed)
    if args.trace:
        for record in decoder.trace:
            print(json.dumps(record))
    result = [{"u": "".join(map(str, e.u_hat.tolist())),
               "x": "".join(map(str, e.x_hat.tolist())),
               "log_metric": e.log_metric} for e in entries]
    print(json.dumps(result if args.json else result[0]))
    return 0


def _sim_config(args) -> SimConfig:
    if args.config:
        return SimConfig.from_json(args.config)
    if args.l0 is None or args.m0 is None or args.n is None:
        raise UsageError("--l0, --m0 and --n are required without --config")
    return SimConfig(
        l0=args.l0, m0=args.m0, n=args.n,
        channels=args.channel or ["bsc:0.05"],
        list_sizes=args.list_size or [1],
        trials=args.trials, seed=args.seed,
        data_phase_file=args.data_phases, rate=args.rate,
        train_trials=args.train_trials, crc_width=args.crc, timing=args.timing)


def cmd_simulate(args) -> int:
    config = _sim_config(args)
    rows = simulate(config)
    if args.json:
        from dataclasses import asdict
        text = json.dumps([asdict(r) for r in rows], indent=2) + "\n"
    else:
        text = rows_to_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_construct(args) -> int:
    params = SlowParams(args.l0, args.m0, args.n)
    process = parse_channel(args.channel)
    phases = construct(params, process, args.rate, args.trials, args.seed)
    if args.out:
        write_data_phases(args.out, phases)
    else:
        sys.stdout.write("".join(f"{p}\n" for p in phases))
    return 0


def cmd_cea_bench(args) -> int:
    report = cea_bench(range(args.min_log, args.max_log + 1), args.cycles)
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print("size_log,copies_per_cycle,expected,seconds_per_write")
        for r in report:
            print(f"{r['size_log']},{r['copies_per_cycle']},{r['expected']},{r['seconds_per_write']:.3e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slowpolar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="forward or inverse slow transform of a bit string")
    _add_geometry(p)
    direction = p.add_mutually_exclusive_group(required=True)
    direction.add_argument("--forward", metavar="BITS")
    direction.add_argument("--inverse", metavar="BITS")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("decode", help="list-decode one observation block")
    _add_geometry(p)
    p.add_argument("--channel", required=True)
    p.add_argument("--y", required=True, help="observations as digits or comma-separated")
    p.add_argument("--data-phases", help="file of newline-separated data phases")
    p.add_argument("--list-size", type=int, default=1)
    p.add_argument("--crc", type=int, default=0, help="CRC width carved from the data phases")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="print the whole ranked list")
    p.add_argument("--trace", action="store_true", help="per-phase metric trace as JSON lines")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="Monte-Carlo FER/BER campaign as CSV")
    p.add_argument("--config", help="JSON file with SimConfig fields")
    p.add_argument("--l0", type=int)
    p.add_argument("--m0", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--channel", action="append")
    p.add_argument("--list-size", type=int, action="append")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--data-phases")
    p.add_argument("--rate", type=float)
    p.add_argument("--train-trials", type=int, default=200)
    p.add_argument("--crc", type=int, default=0)
    p.add_argument("--timing", action="store_true", help="fill elapsed_ms (output no longer reproducible)")
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("construct", help="choose data phases by genie-aided SC")
    _add_geometry(p)
    p.add_argument("--channel", required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("cea-bench", help="CEA copy counts and write timing")
    p.add_argument("--min-log", type=int, default=0)
    p.add_argument("--max-log", type=int, default=12)
    p.add_argument("--cycles", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_cea_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BudgetExceeded, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

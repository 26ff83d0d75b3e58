"""Command-line surface: verification runs, sweeps, and one-off evaluations.

Exit codes: 0 success, 1 assertion failure, 2 capacity/config error.  CSV
output uses a header row, comma separators, '.' decimals and 12
significant digits; with the same config the bytes are identical across
reruns (wall-clock timings are only emitted under --timing).
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from fractions import Fraction

from .arith import build_sieve, model_constants, prime_blocks
from .config import RunConfig, load_config
from .errors import CapacityError
from .localized import CountMode, Window, sandwich_check, window_hit_count
from .orderstats import (
    ClumpEnvelope,
    PartialSumRegion,
    StaircaseRegion,
    ballot_probability,
    mc_region_volume,
)
from .table_farey import (
    farey_sumset_size_by_products,
    farey_sumset_size_direct,
    normalized_ratio,
    table_count,
)
from .verify import run_verify


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file (or set LOCTAB_CONFIG)")
    p.add_argument("--k", type=int, dest="k")
    p.add_argument("--sieve-limit", type=int, dest="sieve_limit")
    p.add_argument("--memory-cap-bytes", type=int, dest="memory_cap_bytes")
    p.add_argument("--mc-samples", type=int, dest="mc_samples")
    p.add_argument("--mc-seed", type=int, dest="mc_seed")
    p.add_argument("--yb-n", type=int, dest="yb_n")
    p.add_argument("--yb-floor", type=float, dest="yb_floor")
    p.add_argument("--enumeration-cap", type=int, dest="enumeration_cap")
    p.add_argument("--output", dest="output")
    p.add_argument("--allow-skips", action="store_true", default=None, dest="allow_skips")


def _config_from(args: argparse.Namespace) -> RunConfig:
    keys = (
        "k", "sieve_limit", "memory_cap_bytes", "mc_samples", "mc_seed",
        "yb_n", "yb_floor", "enumeration_cap", "output", "allow_skips",
    )
    overrides = {k: getattr(args, k, None) for k in keys}
    return load_config(getattr(args, "config", None), overrides)


def _write_rows(path: str, header: list[str], rows: list[list], dat_path: str | None) -> None:
    def emit(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])

    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
    else:
        emit(sys.stdout)
    if dat_path:
        with open(dat_path, "w", encoding="utf-8") as fh:
            fh.write("# " + " ".join(header) + "\n")
            for row in rows:
                fh.write(" ".join(_fmt(v) for v in row) + "\n")


def _parse_rationals(raw: str) -> list[Fraction]:
    return [Fraction(part.strip()) for part in raw.split(",") if part.strip()]


def cmd_verify(args) -> int:
    cfg = _config_from(args)
    report, code = run_verify(cfg)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(report)
    sys.stdout.write(report)
    return code


def table_sweep_rows(k: int, n_list: list[int], cfg: RunConfig, timing: bool = False) -> list[list]:
    rows = []
    prev_ratio = None
    for n in n_list:
        t0 = time.perf_counter()
        a = table_count(k, n, cfg.memory_cap_bytes)
        wall = int((time.perf_counter() - t0) * 1000)
        if n >= 16:
            ratio = normalized_ratio(k, n, a)
            step = "" if prev_ratio is None else ratio / prev_ratio
            prev_ratio = ratio
        else:
            ratio = ""
            step = ""
            prev_ratio = None
        rows.append([k, n, a, ratio, step, wall if timing else ""])
    return rows


def cmd_table(args) -> int:
    cfg = _config_from(args)
    n_list = [int(x) for x in args.n_list.split(",") if x.strip()]
    rows = table_sweep_rows(cfg.k, n_list, cfg, timing=args.timing)
    _write_rows(cfg.output, ["k", "N", "A", "ratio", "ratio_step", "wall_ms"], rows, args.dat)
    return 0


def farey_sweep_rows(kp1: int, r_list: list[int], cfg: RunConfig) -> list[list]:
    rows = []
    for r in r_list:
        d = farey_sumset_size_direct(kp1, r, cfg.enumeration_cap)
        c = farey_sumset_size_by_products(kp1, r, cfg.enumeration_cap)
        rows.append([kp1, r, d, c, d == c])
    return rows


def cmd_farey(args) -> int:
    cfg = _config_from(args)
    r_list = [int(x) for x in args.r_list.split(",") if x.strip()]
    rows = farey_sweep_rows(args.kp1, r_list, cfg)
    _write_rows(cfg.output, ["kp1", "R", "direct", "characterized", "equal"], rows, args.dat)
    return 0 if all(row[4] for row in rows) else 1


def cmd_localized(args) -> int:
    cfg = _config_from(args)
    sieve = build_sieve(cfg.sieve_limit, cfg.memory_cap_bytes)
    if args.sandwich is not None:
        s = sandwich_check(cfg.k, args.sandwich, sieve, memory_cap_bytes=cfg.memory_cap_bytes)
        print(f"lower={s.lower} table={s.table} upper_sum={s.upper_sum} holds={_fmt(s.holds)}")
        return 0 if s.holds else 1
    lows = _parse_rationals(args.y)
    highs = _parse_rationals(args.z) if args.z else [2 * y for y in lows]
    w = Window.of(lows, highs)
    mode = CountMode(args.mode)
    value = window_hit_count(Fraction(args.x), w, mode, sieve)
    print(_fmt(float(value) if mode is CountMode.PHI_WEIGHTED_HALF_DYADIC else value))
    return 0


def cmd_boxvol(args) -> int:
    from .arith import factorize
    from .boxes import crowding_moment, divisor_boxes, union_volume

    cfg = _config_from(args)
    sieve = build_sieve(max(args.a, 2), cfg.memory_cap_bytes)
    f = factorize(args.a, sieve)
    box = divisor_boxes(f, cfg.k, cfg.enumeration_cap)
    print(f"a={args.a} k={cfg.k} boxes={len(box.corners)} volume={_fmt(union_volume(box))}")
    if args.p is not None:
        print(f"crowding_moment(P={_fmt(args.p)}) = {_fmt(crowding_moment(f, cfg.k, args.p, cfg.enumeration_cap))}")
    return 0


def cmd_lambda(args) -> int:
    cfg = _config_from(args)
    blocks = prime_blocks(cfg.k, args.prime_limit or cfg.sieve_limit)
    print(f"k={cfg.k} prime_limit={blocks.prime_limit}")
    print("j bound mu drift")
    print(f"0 {blocks.bounds[0]} - -")
    for j, bound in enumerate(blocks.bounds[1:], start=1):
        print(f"{j} {bound} {_fmt(blocks.mus[j - 1])} {_fmt(blocks.drift[j - 1])}")
    return 0


def cmd_orderstats(args) -> int:
    cfg = _config_from(args)
    if args.ballot:
        u, v, r = args.ballot.split()
        q = ballot_probability(Fraction(u), Fraction(v), int(r))
        print(f"ballot u={u} v={v} r={r}: {q} = {_fmt(float(q))}")
        return 0
    if args.staircase is not None:
        lam = model_constants(cfg.k).lam
        est = mc_region_volume(
            StaircaseRegion(b=args.staircase, n_exp=cfg.yb_n, lam=lam),
            cfg.mc_samples, cfg.mc_seed,
        )
        scale = math.factorial(args.staircase + 1)
        print(
            f"staircase B={args.staircase} k={cfg.k} N={cfg.yb_n}: "
            f"volume={_fmt(est.estimate)} stderr={_fmt(est.stderr)} "
            f"scaled={_fmt(est.estimate * scale)}"
        )
        return 0
    if args.envelope:
        r, v = (int(x) for x in args.envelope.split())
        rho = model_constants(cfg.k).rho
        est = mc_region_volume(
            ClumpEnvelope(r=r, v=float(v), k=cfg.k, rho=rho), cfg.mc_samples, cfg.mc_seed
        )
        print(f"envelope r={r} v={v} k={cfg.k}: {_fmt(est.estimate)} stderr={_fmt(est.stderr)}")
        return 0
    if args.partial_sum:
        mu, r, v, gamma = args.partial_sum.split()
        est = mc_region_volume(
            PartialSumRegion(mu=float(mu), r=int(r), v=float(v), gamma=float(gamma)),
            cfg.mc_samples, cfg.mc_seed,
        )
        print(f"partial-sum mu={mu} r={r} v={v} gamma={gamma}: {_fmt(est.estimate)} stderr={_fmt(est.stderr)}")
        return 0
    print("choose one of --ballot/--staircase/--envelope/--partial-sum", file=sys.stderr)
    return 2


def cmd_constants(args) -> int:
    cfg = _config_from(args)
    c = model_constants(cfg.k)
    print(f"k={c.k} rho={_fmt(c.rho)} log_rho={_fmt(c.log_rho)} P={_fmt(c.p)} lambda={_fmt(c.lam)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loctab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run every property suite")
    _add_config_flags(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("table", help="table-count sweep over N values")
    _add_config_flags(p)
    p.add_argument("--n-list", required=True, help="comma-separated N values")
    p.add_argument("--dat", help="also write a gnuplot-style .dat file")
    p.add_argument("--timing", action="store_true", help="fill the wall_ms column")
    p.set_defaults(fn=cmd_table)

    p = sub.add_parser("farey", help="farey sum-set sweep over R values")
    _add_config_flags(p)
    p.add_argument("--kp1", type=int, required=True, help="number of summands")
    p.add_argument("--r-list", required=True, help="comma-separated R values")
    p.add_argument("--dat", help="also write a gnuplot-style .dat file")
    p.set_defaults(fn=cmd_farey)

    p = sub.add_parser("localized", help="window hit counts and the sandwich")
    _add_config_flags(p)
    p.add_argument("--x", help="count n <= x")
    p.add_argument("--y", help="comma-separated lower bounds (rationals)")
    p.add_argument("--z", help="comma-separated upper bounds; default 2y")
    p.add_argument("--mode", default="all", choices=[m.value for m in CountMode])
    p.add_argument("--sandwich", type=int, help="run the two-sided table check at N")
    p.set_defaults(fn=cmd_localized)

    p = sub.add_parser("boxvol", help="divisor-box union volume for one integer")
    _add_config_flags(p)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--p", type=float, help="also print the crowding moment at P")
    p.set_defaults(fn=cmd_boxvol)

    p = sub.add_parser("lambda", help="greedy prime-block sequence")
    _add_config_flags(p)
    p.add_argument("--prime-limit", type=int)
    p.set_defaults(fn=cmd_lambda)

    p = sub.add_parser("orderstats", help="order-statistics volumes")
    _add_config_flags(p)
    p.add_argument("--ballot", help='"u v r": exact ballot probability')
    p.add_argument("--staircase", type=int, help="B: MC staircase volume")
    p.add_argument("--envelope", help='"r v": MC clump-envelope integral')
    p.add_argument("--partial-sum", help='"mu r v gamma": MC region volume')
    p.set_defaults(fn=cmd_orderstats)

    p = sub.add_parser("constants", help="model constants at 12 significant digits")
    _add_config_flags(p)
    p.set_defaults(fn=cmd_constants)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config/value error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

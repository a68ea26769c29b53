"""Command-line front end.

Exit codes: 0 completed with no failing verdict, 3 at least one ``fails``
verdict, 2 invalid input, 1 internal error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Any, Sequence

from . import __version__
from .checks import (
    FAILS,
    CheckReport,
    check_equality_inverse,
    check_freiman,
    check_stability_zp,
    check_three_translates,
    check_vosper,
    describe_set,
)
from .continuous import check_continuous_translates
from .core import difference_set, restricted_sumset, sumset
from .errors import SumsetLabError
from .hunt import CampaignConfig, conjecture1_scan, random_coverage_experiment, run_campaign
from .io import parse_intervals_file, parse_pairs_file, parse_set_file
from .restricted import RestrictedInstance, check_small_forbidden, diagonal_pairs, eh_search
from .select import best_pair, best_subset_exhaustive, endpoint_plus_scan, fibre_strategy, greedy_select

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_FAILS = 0, 1, 2, 3

SWEEPS = {
    # theorem -> checker id used for --exhaustive --range
    "thm1": "thm1",
    "thm13": "thm13",
    "freiman": "freiman",
    "vosper": "vosper",
    "conjecture1": "conjecture1",
}


class UsageError(SumsetLabError):
    pass


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sumset-lab", description="Sumsets from few translates: selection, checks, campaigns.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("sumset", parents=[common], help="A+B, A-B or a restricted sum")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--op", choices=("sum", "difference"), default="sum")
    p.add_argument("--pairs", help="forbidden pairs file (restricted sum)")

    p = sub.add_parser("select", parents=[common], help="choose B' ⊆ B maximising |A+B'|")
    p.add_argument("--strategy", choices=("endpoints", "exhaustive", "pair", "greedy", "fibre"), required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--c", type=int, default=3)
    p.add_argument("--modulus", type=int, help="fibre modulus d")
    p.add_argument("--residues", type=int, default=1, help="extra fibres drawn per trial")
    p.add_argument("--trials", type=int, default=16)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("verify", parents=[common], help="run a theorem checker")
    p.add_argument(
        "--theorem",
        required=True,
        choices=("thm1", "thm13", "freiman", "vosper", "stability", "eh", "small-forbidden", "conjecture1"),
    )
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--pairs", help="forbidden pairs file (eh, small-forbidden); default diagonal")
    p.add_argument("--c", type=int, default=3)
    p.add_argument("--k", type=int, help="size parameter for small-forbidden")
    p.add_argument("--exhaustive", action="store_true", help="sweep all instances up to --range")
    p.add_argument("--range", type=int, help="Z checkers: sets inside [0, range]; Z_p checkers: p <= range")

    p = sub.add_parser("hunt", parents=[common], help="campaigns and scans")
    hs = p.add_subparsers(dest="hunt_verb", required=True)
    h = hs.add_parser("conjecture1", parents=[common])
    h.add_argument("--pmin", type=int, default=5)
    h.add_argument("--pmax", type=int, required=True)
    h.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    h.add_argument("--budget", type=int, default=0, help="random instances")
    h.add_argument("--seed", type=int)
    h.add_argument("--out")
    h.add_argument("--resume", action="store_true")
    h = hs.add_parser("campaign", parents=[common])
    h.add_argument("--config", required=True)
    h.add_argument("--resume", action="store_true", help="override the config's resume flag")
    h = hs.add_parser("coverage", parents=[common])
    h.add_argument("--p", type=int, required=True)
    h.add_argument("--beta", type=float, required=True)
    h.add_argument("--c", type=int, default=3)
    h.add_argument("--trials", type=int, default=200)
    h.add_argument("--seed", type=int)

    p = sub.add_parser("continuous", parents=[common], help="translates of interval unions")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--c", type=int, default=3)
    p.add_argument("--n0", type=int)
    return ap


def _need(args, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.verb} needs {' '.join(missing)}")


def _emit(obj: Any, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(obj, indent=2) + "\n")
        return
    rows = obj if isinstance(obj, list) else [obj]
    flat = [{k: (json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in r.items()} for r in rows]
    keys: list[str] = []
    for r in flat:
        keys.extend(k for k in r if k not in keys)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    w.writerows(flat)
    out.write(buf.getvalue())


def _cmd_sumset(args) -> tuple[Any, bool]:
    A, B = parse_set_file(args.a), parse_set_file(args.b)
    if args.pairs:
        if args.op != "sum":
            raise UsageError("--pairs only applies to --op sum")
        S = restricted_sumset(A, B, parse_pairs_file(args.pairs))
    else:
        S = sumset(A, B) if args.op == "sum" else difference_set(A, B)
    return {"op": "restricted" if args.pairs else args.op, "set": describe_set(S), "size": len(S)}, False


def _cmd_select(args) -> tuple[Any, bool]:
    A, B = parse_set_file(args.a), parse_set_file(args.b)
    s = args.strategy
    if s == "endpoints":
        res = endpoint_plus_scan(A, B)
    elif s == "exhaustive":
        res = best_subset_exhaustive(A, B, args.c)
    elif s == "pair":
        res = best_pair(A, B)
    elif s == "greedy":
        res = greedy_select(A, B, args.c)
    else:
        _need(args, "seed", "modulus")
        res = fibre_strategy(A, B, args.modulus, args.residues, args.trials, args.seed)
    return res.to_dict(), False


def _single_report(args) -> CheckReport:
    t = args.theorem
    _need(args, "a")
    A = parse_set_file(args.a)
    if t in ("eh", "small-forbidden"):
        F = parse_pairs_file(args.pairs) if args.pairs else diagonal_pairs(A)
        inst = RestrictedInstance.build(A, F)
        if t == "eh":
            res = eh_search(inst, args.c)
            verdict = "holds" if res.achieved >= res.bound else FAILS
            return CheckReport("eh", inst.to_dict(), verdict, res.to_dict(), {"gap": res.gap})
        _need(args, "k")
        return check_small_forbidden(inst, args.k, args.c)
    _need(args, "b")
    B = parse_set_file(args.b)
    if t == "thm1":
        return check_three_translates(A, B)
    if t == "thm13":
        return check_equality_inverse(A, B)
    if t == "freiman":
        return check_freiman(A, B)
    if t == "vosper":
        return check_vosper(A, B)
    if t == "stability":
        return check_stability_zp(A, B, args.c)
    raise UsageError(f"{t} has no single-instance form; use --exhaustive --range")


def _cmd_verify(args) -> tuple[Any, bool]:
    if not args.exhaustive:
        rep = _single_report(args)
        return rep.to_dict(), rep.verdict == FAILS
    _need(args, "range")
    if args.theorem not in SWEEPS:
        raise UsageError(f"no exhaustive sweep for {args.theorem}")
    checker = SWEEPS[args.theorem]
    if checker in ("vosper", "conjecture1"):
        cfg = CampaignConfig("exhaustive", checker, n_max=args.range, p_min=2, p_max=args.range)
    else:
        cfg = CampaignConfig("exhaustive", checker, n_max=args.range)
    summary = run_campaign(cfg, args.jobs)
    return summary, summary[FAILS] > 0


def _cmd_hunt(args) -> tuple[Any, bool]:
    hv = args.hunt_verb
    if hv == "conjecture1":
        if args.mode == "random":
            _need(args, "seed")
        s = conjecture1_scan(args.pmin, args.pmax, args.mode, args.budget, args.seed, args.out, args.jobs,
                             resume=args.resume)
        return s, s[FAILS] > 0
    if hv == "campaign":
        cfg = CampaignConfig.load(args.config)
        if args.resume and not cfg.resume:
            cfg = CampaignConfig(**{**cfg.__dict__, "resume": True})
        s = run_campaign(cfg, args.jobs)
        return s, s[FAILS] > 0
    _need(args, "seed")
    return random_coverage_experiment(args.p, args.beta, args.c, args.trials, args.seed), False


def _cmd_continuous(args) -> tuple[Any, bool]:
    A, B = parse_intervals_file(args.a), parse_intervals_file(args.b)
    rep = check_continuous_translates(A, B, args.c, args.n0)
    return rep.to_dict(), rep.verdict == FAILS


COMMANDS = {
    "sumset": _cmd_sumset,
    "select": _cmd_select,
    "verify": _cmd_verify,
    "hunt": _cmd_hunt,
    "continuous": _cmd_continuous,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    if args.jobs is not None and args.jobs < 1:
        print("error: --jobs must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        result, failed = COMMANDS[args.verb](args)
    except (SumsetLabError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as e:  # noqa: BLE001 - last-resort guard for the exit-code contract
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    _emit(result, args.format, sys.stdout)
    sys.stdout.flush()
    return EXIT_FAILS if failed else EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())

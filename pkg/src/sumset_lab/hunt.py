"""Campaigns: instance generators, parallel checking, and resumable JSONL logs."""
from __future__ import annotations

import hashlib
import json
import math
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from itertools import combinations, islice
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator

import numpy as np

from . import _kernels
from .checks import (
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    NOT_MET,
    VERDICTS,
    CheckReport,
    check_equality_inverse,
    check_freiman,
    check_stability_zp,
    check_three_translates,
    check_vosper,
    describe_set,
)
from .core import P_MAX, ForbiddenPairs, ZpSet, ZSet, is_prime, primes_between, rotate, translate_rows
from .errors import CampaignError, InvalidInputError
from .restricted import RestrictedInstance, diagonal_pairs, eh_search
from .rng import rng_for, sample_subset

__all__ = [
    "CampaignConfig",
    "CHECKERS",
    "run_campaign",
    "conjecture1_scan",
    "cstar",
    "generate_family",
    "random_coverage_experiment",
    "exhaustive_z_pairs",
    "exhaustive_zp_pairs",
    "canonical_affine",
]

MODES = ("exhaustive", "random")
ZP_EXHAUSTIVE_MAX = 13
Z_EXHAUSTIVE_MAX = 16


# ---------------------------------------------------------------------------
# config


@dataclass(frozen=True)
class CampaignConfig:
    """Flat campaign description; see :meth:`to_text` for the file form.

    For checkers over Z, instances live in [0, n_max].  For checkers over Z_p,
    n_max bounds the set sizes and primes are drawn from [p_min, p_max].
    """

    mode: str
    checker: str
    n_max: int
    p_min: int | None = None
    p_max: int | None = None
    beta: float | None = None
    c: int = 3
    trials: int = 0
    seed: int | None = None
    out: str | None = None
    resume: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidInputError(f"mode must be one of {MODES}")
        if self.checker not in CHECKERS:
            raise InvalidInputError(f"unknown checker {self.checker!r}; known: {sorted(CHECKERS)}")
        spec = CHECKERS[self.checker]
        if self.n_max < 1:
            raise InvalidInputError("n_max must be positive")
        if self.c < 1:
            raise InvalidInputError("c must be positive")
        if self.beta is not None and not 0 < self.beta < 0.5:
            raise InvalidInputError("beta must lie in (0, 1/2)")
        if self.mode == "random":
            if self.seed is None:
                raise InvalidInputError("random campaigns need a seed")
            if self.trials < 1:
                raise InvalidInputError("random campaigns need trials >= 1")
        if spec.needs_seed and self.seed is None:
            raise InvalidInputError(f"checker {self.checker} needs a seed")
        if spec.modular:
            if self.p_min is None or self.p_max is None:
                raise InvalidInputError("checkers over Z_p need p_min and p_max")
            if not 2 <= self.p_min <= self.p_max <= P_MAX:
                raise InvalidInputError("need 2 <= p_min <= p_max <= 2^20")
            if not primes_between(self.p_min, self.p_max):
                raise InvalidInputError(f"no primes in [{self.p_min}, {self.p_max}]")
            if self.mode == "exhaustive" and self.p_max > ZP_EXHAUSTIVE_MAX:
                raise InvalidInputError(f"exhaustive Z_p campaigns are limited to p <= {ZP_EXHAUSTIVE_MAX}")
        elif self.mode == "exhaustive" and self.n_max > Z_EXHAUSTIVE_MAX:
            raise InvalidInputError(f"exhaustive Z campaigns are limited to n_max <= {Z_EXHAUSTIVE_MAX}")

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{f.name}={v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CampaignConfig":
        kinds = {
            "mode": str, "checker": str, "out": str,
            "n_max": int, "p_min": int, "p_max": int, "c": int, "trials": int, "seed": int,
            "beta": float, "resume": _parse_bool,
        }
        kw: dict[str, Any] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInputError(f"line {lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in kinds:
                raise InvalidInputError(f"line {lineno}: unknown key {key!r}")
            if key in kw:
                raise InvalidInputError(f"line {lineno}: duplicate key {key!r}")
            try:
                kw[key] = kinds[key](val)
            except ValueError:
                raise InvalidInputError(f"line {lineno}: bad value for {key}: {val!r}") from None
        for req in ("mode", "checker", "n_max"):
            if req not in kw:
                raise InvalidInputError(f"config is missing {req!r}")
        return cls(**kw)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "CampaignConfig":
        return cls.from_text(Path(path).read_text())


def _parse_bool(s: str) -> bool:
    low = s.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ValueError(s)


# ---------------------------------------------------------------------------
# generators


def _mask_subsets_with_zero(width: int) -> Iterator[int]:
    """Bitmasks over [0, width) that contain 0, increasing."""
    return iter(range(1, 1 << width, 2))


def exhaustive_z_pairs(n: int, equal_sizes: bool = False) -> Iterator[tuple[ZSet, ZSet]]:
    """All (A, B) with A, B ⊆ [0, n] and min A = min B = 0 (translation classes)."""
    masks = list(_mask_subsets_with_zero(n + 1))
    for ma in masks:
        for mb in masks:
            if equal_sizes and ma.bit_count() != mb.bit_count():
                continue
            yield ZSet.from_mask(ma), ZSet.from_mask(mb)


def canonical_affine(p: int, bits: int, lambdas: Iterable[int] = None) -> int:
    """Smallest bitmask among λS - s, s ∈ λS, over the given multipliers."""
    best = None
    els = [i for i in range(p) if (bits >> i) & 1]
    for lam in lambdas if lambdas is not None else range(1, p):
        scaled = 0
        for x in els:
            scaled |= 1 << (lam * x % p)
        for i in range(p):
            if (scaled >> i) & 1:
                cand = rotate(scaled, -i, p)
                if best is None or cand < best:
                    best = cand
    return best


def _stabiliser_multipliers(p: int, canon_b: int) -> list[int]:
    return [lam for lam in range(1, p) if canonical_affine(p, canon_b, [lam]) == canon_b]


def exhaustive_zp_pairs(p: int, sizes: Iterable[tuple[int, int]]) -> Iterator[tuple[ZpSet, ZpSet]]:
    """One (A, B) per orbit of (A, B) -> (λA+μ, λB+ν), for each (|A|, |B|) in sizes.

    B runs over canonical forms under x -> λx+ν; A over canonical forms under
    translations and the multipliers fixing B's class.
    """
    sizes = sorted(set(sizes))
    by_b: dict[int, list[int]] = {}
    for na, nb in sizes:
        by_b.setdefault(nb, []).append(na)
    canon_cache: dict[int, int] = {}

    def canon_bs(k: int) -> list[int]:
        out = []
        for rest in combinations(range(1, p), k - 1):
            bits = 1
            for x in rest:
                bits |= 1 << x
            if canonical_affine(p, bits) == bits:
                out.append(bits)
        return out

    for nb in sorted(by_b):
        for bb in canon_bs(nb):
            lams = _stabiliser_multipliers(p, bb)
            Bset = ZpSet.from_bits(p, bb)
            for na in by_b[nb]:
                for rest in combinations(range(1, p), na - 1):
                    ab = 1
                    for x in rest:
                        ab |= 1 << x
                    key = (ab, tuple(lams))
                    if key not in canon_cache:
                        canon_cache[key] = canonical_affine(p, ab, lams)
                    if canon_cache[key] == ab:
                        yield ZpSet.from_bits(p, ab), Bset


def generate_family(kind: str, **params) -> Any:
    """Named instance families.

    ``two-translate-counterexample`` (n): A = [1, 2n/3] ∪ [n, 4n/3], B = [0, n].
    ``random-dense-zp`` (p, beta, seed, index=0): A ⊆ Z_p of size ⌊(1/2-β)p⌋.
    ``random-z`` (n_max, seed, index=0, size_a=None, size_b=None): A, B ⊆ [0, n_max].
    ``exhaustive-enumerator`` (n): iterator over :func:`exhaustive_z_pairs`.
    """
    if kind == "two-translate-counterexample":
        n = params["n"]
        if n < 3 or n % 3:
            raise InvalidInputError("n must be a positive multiple of 3")
        A = ZSet(list(range(1, 2 * n // 3 + 1)) + list(range(n, 4 * n // 3 + 1)))
        return A, ZSet(range(n + 1))
    if kind == "random-dense-zp":
        p, beta = params["p"], params["beta"]
        if not is_prime(p):
            raise InvalidInputError(f"{p} is not prime")
        if not 0 < beta < 0.5:
            raise InvalidInputError("beta must lie in (0, 1/2)")
        rng = rng_for(_require_seed(params), params.get("index", 0))
        return ZpSet(p, sample_subset(rng, range(p), dense_size(p, beta)))
    if kind == "random-z":
        n_max = params["n_max"]
        rng = rng_for(_require_seed(params), params.get("index", 0))
        na = params.get("size_a") or int(rng.integers(1, n_max + 2))
        nb = params.get("size_b") or int(rng.integers(1, n_max + 2))
        return ZSet(sample_subset(rng, range(n_max + 1), na)), ZSet(sample_subset(rng, range(n_max + 1), nb))
    if kind == "exhaustive-enumerator":
        return exhaustive_z_pairs(params["n"], params.get("equal_sizes", False))
    raise InvalidInputError(f"unknown family {kind!r}")


def _require_seed(params: dict) -> int:
    if params.get("seed") is None:
        raise InvalidInputError("random families need a seed")
    return params["seed"]


def dense_size(p: int, beta: float) -> int:
    # exact floor of (1/2 - beta) p without float drift at integer boundaries
    from fractions import Fraction

    return math.floor((Fraction(1, 2) - Fraction(str(beta))) * p)


# ---------------------------------------------------------------------------
# checkers


@dataclass(frozen=True)
class CheckerSpec:
    run: Callable[[dict, "CampaignConfig", int], CheckReport]
    modular: bool
    equal_sizes: bool = False
    needs_seed: bool = False
    single_set: bool = False
    max_fraction: float | None = None  # cap on |A| relative to p


def cstar(A: ZpSet, B: ZpSet) -> tuple[int, tuple[int, ...]]:
    """Least c with some B' ∈ B^(c) reaching |A|+|B|-1, and the witness B'."""
    target = len(A) + len(B) - 1
    rows = translate_rows(A, B).rows
    for c in range(1, len(B) + 1):
        got, idx = _kernels.best_union(rows, c, target)
        if got >= target:
            return c, tuple(B.elements[i] for i in idx)
    raise AssertionError("|A+B| below the Cauchy-Davenport value")


def _run_conjecture1(inst: dict, cfg: CampaignConfig, index: int) -> CheckReport:
    A, B = inst["A"], inst["B"]
    c, chosen = cstar(A, B)
    instance = {"A": describe_set(A), "B": describe_set(B)}
    metrics = {"cstar": c, "n": len(A), "p": A.p}
    # the conjecture's α is unspecified, so c* > 3 is a lead, not a disproof
    verdict = HOLDS if c <= 3 else INCONCLUSIVE
    return CheckReport("conjecture1", instance, verdict, {"chosen": list(chosen)}, metrics)


def _run_eh(inst: dict, cfg: CampaignConfig, index: int, half: bool = False) -> CheckReport:
    A = inst["A"]
    n = len(A)
    if half:
        d = n // 2
        rng = rng_for(cfg.seed, index)
        pairs = [(a, b) for b in A.elements for a in sample_subset(rng, A.elements, d)]
        F = ForbiddenPairs(pairs)
    else:
        F = diagonal_pairs(A)
    ri = RestrictedInstance.build(A, F, cfg.beta)
    res = eh_search(ri, cfg.c)
    verdict = HOLDS if res.achieved >= res.bound else FAILS
    return CheckReport("eh-half" if half else "eh", ri.to_dict(), verdict, res.to_dict(), {"gap": res.gap})


def _run_thm13(inst, cfg, index):
    return check_equality_inverse(inst["A"], inst["B"])


CHECKERS: dict[str, CheckerSpec] = {
    "thm1": CheckerSpec(lambda i, cfg, k: check_three_translates(i["A"], i["B"]), modular=False),
    "thm13": CheckerSpec(_run_thm13, modular=False, equal_sizes=True),
    "freiman": CheckerSpec(lambda i, cfg, k: check_freiman(i["A"], i["B"]), modular=False),
    "freiman-zp": CheckerSpec(lambda i, cfg, k: check_freiman(i["A"], i["B"]), modular=True),
    "vosper": CheckerSpec(lambda i, cfg, k: check_vosper(i["A"], i["B"]), modular=True),
    "stability": CheckerSpec(lambda i, cfg, k: check_stability_zp(i["A"], i["B"], cfg.c), modular=True),
    "conjecture1": CheckerSpec(_run_conjecture1, modular=True, equal_sizes=True, max_fraction=1 / 3),
    "eh": CheckerSpec(_run_eh, modular=True, single_set=True, max_fraction=1 / 3),
    "eh-half": CheckerSpec(
        lambda i, cfg, k: _run_eh(i, cfg, k, half=True), modular=True, single_set=True, needs_seed=True,
        max_fraction=1 / 3,
    ),
}


def _size_cap(spec: CheckerSpec, cfg: CampaignConfig, p: int) -> int:
    cap = min(cfg.n_max, p)
    if spec.max_fraction is not None:
        cap = min(cap, math.floor(p * spec.max_fraction))
    if cfg.beta is not None and spec.single_set:
        cap = min(cap, math.floor((1 - cfg.beta) * p / 2))
    return cap


def _instances(cfg: CampaignConfig) -> Iterator[tuple[dict, dict]]:
    """(generator echo, instance) pairs in campaign index order."""
    spec = CHECKERS[cfg.checker]
    if not spec.modular:
        if cfg.mode == "exhaustive":
            for A, B in exhaustive_z_pairs(cfg.n_max, spec.equal_sizes):
                yield {"mode": "exhaustive", "range": cfg.n_max}, {"A": A, "B": B}
            return
        for i in range(cfg.trials):
            rng = rng_for(cfg.seed, i)
            na = int(rng.integers(1, cfg.n_max + 2))
            nb = na if spec.equal_sizes else int(rng.integers(1, cfg.n_max + 2))
            A = ZSet(sample_subset(rng, range(cfg.n_max + 1), na))
            B = ZSet(sample_subset(rng, range(cfg.n_max + 1), nb))
            yield {"mode": "random", "seed": cfg.seed, "index": i}, {"A": A, "B": B}
        return

    primes = primes_between(cfg.p_min, cfg.p_max)
    if cfg.mode == "exhaustive":
        for p in primes:
            cap = _size_cap(spec, cfg, p)
            if cap < 1:
                continue
            if spec.single_set:
                for n in range(1, cap + 1):
                    for rest in combinations(range(1, p), n - 1):
                        A = ZpSet(p, (0,) + rest)
                        if canonical_affine(p, A.bits) == A.bits:
                            yield {"mode": "exhaustive", "p": p}, {"A": A}
                continue
            if spec.equal_sizes:
                sizes = [(n, n) for n in range(1, cap + 1)]
            else:
                sizes = [(a, b) for a in range(1, cap + 1) for b in range(1, cap + 1)]
            for A, B in exhaustive_zp_pairs(p, sizes):
                yield {"mode": "exhaustive", "p": p}, {"A": A, "B": B}
        return

    usable = [p for p in primes if _size_cap(spec, cfg, p) >= 1]
    if not usable:
        raise InvalidInputError("no prime in range admits a non-empty instance")
    for i in range(cfg.trials):
        rng = rng_for(cfg.seed, i)
        p = usable[int(rng.integers(len(usable)))]
        cap = _size_cap(spec, cfg, p)
        na = int(rng.integers(1, cap + 1))
        echo = {"mode": "random", "seed": cfg.seed, "index": i, "p": p}
        A = ZpSet(p, sample_subset(rng, range(p), na))
        if spec.single_set:
            yield echo, {"A": A}
            continue
        nb = na if spec.equal_sizes else int(rng.integers(1, cap + 1))
        yield echo, {"A": A, "B": ZpSet(p, sample_subset(rng, range(p), nb))}


# ---------------------------------------------------------------------------
# execution


def _canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def record_checksum(record: dict) -> str:
    body = {k: v for k, v in record.items() if k not in ("wall_time", "checksum")}
    return hashlib.sha256(_canonical_json(body).encode()).hexdigest()


def _check_one(args: tuple[int, dict, dict, CampaignConfig]) -> dict:
    index, echo, inst, cfg = args
    t0 = time.perf_counter()
    report = CHECKERS[cfg.checker].run(inst, cfg, index)
    rec = {"index": index, "generator": echo, "report": report.to_dict(), "wall_time": time.perf_counter() - t0}
    rec["checksum"] = record_checksum(rec)
    return rec


def _read_log(path: Path) -> list[dict]:
    """Validated records of an existing log; truncates a torn final line."""
    if not path.exists():
        return []
    raw = path.read_bytes()
    records = []
    good_len = 0
    for line in raw.splitlines(keepends=True):
        if not line.endswith(b"\n"):
            break  # interrupted write
        lineno = len(records) + 1
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise CampaignError(f"{path}: line {lineno} is not JSON ({e})") from None
        if not isinstance(rec, dict) or rec.get("checksum") != record_checksum(rec):
            raise CampaignError(f"{path}: checksum mismatch on line {lineno}")
        if rec.get("index") != len(records):
            raise CampaignError(f"{path}: line {lineno} has index {rec.get('index')}, expected {len(records)}")
        records.append(rec)
        good_len += len(line)
    if good_len != len(raw):
        with open(path, "r+b") as fh:
            fh.truncate(good_len)
    return records


def _is_star(rec: dict) -> bool:
    rep = rec["report"]
    if rep["verdict"] == FAILS:
        return True
    return rep["theorem"] == "conjecture1" and rep["metrics"]["cstar"] > 3


def summarize(records: Iterable[dict], checker: str) -> dict[str, Any]:
    verdicts = Counter({v: 0 for v in VERDICTS})
    cstars: Counter = Counter()
    max_r = None
    stars = 0
    total = 0
    for rec in records:
        total += 1
        rep = rec["report"]
        verdicts[rep["verdict"]] += 1
        m = rep.get("metrics") or {}
        if "r" in m and rep["verdict"] != NOT_MET:
            max_r = m["r"] if max_r is None else max(max_r, m["r"])
        if "cstar" in m:
            cstars[m["cstar"]] += 1
        stars += _is_star(rec)
    out: dict[str, Any] = {"checker": checker, "total": total}
    out.update({v: verdicts[v] for v in VERDICTS})
    out["max_r"] = max_r
    if cstars:
        out["cstar_distribution"] = {str(k): cstars[k] for k in sorted(cstars)}
        out["max_cstar"] = max(cstars)
        out["min_cstar"] = min(cstars)
    out["star_witnesses"] = stars
    return out


def run_campaign(cfg: CampaignConfig, jobs: int | None = 1) -> dict[str, Any]:
    """Run every generated instance through the checker and log one JSONL line each.

    With ``cfg.resume`` an existing log is validated (checksums, dense
    indices) and only missing indices are computed, so the final log equals an
    uninterrupted run apart from ``wall_time``.  Star witnesses (fails, and
    c* > 3 in the c* scan) are also written to ``witnesses.jsonl``
    next to the log.  Without ``out`` nothing is written.
    """
    out = Path(cfg.out) if cfg.out else None
    done: list[dict] = []
    if out is not None:
        if out.parent and not out.parent.exists():
            raise CampaignError(f"output directory {out.parent} does not exist")
        if cfg.resume:
            done = _read_log(out)
        mode = "a" if cfg.resume else "w"
        try:
            fh = open(out, mode)
        except OSError as e:
            raise CampaignError(f"cannot write {out}: {e}") from None
    else:
        fh = None

    start = len(done)
    todo = ((i, echo, inst, cfg) for i, (echo, inst) in enumerate(islice(_instances(cfg), start, None), start))
    records = list(done)
    jobs = jobs or os.cpu_count() or 1
    try:
        if jobs <= 1:
            results: Iterable[dict] = map(_check_one, todo)
            _drain(results, records, fh)
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                _drain(pool.map(_check_one, todo, chunksize=64), records, fh)
    finally:
        if fh is not None:
            fh.close()

    summary = summarize(records, cfg.checker)
    if out is not None:
        wpath = out.parent / "witnesses.jsonl"
        with open(wpath, "w") as wf:
            for rec in records:
                if _is_star(rec):
                    wf.write(json.dumps(rec) + "\n")
        summary["log"] = str(out)
        summary["witnesses"] = str(wpath)
    summary["seed"] = cfg.seed
    return summary


def _drain(results: Iterable[dict], records: list[dict], fh) -> None:
    # pool.map yields in index order, so the writer needs no reordering buffer
    for rec in results:
        records.append(rec)
        if fh is not None:
            fh.write(json.dumps(rec) + "\n")
            fh.flush()


def conjecture1_scan(
    p_min: int,
    p_max: int,
    mode: str = "exhaustive",
    budget: int = 0,
    seed: int | None = None,
    out: str | None = None,
    jobs: int | None = 1,
    n_max: int | None = None,
    resume: bool = False,
) -> dict[str, Any]:
    """Distribution of c* over |A| = |B| = n <= p/3 for primes in [p_min, p_max].

    ``budget`` is the number of random instances (ignored when exhaustive).
    """
    if p_min == p_max and not is_prime(p_min):
        raise InvalidInputError(f"{p_min} is not prime")
    cfg = CampaignConfig(
        mode=mode,
        checker="conjecture1",
        n_max=n_max or max(1, p_max // 3),
        p_min=p_min,
        p_max=p_max,
        trials=budget,
        seed=seed,
        out=out,
        resume=resume,
    )
    return run_campaign(cfg, jobs)


def random_coverage_experiment(p: int, beta: float, c: int, trials: int, seed: int) -> dict[str, Any]:
    """Mean size of A + B' for random A, B of size ⌊(1/2-β)p⌋ and random B' ∈ B^(c).

    The reference value p(1 - (1/2+β)^c) is what independent coverage of each
    residue with probability 1 - (1/2+β) per translate predicts.
    """
    if not is_prime(p):
        raise InvalidInputError(f"{p} is not prime")
    if not 0 < beta < 0.5:
        raise InvalidInputError("beta must lie in (0, 1/2)")
    if c < 1 or trials < 1:
        raise InvalidInputError("need c >= 1 and trials >= 1")
    m = dense_size(p, beta)
    if m < 1:
        raise InvalidInputError("beta leaves A empty")
    sizes = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        rng = rng_for(seed, t)
        A = ZpSet(p, sample_subset(rng, range(p), m))
        B = sample_subset(rng, range(p), m)
        chosen = sample_subset(rng, B, min(c, m))
        acc = 0
        for b in chosen:
            acc |= rotate(A.bits, b, p)
        sizes[t] = acc.bit_count()
    mean = float(sizes.mean())
    se = float(sizes.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    ref = p * (1 - (0.5 + beta) ** c)
    return {
        "p": p,
        "beta": beta,
        "c": c,
        "trials": trials,
        "seed": seed,
        "set_size": m,
        "mean": mean,
        "max": int(sizes.max()),
        "min": int(sizes.min()),
        "std_error": se,
        "reference": ref,
        "within_3se": abs(mean - ref) <= 3 * se if se > 0 else mean == ref,
    }

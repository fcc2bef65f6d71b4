"""Frobenius traces a_p of y^2 = x^3 + Ax + B over F_p, and the trace-cache CSV format."""
from __future__ import annotations

import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from ._fastpath import JIT_PRIME_LIMIT, SMALL_P, UNRESOLVED, traces_batch
from .arith import legendre_symbol, primes_up_to, sqrt_mod

NAIVE_CUTOFF = 2**14
MAX_POINTS = 8
HEADER_PREFIX = "# frobtrace v1"


class FormatError(ValueError):
    pass


@dataclass(frozen=True)
class CurveSpec:
    A: int
    B: int

    def __post_init__(self):
        if self.disc_short == 0:
            raise ValueError(f"singular curve: 4A^3 + 27B^2 = 0 for A={self.A}, B={self.B}")

    @property
    def disc_short(self) -> int:
        return 4 * self.A**3 + 27 * self.B**2

    def is_good(self, p: int) -> bool:
        return p > 2 and self.disc_short % p != 0


@dataclass(frozen=True)
class TraceTable:
    curve: CurveSpec
    x: int
    records: tuple[tuple[int, int], ...]
    # provenance only; the cache format does not carry it
    methods: tuple[str, ...] = field(default=(), compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.records]

    @property
    def traces(self) -> list[int]:
        return [a for _, a in self.records]


def good_primes(curve: CurveSpec, x: int) -> list[int]:
    if x < 2:
        return []
    disc = curve.disc_short
    return [p for p in primes_up_to(x).tolist() if p > 2 and disc % p != 0]


def _check_good(curve: CurveSpec, p: int) -> None:
    if not curve.is_good(p):
        raise ValueError(f"p={p} is not a good odd prime for A={curve.A}, B={curve.B}")


def trace_naive(curve: CurveSpec, p: int) -> int:
    """a_p = -sum_t (t^3 + At + B | p), vectorised over t."""
    _check_good(curve, p)
    t = np.arange(p, dtype=np.int64)
    chi = np.full(p, -1, dtype=np.int64)
    chi[t * t % p] = 1
    chi[0] = 0
    rhs = (t * t % p * t + (curve.A % p) * t + curve.B % p) % p
    return -int(chi[rhs].sum())


# --- group law, affine coordinates, None is the point at infinity ---------

def _add(P, Q, a, p):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def _mul(k, P, a, p):
    R = None
    while k:
        if k & 1:
            R = _add(R, P, a, p)
        P = _add(P, P, a, p)
        k >>= 1
    return R


def _random_point(a, b, p, rng):
    while True:
        x = rng.randrange(p)
        rhs = (x * x * x + a * x + b) % p
        if rhs == 0:
            return x, 0
        if pow(rhs, (p - 1) // 2, p) == 1:
            return x, sqrt_mod(rhs, p)


def _annihilators(P, a, p, lo, hi):
    """All m in [lo, hi] with [m]P = O, by baby-step/giant-step."""
    w = hi - lo
    s = math.isqrt(w) + 1
    baby = {}
    R = None
    for j in range(s):
        if j and R is None:
            # ord(P) = j < s: enumerate multiples directly
            first = -(-lo // j) * j
            return list(range(first, hi + 1, j))
        baby[R] = j
        R = _add(R, P, a, p)
    step = R  # [s]P
    T = _mul(lo, P, a, p)
    out = []
    for i in range(w // s + 1):
        neg = None if T is None else (T[0], -T[1] % p)
        j = baby.get(neg)
        if j is not None:
            k = i * s + j
            if k <= w:
                out.append(lo + k)
        T = _add(T, step, a, p)
    return out


def trace_fast(curve: CurveSpec, p: int, seed: int = 0) -> int:
    """Group order from point orders inside the Hasse interval; Legendre sum if ambiguous."""
    _check_good(curve, p)
    if p < SMALL_P:
        # the Hasse interval admits #E = 1 at p = 3: no affine point to sample
        return trace_naive(curve, p)
    amax = math.isqrt(4 * p - 1)
    lo, hi = p + 1 - amax, p + 1 + amax
    a, b = curve.A % p, curve.B % p
    rng = random.Random(hash((curve.A, curve.B, p, seed)))

    cand = set(range(lo, hi + 1))
    for _ in range(MAX_POINTS):
        cand.intersection_update(_annihilators(_random_point(a, b, p, rng), a, p, lo, hi))
        if len(cand) == 1:
            return p + 1 - cand.pop()

    # quadratic twist by a non-residue d: #E' = 2p + 2 - #E
    d = 2
    while legendre_symbol(d, p) != -1:
        d += 1
    at, bt = a * d * d % p, b * d * d * d % p
    for _ in range(MAX_POINTS):
        twist = set(_annihilators(_random_point(at, bt, p, rng), at, p, lo, hi))
        cand = {n for n in cand if 2 * p + 2 - n in twist}
        if len(cand) == 1:
            return p + 1 - cand.pop()
    return trace_naive(curve, p)


def _trace_chunk(args):
    A, B, primes, method = args
    curve = CurveSpec(A, B)
    if method == "naive":
        naive = list(primes)
    elif method == "auto":
        naive = [p for p in primes if p < NAIVE_CUTOFF]
    else:
        naive = []
    fast = primes[len(naive):]
    out = [(p, trace_naive(curve, p), "naive") for p in naive]
    small_coeffs = max(abs(A), abs(B)) < 2**62
    jit = [p for p in fast if p < JIT_PRIME_LIMIT] if small_coeffs else []
    if jit:
        vals = traces_batch(A, B, np.asarray(jit, dtype=np.int64)).tolist()
        for p, ap in zip(jit, vals):
            if ap == UNRESOLVED:
                out.append((p, trace_naive(curve, p), "naive"))
            else:
                out.append((p, ap, "fast"))
    out += [(p, trace_fast(curve, p), "fast") for p in fast[len(jit):]]
    return out


def _cost(p: int, method: str) -> float:
    if method == "naive" or (method == "auto" and p < NAIVE_CUTOFF):
        return p / 64.0
    return 4.0 * p**0.25


def _partition(primes: list[int], method: str, n_chunks: int) -> list[list[int]]:
    """Contiguous ranges of roughly equal estimated cost."""
    if not primes:
        return []
    costs = np.cumsum([_cost(p, method) for p in primes])
    edges = np.searchsorted(costs, np.linspace(0, costs[-1], n_chunks + 1)[1:-1])
    bounds = [0, *sorted(set(int(e) for e in edges)), len(primes)]
    return [primes[i:j] for i, j in zip(bounds, bounds[1:]) if j > i]


def build_trace_table(
    curve: CurveSpec, x: int, method: str = "auto", workers: int | None = None
) -> TraceTable:
    if method not in ("naive", "fast", "auto"):
        raise ValueError(f"unknown method {method!r}")
    workers = workers or os.cpu_count() or 1
    primes = good_primes(curve, x)
    chunks = _partition(primes, method, max(1, 4 * workers) if workers > 1 else 1)
    jobs = [(curve.A, curve.B, c, method) for c in chunks]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_trace_chunk, jobs))
    else:
        parts = [_trace_chunk(j) for j in jobs]
    rows = [r for part in parts for r in part]
    return TraceTable(
        curve, x, tuple((p, ap) for p, ap, _ in rows), tuple(m for _, _, m in rows)
    )


def format_trace_table(table: TraceTable) -> str:
    lines = [f"{HEADER_PREFIX} A={table.curve.A} B={table.curve.B} x={table.x}"]
    lines += [f"{p},{ap}" for p, ap in table.records]
    return "\n".join(lines) + "\n"


def save_trace_table(table: TraceTable, path: str | Path) -> None:
    Path(path).write_text(format_trace_table(table), encoding="utf-8", newline="\n")


def _parse_header(line: str) -> tuple[int, int, int]:
    if not line.startswith(HEADER_PREFIX + " "):
        raise FormatError(f"line 1: bad header {line!r}")
    fields = {}
    for tok in line[len(HEADER_PREFIX) + 1 :].split():
        key, sep, val = tok.partition("=")
        if not sep:
            raise FormatError(f"line 1: bad header token {tok!r}")
        try:
            fields[key] = int(val)
        except ValueError:
            raise FormatError(f"line 1: non-integer {key}={val!r}") from None
    if set(fields) != {"A", "B", "x"}:
        raise FormatError(f"line 1: header needs exactly A, B, x; got {sorted(fields)}")
    return fields["A"], fields["B"], fields["x"]


def parse_trace_lines(lines: Iterable[str]) -> TraceTable:
    it = iter(lines)
    try:
        header = next(it)
    except StopIteration:
        raise FormatError("line 1: empty file") from None
    A, B, x = _parse_header(header.rstrip("\n"))
    try:
        curve = CurveSpec(A, B)
    except ValueError as exc:
        raise FormatError(f"line 1: {exc}") from None
    records = []
    prev = 0
    for lineno, raw in enumerate(it, start=2):
        line = raw.rstrip("\n")
        parts = line.split(",")
        if len(parts) != 2:
            raise FormatError(f"line {lineno}: expected '<p>,<a_p>', got {line!r}")
        try:
            p, ap = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer field in {line!r}") from None
        if p <= prev:
            raise FormatError(f"line {lineno}: p={p} not ascending (previous {prev})")
        if p > x:
            raise FormatError(f"line {lineno}: p={p} exceeds x={x}")
        if not curve.is_good(p):
            raise FormatError(f"line {lineno}: p={p} is not a good prime for this curve")
        if ap * ap >= 4 * p:
            raise FormatError(f"line {lineno}: Weil bound violated, a_p={ap}, p={p}")
        records.append((p, ap))
        prev = p
    expected = good_primes(curve, x)
    if len(records) != len(expected):
        missing = sorted(set(expected) - {p for p, _ in records})
        raise FormatError(f"line {len(records) + 2}: table incomplete, first missing p={missing[0]}")
    return TraceTable(curve, x, tuple(records), ("cached",) * len(records))


def load_trace_table(path: str | Path) -> TraceTable:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_trace_lines(fh.read().splitlines())

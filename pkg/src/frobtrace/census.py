"""Headline statistics over a trace table: prime / almost-prime trace counts, constants, sieve block."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .arith import big_omega, is_prime, omega
from .frobenius import TraceTable
from .gl2 import ConstantsReport, GaloisImage, conjecture_constant
from .sieve import (
    SieveData,
    check_lower_lemma,
    empirical_Rd,
    leading_terms,
    parameter_recipe,
    sifted_count,
    weighted_H,
)

GOOD_PRIME_RULE = "p > 2 and p does not divide 4A^3 + 27B^2"


def prime_trace_count(table: TraceTable) -> int:
    return sum(1 for a in table.traces if is_prime(a))


def _almost_prime_ok(a: int) -> bool:
    return a not in (0, 1, -1)


def qk_count(table: TraceTable, k: int) -> int:
    if k < 1:
        raise ValueError("k must be >= 1")
    return sum(1 for a in table.traces if _almost_prime_ok(a) and omega(a) <= k)


def pk_count(table: TraceTable, k: int) -> int:
    if k < 1:
        raise ValueError("k must be >= 1")
    return sum(1 for a in table.traces if _almost_prime_ok(a) and big_omega(a) <= k)


def half_trace_prime_count(table: TraceTable) -> int:
    return sum(1 for a in table.traces if a % 2 == 0 and is_prime(a // 2))


def fixed_trace_count(table: TraceTable, alpha: int) -> int:
    return sum(1 for a in table.traces if a == alpha)


def reciprocal_partial_sum(table: TraceTable, x0: float) -> float:
    """sum of 1/p over records with p >= x0 and |a_p| prime."""
    return math.fsum(1 / p for p, a in table.records if p >= x0 and is_prime(a))


def conjecture_ratio(table: TraceTable, C: float) -> float:
    """pi_prime(x) (log x)^2 / (C x); tends to 1 under the conjecture."""
    if C <= 0:
        raise ValueError("C must be positive")
    if table.x <= math.e:
        raise ValueError("need x > e")
    return prime_trace_count(table) * math.log(table.x) ** 2 / (C * table.x)


@dataclass
class CensusOptions:
    m_E: int | None = None  # defaults to the image level, else 2
    image: GaloisImage | None = None
    image2: GaloisImage | None = None
    theta: float = 0.5
    mode: str = "greaves_Q"
    k_max: int = 8
    x0: float = 2.0
    tol: float = 1e-10
    rd_divisors: tuple[int, ...] = (1, 3, 5, 7, 15)
    fixed_alphas: tuple[int, ...] = (0,)


@dataclass
class CensusReport:
    curve: dict
    x: int
    counts: dict
    sieve: dict | None
    constants: dict | None
    diagnostics: dict
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "curve": self.curve,
            "x": self.x,
            "counts": self.counts,
            "sieve": self.sieve,
            "constants": self.constants,
            "diagnostics": self.diagnostics,
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CensusReport":
        return cls(**json.loads(text))


def _desk_params(theta: float, mode: str, x: float):
    """Recipe params; falls back to dropping the log factor when the exact z is <= 2."""
    params = parameter_recipe(theta, mode, x)
    if params.z <= 2:
        params = parameter_recipe(theta, mode, x, drop_log_factor=True)
    return params if params.z > 2 else None


def _sieve_block(table: TraceTable, data: SieveData, opts: CensusOptions) -> dict | None:
    if table.x <= math.e:
        return None
    selberg = _desk_params(opts.theta, "selberg", table.x)
    greaves = _desk_params(opts.theta, opts.mode, table.x)
    if selberg is None or greaves is None:
        return None
    block = {
        "S": sifted_count(data, selberg.z),
        "selberg_params": selberg.to_dict(),
        "params": greaves.to_dict(),
    }
    if greaves.mode != "selberg":
        block["H"] = weighted_H(data, greaves)
        block["lower_lemma"] = check_lower_lemma(data, greaves).to_dict()
    return block


def build_report(table: TraceTable, options: CensusOptions | None = None) -> CensusReport:
    opts = options or CensusOptions()
    m_E = opts.m_E or (opts.image.level if opts.image is not None else 2)
    n = len(table)
    k_range = range(1, opts.k_max + 1)
    counts = {
        "records": n,
        "prime": prime_trace_count(table),
        "q": {str(k): qk_count(table, k) for k in k_range},
        "p": {str(k): pk_count(table, k) for k in k_range},
        "half_prime": half_trace_prime_count(table),
        "zero": fixed_trace_count(table, 0),
        "unit": fixed_trace_count(table, 1) + fixed_trace_count(table, -1),
    }
    data = SieveData.from_traces(table.traces, m_E)
    counts["gcd_filtered"] = len(data)

    constants = None
    report_constants: ConstantsReport | None = None
    if opts.image is not None:
        report_constants = conjecture_constant(opts.image, opts.tol, image2=opts.image2)
        constants = report_constants.to_dict()

    diagnostics: dict = {
        "reciprocal_partial": reciprocal_partial_sum(table, opts.x0),
        "reciprocal_x0": opts.x0,
        "fixed_trace": {str(a): fixed_trace_count(table, a) for a in opts.fixed_alphas},
    }
    if table.x > math.e:
        diagnostics["ratio"] = counts["prime"] * math.log(table.x) ** 2 / table.x
    if report_constants is not None and table.x > math.e:
        C = report_constants.C
        diagnostics["empirical_Rd"] = {
            str(d): empirical_Rd(data, report_constants.C1, table.x, d) for d in opts.rd_divisors
        }
        lt = leading_terms(table.x, opts.theta, C)
        diagnostics["leading_terms"] = lt
        if C > 0:
            diagnostics["conjecture_ratio"] = conjecture_ratio(table, C)
            diagnostics["upper_band_ok"] = counts["prime"] <= 10 * lt["upper"]
            diagnostics["reciprocal_cap"] = 3 / (1 - opts.theta) * C / math.log(opts.x0)

    meta = {
        "m_E": m_E,
        "m_E_assumed": opts.image is None and opts.m_E is None,
        "good_prime_rule": GOOD_PRIME_RULE,
        "theta": opts.theta,
        "mode": opts.mode,
        "k_max": opts.k_max,
    }
    return CensusReport(
        {"A": table.curve.A, "B": table.curve.B},
        table.x,
        counts,
        _sieve_block(table, data, opts),
        constants,
        diagnostics,
        meta,
    )

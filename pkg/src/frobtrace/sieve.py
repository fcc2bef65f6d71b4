"""Greaves lower-bound sieve numerics and the data-side Selberg/Greaves functionals."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from .arith import _cached_primes, factorize, prime_pi

V0 = 0.074368
J_Q_LOWER = 0.00692  # J(0.83, 1/6)
J_P_LOWER = 0.3162  # J(3/5, 1/4)
U_PCC = 0.5111286  # root of J(U, 1/4) = 1/2

GL_NODES = 32
QUAD_TOL = 1e-9
MAX_PANELS = 1 << 10

MODES = ("selberg", "greaves_Q", "greaves_P", "pcc")


class SolverError(RuntimeError):
    pass


class LemmaViolation(AssertionError):
    pass


# --- alpha, beta, J ----------------------------------------------------------------

_nodes, _weights = np.polynomial.legendre.leggauss(GL_NODES)


def _composite_gl(f, a: float, b: float, panels: int) -> float:
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    u = mid[:, None] + half[:, None] * _nodes[None, :]
    return float(np.sum(half[:, None] * _weights[None, :] * f(u)))


def integrate(f, a: float, b: float, tol: float = QUAD_TOL) -> tuple[float, float]:
    """Composite 32-point Gauss-Legendre, panels doubled until two levels agree to tol."""
    if b <= a:
        return 0.0, 0.0
    panels = 1
    coarse = _composite_gl(f, a, b, panels)
    while True:
        panels *= 2
        fine = _composite_gl(f, a, b, panels)
        err = abs(fine - coarse)
        if err <= tol or panels >= MAX_PANELS:
            return fine, err
        coarse = fine


def _check_window(V: float) -> None:
    if not (1 / 6 - 1e-12 <= V <= 0.25 + 1e-12):
        raise ValueError(f"V={V} outside the window [1/6, 1/4] of the simplified formulae")


def _tail_factor(u, V):
    return np.log((1 - 1 / u) / (1 - V)), np.log(u - 3) / (u - 2)


def _alpha_integral(V: float) -> tuple[float, float]:
    def f(u):
        tail, kernel = _tail_factor(u, V)
        return ((2 / u) * np.log(2 - u * V) + tail) * kernel

    return integrate(f, 4.0, 1 / V)


def _beta_integral(V: float) -> tuple[float, float]:
    def f(u):
        tail, kernel = _tail_factor(u, V)
        return (np.log(2 - u * V) + tail) * kernel

    return integrate(f, 4.0, 1 / V)


def alpha_of(V: float) -> float:
    _check_window(V)
    if V >= 0.25:
        return 0.0
    return math.log(4 * (1 - V) / 3) - _alpha_integral(V)[0]


def beta_of(V: float) -> float:
    _check_window(V)
    if V >= 0.25:
        return 0.0
    return math.log((1 - V) / (3 * V)) - _beta_integral(V)[0]


@dataclass(frozen=True)
class GreavesValues:
    alpha: float
    beta: float
    J: float
    quadrature_error_estimate: float


def _entropy_part(U: float) -> float:
    return U * math.log(1 / U) + (1 - U) * math.log(1 / (1 - U)) - math.log(4 / 3)


def greaves_values(U: float, V: float) -> GreavesValues:
    _check_window(V)
    if not 0 < U < 1:
        raise ValueError(f"U={U} must lie in (0, 1)")
    if U == V:
        raise ValueError("J is undefined at U = V")
    if V >= 0.25:
        a = b = err = 0.0
    else:
        ia, ea = _alpha_integral(V)
        ib, eb = _beta_integral(V)
        a = math.log(4 * (1 - V) / 3) - ia
        b = math.log((1 - V) / (3 * V)) - ib
        err = ea + V * eb
    J = (_entropy_part(U) + a - V * math.log(3) - V * b) / (U - V)
    return GreavesValues(a, b, J, err / abs(U - V))


def J_of(U: float, V: float) -> float:
    return greaves_values(U, V).J


def solve_U(V: float, target: float, bracket: tuple[float, float] = (0.3, 0.9), tol: float = 1e-9) -> float:
    """Bisection for J(U, V) = target inside the bracket."""
    lo, hi = bracket
    flo = J_of(lo, V) - target
    fhi = J_of(hi, V) - target
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise SolverError(f"J(U, {V}) - {target} has no sign change on [{lo}, {hi}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = J_of(mid, V) - target
        if abs(fmid) <= tol:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _check_theta(theta: float) -> None:
    if not 0.5 <= theta < 1:
        raise ValueError(f"theta={theta} outside [1/2, 1)")


def r1_of(theta: float) -> int:
    _check_theta(theta)
    return 1 + math.floor((3 / (2 * (1 - theta)) - 1 / 6) / 0.83)


def r2_of(theta: float) -> int:
    _check_theta(theta)
    return 1 + math.floor(5 / (2 * (1 - theta)) - 5 / 12)


# --- parameter block -------------------------------------------------------------------

@dataclass(frozen=True)
class GreavesParams:
    mode: str
    theta: float
    U: float | None = None
    V: float | None = None
    xi: float | None = None
    z: float | None = None
    r: int | None = None
    z_rule: str = ""

    def validate(self) -> None:
        if self.z is not None and self.z <= 1:
            raise ValueError(f"z={self.z} must exceed 1")
        if self.mode == "selberg":
            return
        U, V = self.U, self.V
        if not V0 < V < U:
            raise ValueError(f"need V0 < V < U, got U={U}, V={V}")
        if V > 0.25:
            raise ValueError(f"need V <= 1/4, got {V}")
        if U < 0.5:
            raise ValueError(f"need U >= 1/2, got {U}")
        if U + 3 * V < 1 - 1e-12:
            raise ValueError(f"need U + 3V >= 1, got {U + 3 * V}")

    def to_dict(self) -> dict:
        return asdict(self)


def parameter_recipe(theta: float, mode: str, x: float | None = None, drop_log_factor: bool = False) -> GreavesParams:
    """The sieve parameter assignments for each mode.

    With ``drop_log_factor`` the (log x)^k divisor of z is omitted; at desk-scale x the
    exact recipe gives z < 1, which leaves nothing to sieve.
    """
    _check_theta(theta)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {MODES}")
    if mode == "selberg":
        xi, log_pow, U, V, r = (1 - theta) / 6, 2, None, None, None
    elif mode == "greaves_Q":
        xi, log_pow, U, V, r = (1 - theta) / 3, 2, 0.83, 1 / 6, r1_of(theta)
    elif mode == "greaves_P":
        xi, log_pow, U, V, r = (1 - theta) / 3, 2, 0.6, 0.25, r2_of(theta)
    else:
        xi, log_pow, U, V, r = 0.5, 5, U_PCC, 0.25, 2
    z = None
    rule = f"x^{xi:.6g}" if drop_log_factor else f"x^{xi:.6g}/(log x)^{log_pow}"
    if x is not None:
        if x <= math.e:
            raise ValueError("need x > e")
        z = x**xi if drop_log_factor else x**xi / math.log(x) ** log_pow
    return GreavesParams(mode, theta, U, V, xi, z, r, rule)


def min_r_for(max_abs: int, U: float, V: float, z: float) -> int:
    """Smallest r >= 1 with max_abs <= z^(rU + V)."""
    if z <= 1:
        raise ValueError("need z > 1")
    if max_abs <= 1:
        return 1
    r = max(1, math.ceil((math.log(max_abs) / math.log(z) - V) / U))
    while max_abs > z ** (r * U + V):
        r += 1
    return r


def leading_terms(x: float, theta: float, C: float) -> dict:
    if x <= math.e:
        raise ValueError("need x > e")
    base = C * x / math.log(x) ** 2
    k = 3 / (1 - theta)
    return {
        "upper": k * base,
        "lower_Q": k * J_Q_LOWER * base,
        "lower_P": k * J_P_LOWER * base,
        "lower_PCC": base,
        "coefficients": {"upper": k, "lower_Q": k * J_Q_LOWER, "lower_P": k * J_P_LOWER, "lower_PCC": 1.0},
    }


# --- data side -----------------------------------------------------------------

def is_squarefree(d: int) -> bool:
    return d >= 1 and all(e == 1 for _, e in factorize(d).factors)


def density_w(d: int, m_E: int | None = None) -> Fraction:
    """w(d) = prod_{l | d} l^2 / (l^2 - 1)."""
    if not is_squarefree(d):
        raise ValueError(f"d={d} is not squarefree")
    if m_E is not None and math.gcd(d, m_E) != 1:
        raise ValueError(f"d={d} shares a factor with m_E={m_E}")
    out = Fraction(1)
    for q, _ in factorize(d).factors:
        out *= Fraction(q * q, q * q - 1)
    return out


@dataclass(frozen=True)
class SieveData:
    """The sifted multiset together with the torsion level defining the sieve primes."""

    values: tuple[int, ...]
    m_E: int = 2

    @classmethod
    def from_traces(cls, traces: Iterable[int], m_E: int = 2) -> "SieveData":
        return cls(tuple(a for a in traces if math.gcd(a, m_E) == 1), m_E)

    def is_sieve_prime(self, q: int) -> bool:
        return self.m_E % q != 0

    def __len__(self) -> int:
        return len(self.values)


@lru_cache(maxsize=1 << 16)
def _prime_divisors(n: int) -> tuple[int, ...]:
    return tuple(q for q, _ in factorize(n).factors) if n else ()


def _sieve_primes_below(bound: float, m_E: int) -> list[int]:
    if bound <= 2:
        return []
    ps = _cached_primes(math.ceil(bound)).tolist()
    return [q for q in ps if q < bound and m_E % q != 0]


def _sieve_divisors(a: int, bound: float, m_E: int) -> list[int]:
    """Sieve primes l < bound dividing a; gcd(0, k) = k, so a = 0 is hit by all of them."""
    if a == 0:
        return _sieve_primes_below(bound, m_E)
    return [q for q in _prime_divisors(abs(a)) if q < bound and m_E % q != 0]


def sifted_count(data: SieveData, z: float) -> int:
    """S(A, P, z): members free of sieve primes below z."""
    return sum(1 for a in data.values if not _sieve_divisors(a, z, data.m_E))


def g_weight(q: int, params: GreavesParams) -> float:
    """Linear ramp on z^V <= l < z^U, zero elsewhere."""
    t = math.log(q) / math.log(params.z)
    if params.V <= t < params.U:
        return (t - params.V) / (params.U - params.V)
    return 0.0


def script_G(n: int, params: GreavesParams, m_E: int = 2) -> float:
    if n < 1:
        raise ValueError("script_G is defined on positive integers")
    s = sum(1 - g_weight(q, params) for q in _prime_divisors(n) if m_E % q != 0)
    return max(1 - s, 0.0)


def _G_of_member(a: int, params: GreavesParams, m_E: int) -> float:
    zu = params.z**params.U
    s = sum(1 - g_weight(q, params) for q in _sieve_divisors(a, zu, m_E))
    return max(1 - s, 0.0)


def weighted_H(data: SieveData, params: GreavesParams) -> float:
    """H = sum over members of G(gcd(a, P(z^U)))."""
    return sum(_G_of_member(a, params, data.m_E) for a in data.values)


def count_divisible(data: SieveData, d: int) -> int:
    return sum(1 for a in data.values if a % d == 0)


def empirical_Rd(data: SieveData, C1: float, x: float, d: int) -> float:
    """#A_d - (w(d)/d) C1 pi(x); report-only."""
    w = density_w(d, data.m_E)
    return count_divisible(data, d) - float(w / d) * C1 * prime_pi(x)


@dataclass(frozen=True)
class LowerLemmaReport:
    H: float
    count_omega_le_r: int
    count_Omega_le_r: int
    square_hits: int
    max_ok: bool
    support_ok: bool
    zeros: int
    r: int

    @property
    def omega_holds(self) -> bool:
        return self.count_omega_le_r >= self.H - 1e-9

    @property
    def Omega_holds(self) -> bool:
        return self.count_Omega_le_r >= self.H - self.square_hits - 1e-9

    def to_dict(self) -> dict:
        out = asdict(self)
        out.update(omega_holds=self.omega_holds, Omega_holds=self.Omega_holds)
        return out


def check_lower_lemma(data: SieveData, params: GreavesParams) -> LowerLemmaReport:
    """Both sides of the almost-prime lemma; raises LemmaViolation if it fails under its hypotheses."""
    r = params.r
    nonzero = [a for a in data.values if a != 0]
    sub = SieveData(tuple(nonzero), data.m_E)
    H = weighted_H(sub, params)
    n_omega = sum(1 for a in nonzero if len(_prime_divisors(abs(a))) <= r)
    n_Omega = sum(1 for a in nonzero if factorize(abs(a)).big_omega <= r)
    zv, zu = params.z**params.V, params.z**params.U
    ramp = [q for q in _sieve_primes_below(zu, data.m_E) if q >= zv]
    square_hits = sum(1 for q in ramp for a in nonzero if a % (q * q) == 0)
    max_abs = max((abs(a) for a in nonzero), default=0)
    max_ok = max_abs == 0 or math.log(max_abs) <= (r * params.U + params.V) * math.log(params.z)
    support_ok = all(math.gcd(a, data.m_E) == 1 for a in nonzero)
    report = LowerLemmaReport(H, n_omega, n_Omega, square_hits, max_ok, support_ok, len(data) - len(nonzero), r)
    if max_ok and support_ok and not (report.omega_holds and report.Omega_holds):
        raise LemmaViolation(f"almost-prime lemma violated: {report.to_dict()}")
    return report

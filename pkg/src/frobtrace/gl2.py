"""Trace classes in GL2(Z/mZ), Galois-image closures and the conjectural constants C1, C2, C, C'."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .arith import _cached_primes, euler_phi, factorize

Matrix = tuple[int, int, int, int]  # row-major (a, b, c, d), entries reduced mod the level

DEFAULT_EULER_CUTOFF = 10**5
IMAGE_HEADER = "# gl2image v1"


# --- orders and trace classes ------------------------------------------------

def gl2_order(m: int) -> int:
    """m^4 prod_{l | m} (1 - 1/l)(1 - 1/l^2)."""
    if m < 2:
        raise ValueError("level must be >= 2")
    out = m**4
    for q, _ in factorize(m).factors:
        out = out // q**3 * (q - 1) * (q * q - 1)
    return out


def pgl2_order(m: int) -> int:
    """m^3 prod_{l | m} (1 - 1/l^2)."""
    if m < 2:
        raise ValueError("level must be >= 2")
    out = m**3
    for q, _ in factorize(m).factors:
        out = out // (q * q) * (q * q - 1)
    return out


def enumerate_gl2(m: int) -> np.ndarray:
    """All invertible 2x2 matrices mod m as an (N, 4) array, brute force."""
    a, b, c, d = np.indices((m, m, m, m), dtype=np.int64).reshape(4, -1)
    keep = np.gcd((a * d - b * c) % m, m) == 1
    return np.stack([a[keep], b[keep], c[keep], d[keep]], axis=1)


def trace_histogram(m: int) -> np.ndarray:
    """Brute-force #C(m, alpha) for every alpha mod m."""
    g = enumerate_gl2(m)
    return np.bincount((g[:, 0] + g[:, 3]) % m, minlength=m)


def _prime_trace_count(q: int, alpha: int) -> int:
    return q**3 - q**2 if alpha % q == 0 else q**3 - q**2 - q


def count_trace_class(m: int, alpha: int) -> int:
    """#{M in GL2(Z/mZ): tr M = alpha}.

    Prime levels use the l^3 - l^2 (- l) counts; a prime power l^k multiplies the
    mod-l count by l^(3(k-1)) (each residue class lifts uniformly); coprime levels
    multiply through CRT.
    """
    if m < 2:
        raise ValueError("level must be >= 2")
    out = 1
    for q, k in factorize(m).factors:
        out *= _prime_trace_count(q, alpha) * q ** (3 * (k - 1))
    return out


def count_trace_class_brute(m: int, alpha: int) -> int:
    return int(trace_histogram(m)[alpha % m])


def count_projective_trace_zero(m: int) -> int:
    """#C^(m, 0): trace-zero classes in PGL2(Z/mZ), for m = l, l^2 or squarefree odd m."""
    fac = factorize(m).factors if m >= 2 else ()
    if not fac or m % 2 == 0:
        raise ValueError(f"unsupported level {m}: need odd l, l^2 or odd squarefree m")
    if len(fac) == 1 and fac[0][1] <= 2:
        return m**2
    if all(k == 1 for _, k in fac):
        return m**2
    raise ValueError(f"unsupported level {m}: need odd l, l^2 or odd squarefree m")


def count_projective_trace_zero_brute(m: int) -> int:
    """Orbits of trace-zero invertible matrices under unit scalars."""
    g = enumerate_gl2(m)
    g = g[(g[:, 0] + g[:, 3]) % m == 0]
    units = [u for u in range(1, m) if math.gcd(u, m) == 1]
    weights = np.array([m**3, m**2, m, 1], dtype=np.int64)
    codes = np.stack([((u * g) % m) @ weights for u in units])
    return int(np.unique(codes.min(axis=0)).size)


# --- Galois images -------------------------------------------------------------

def mat_mul(x: Matrix, y: Matrix, m: int) -> Matrix:
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % m, (a * f + b * h) % m, (c * e + d * g) % m, (c * f + d * h) % m)


def det(x: Matrix, m: int) -> int:
    return (x[0] * x[3] - x[1] * x[2]) % m


@dataclass(frozen=True)
class GaloisImage:
    level: int
    elements: frozenset

    def __len__(self) -> int:
        return len(self.elements)

    def is_closed(self) -> bool:
        if (1, 0, 0, 1) not in self.elements:
            return False
        return all(mat_mul(x, y, self.level) in self.elements for x in self.elements for y in self.elements)

    def traces(self) -> list[int]:
        return [(x[0] + x[3]) % self.level for x in self.elements]


def _reduce(x, m: int) -> Matrix:
    if len(x) != 4:
        raise ValueError(f"matrix needs 4 entries, got {x!r}")
    return tuple(int(v) % m for v in x)


def closure(m: int, generators) -> GaloisImage:
    """Smallest multiplicatively closed set containing the identity and the generators."""
    if m < 2:
        raise ValueError("level must be >= 2")
    gens = [_reduce(g, m) for g in generators]
    for g in gens:
        if math.gcd(det(g, m), m) != 1:
            raise ValueError(f"generator {g} is not invertible mod {m}")
    ident = (1, 0, 0, 1)
    seen = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = mat_mul(x, g, m)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    assert len(seen) <= gl2_order(m)
    return GaloisImage(m, frozenset(seen))


def full_image(m: int) -> GaloisImage:
    return GaloisImage(m, frozenset(map(tuple, enumerate_gl2(m).tolist())))


def save_image(image: GaloisImage, path: str | Path) -> None:
    lines = [f"{IMAGE_HEADER} m={image.level}"]
    lines += [",".join(map(str, x)) for x in sorted(image.elements)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_image(path: str | Path) -> GaloisImage:
    """Read an image file; the listed matrices are closed into a group."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith(IMAGE_HEADER + " m="):
        raise ValueError("line 1: expected '# gl2image v1 m=<int>'")
    try:
        m = int(lines[0][len(IMAGE_HEADER) + 3 :])
    except ValueError:
        raise ValueError(f"line 1: bad level in {lines[0]!r}") from None
    if m < 2:
        raise ValueError("line 1: level must be >= 2")
    mats = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            entries = [int(v) for v in line.split(",")]
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer entry in {line!r}") from None
        if len(entries) != 4 or any(not 0 <= v < m for v in entries):
            raise ValueError(f"line {lineno}: need 4 entries in [0, {m})")
        mats.append(tuple(entries))
    return closure(m, mats)


# --- constants -----------------------------------------------------------------

@dataclass(frozen=True)
class ConstantsReport:
    level: int
    C1: float
    C2: float
    C: float
    euler_tail_bound: float  # absolute, on C2
    euler_cutoff: int
    Cprime: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _require_even(m_E: int) -> None:
    if m_E < 2 or m_E % 2:
        raise ValueError(f"torsion conductor must be even and >= 2, got {m_E}")


def trace_unit_fraction(image: GaloisImage) -> Fraction:
    if not image.elements:
        raise ValueError("empty image")
    m = image.level
    hits = sum(1 for t in image.traces() if math.gcd(t, m) == 1)
    return Fraction(hits, len(image))


def c1_constant(image: GaloisImage) -> float:
    return float(trace_unit_fraction(image))


def relative_tail_bound(cutoff: int) -> float:
    """Bound on |1 - prod_{l > y} (1 - 1/(l^3 - l^2 - l + 1))|.

    Uses 1/((n-1)^2 (n+1)) <= 1/(n-1)^3 and sum_{k >= y} k^-3 <= y^-3 + 1/(2 y^2).
    """
    return cutoff**-3.0 + 0.5 * cutoff**-2.0


def euler_product(m_E: int, cutoff: int = DEFAULT_EULER_CUTOFF) -> float:
    """prod_{l <= cutoff, l not dividing m_E} (1 - 1/(l^3 - l^2 - l + 1))."""
    ls = _cached_primes(cutoff).primes
    ls = ls[m_E % ls != 0].astype(np.float64)
    return math.exp(float(np.sum(np.log1p(-1.0 / ((ls - 1.0) ** 2 * (ls + 1.0))))))


def _cutoff_for(tol: float) -> int:
    if tol <= 0:
        raise ValueError("tol must be positive")
    y = DEFAULT_EULER_CUTOFF
    while relative_tail_bound(y) > tol:
        y *= 2
    return y


def c2_with_bound(m_E: int, tol: float = 1e-10, cutoff: int | None = None) -> tuple[float, float, int]:
    """(C2, absolute truncation bound, cutoff)."""
    _require_even(m_E)
    y = cutoff if cutoff is not None else _cutoff_for(tol)
    value = m_E / euler_phi(m_E) * euler_product(m_E, y)
    return value, value * relative_tail_bound(y), y


def c2_constant(m_E: int, tol: float = 1e-10, cutoff: int | None = None) -> float:
    return c2_with_bound(m_E, tol, cutoff)[0]


def half_trace_fraction(image2: GaloisImage, m_E: int) -> Fraction:
    m2 = 2 * m_E
    if image2.level != m2:
        raise ValueError(f"image level {image2.level} != 2 * m_E = {m2}")
    if not image2.elements:
        raise ValueError("empty image")
    targets = {2 * u % m2 for u in range(m2) if math.gcd(u, m2) == 1}
    hits = sum(1 for t in image2.traces() if t in targets)
    return Fraction(hits, len(image2))


def half_trace_constant(image2: GaloisImage, m_E: int, tol: float = 1e-10, cutoff: int | None = None) -> float:
    _require_even(m_E)
    frac = half_trace_fraction(image2, m_E)
    y = cutoff if cutoff is not None else _cutoff_for(tol)
    return m_E / euler_phi(m_E) * float(frac) * euler_product(m_E, y)


def conjecture_constant(
    image: GaloisImage, tol: float = 1e-10, image2: GaloisImage | None = None, cutoff: int | None = None
) -> ConstantsReport:
    m_E = image.level
    _require_even(m_E)
    c1 = c1_constant(image)
    c2, tail, y = c2_with_bound(m_E, tol, cutoff)
    # same truncation on both sides, so C = 2 C1 C2 holds to rounding
    C = 2 * (m_E / euler_phi(m_E)) * c1 * euler_product(m_E, y)
    assert abs(C - 2 * c1 * c2) <= 1e-12 * max(1.0, C)
    cprime = half_trace_constant(image2, m_E, cutoff=y) if image2 is not None else None
    return ConstantsReport(m_E, c1, c2, C, tail, y, cprime)


def w_product(m_E: int, z: float) -> float:
    """W(z) = prod_{l < z, l not dividing m_E} (1 - w(l)/l) with w(l) = (1 - l^-2)^-1."""
    if z <= m_E:
        raise ValueError("need z > m_E")
    ls = _cached_primes(max(2, math.ceil(z) - 1)).primes
    ls = ls[(ls < z) & (m_E % ls != 0)].astype(np.float64)
    return math.exp(float(np.sum(np.log1p(-ls / (ls * ls - 1.0)))))

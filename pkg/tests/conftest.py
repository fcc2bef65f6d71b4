import random

import pytest
from hypothesis import HealthCheck, settings

from frobtrace.frobenius import CurveSpec

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def count_points_brute(A: int, B: int, p: int) -> int:
    """#E(F_p) by listing every (x, y) pair plus the point at infinity."""
    squares = {}
    for y in range(p):
        squares[y * y % p] = squares.get(y * y % p, 0) + 1
    return 1 + sum(squares.get((x * x * x + A * x + B) % p, 0) for x in range(p))


def trial_division_primes(n: int) -> list[int]:
    out = []
    for k in range(2, n + 1):
        if all(k % q for q in out if q * q <= k):
            out.append(k)
    return out


def seeded_curves(n: int, seed: int = 1, bound: int = 10**6) -> list[CurveSpec]:
    rng = random.Random(seed)
    curves = []
    while len(curves) < n:
        A, B = rng.randrange(-bound, bound), rng.randrange(-bound, bound)
        if 4 * A**3 + 27 * B**2:
            curves.append(CurveSpec(A, B))
    return curves


@pytest.fixture
def toy_curve():
    return CurveSpec(1, 1)

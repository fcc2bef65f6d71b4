"""Integer primitives: segmented prime sieve, Legendre symbol, trial-division factoring."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_SIEVE_LIMIT = 2**32
MAX_FACTOR_N = 2**63
SEGMENT_ODDS = 2**18


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class PrimeList:
    limit: int
    primes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.primes.setflags(write=False)

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes.tolist())

    def tolist(self) -> list[int]:
        return self.primes.tolist()


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def big_omega(self) -> int:
        return sum(e for _, e in self.factors)

    def value(self) -> int:
        out = 1
        for q, e in self.factors:
            out *= q**e
        return out


def _small_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def primes_up_to(limit: int) -> PrimeList:
    """All primes <= limit via an odd-only segmented sieve of Eratosthenes."""
    if limit < 0:
        raise ValueError("limit must be nonnegative")
    if limit > MAX_SIEVE_LIMIT:
        raise CapacityError(f"limit {limit} exceeds supported range 2**32")
    if limit < 2:
        return PrimeList(limit, np.array([], dtype=np.int64))

    base = _small_sieve(math.isqrt(limit))[1:]  # odd base primes
    chunks = [np.array([2], dtype=np.int64)]
    low = 3
    while low <= limit:
        high = min(low + 2 * SEGMENT_ODDS, limit + 1)  # exclusive
        n_odd = (high - low + 1) // 2
        mask = np.ones(n_odd, dtype=bool)
        for p in base.tolist():
            p2 = p * p
            if p2 >= high:
                break
            start = max(p2, ((low + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            if start < high:
                mask[(start - low) // 2 :: p] = False
        chunks.append(low + 2 * np.flatnonzero(mask).astype(np.int64))
        low = high if high % 2 == 1 else high + 1
    return PrimeList(limit, np.concatenate(chunks))


@lru_cache(maxsize=8)
def _cached_primes(limit: int) -> PrimeList:
    return primes_up_to(limit)


def prime_pi(x: float) -> int:
    """Exact prime-counting function."""
    if x < 2:
        return 0
    return len(_cached_primes(int(x)))


def legendre_symbol(a: int, p: int) -> int:
    if p < 3 or p % 2 == 0:
        raise ValueError(f"legendre_symbol needs an odd prime, got {p}")
    r = pow(a % p, (p - 1) // 2, p)
    if r == p - 1:
        return -1
    return r


def sqrt_mod(a: int, p: int) -> int:
    """A square root of a quadratic residue a modulo an odd prime p (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


_TRIAL_PRIMES = _small_sieve(1 << 16).tolist()
# witnesses that make Miller-Rabin deterministic below 3.3e24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=1 << 16)
def factorize(n: int) -> Factorization:
    """Trial-division factorization; census inputs are tiny (|a_p| < 2 sqrt(x)).

    A prime cofactor is recognised by Miller-Rabin, so n = small * large prime is fast.
    Products of two primes above 2^16 still cost O(sqrt(n)).
    """
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    if n > MAX_FACTOR_N:
        raise CapacityError(f"{n} exceeds 2**63")
    factors = []
    m = n
    for q in _TRIAL_PRIMES:
        if q * q > m:
            break
        if m % q == 0:
            e = 0
            while m % q == 0:
                m //= q
                e += 1
            factors.append((q, e))
    else:
        # past the cached primes: odd candidates only, unless the cofactor is already prime
        q = _TRIAL_PRIMES[-1] + 2
        done = _is_probable_prime(m)
        while not done and q * q <= m:
            if m % q == 0:
                e = 0
                while m % q == 0:
                    m //= q
                    e += 1
                factors.append((q, e))
                done = _is_probable_prime(m)
            q += 2
    if m > 1:
        factors.append((m, 1))
    return Factorization(n, tuple(factors))


def omega(n: int) -> int:
    return factorize(abs(n)).omega if n else 0


def big_omega(n: int) -> int:
    return factorize(abs(n)).big_omega if n else 0


def is_prime(n: int) -> bool:
    n = abs(n)
    if n < 2:
        return False
    f = factorize(n).factors
    return len(f) == 1 and f[0][1] == 1


def euler_phi(n: int) -> int:
    out = n
    for q, _ in factorize(n).factors:
        out = out // q * (q - 1)
    return out


def omega_table(limit: int) -> np.ndarray:
    """omega(n) for 0 <= n <= limit (entries 0 and 1 are 0)."""
    out = np.zeros(limit + 1, dtype=np.int64)
    for p in _cached_primes(limit).tolist():
        out[p::p] += 1
    return out


def mertens_first_deviation(y: float) -> float:
    """|sum_{l <= y} log(l)/l - log(y)|; bounded by 2 for y > e."""
    if y <= math.e:
        raise ValueError("mertens_first_deviation needs y > e")
    ps = _cached_primes(int(y)).primes.astype(np.float64)
    return abs(float(np.sum(np.log(ps) / ps)) - math.log(y))

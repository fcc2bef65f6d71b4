"""Compiled batch kernel for the order-finding trace path.

Same algorithm as ``frobenius.trace_fast``. All arithmetic is int64, so primes must stay
below 2**31 (products of residues fit in 62 bits). Unresolved primes come back as
``UNRESOLVED`` and are finished by the Legendre-sum path in Python.
"""
from __future__ import annotations

import numpy as np
from numba import njit

JIT_PRIME_LIMIT = 2**31
UNRESOLVED = np.int64(1) << np.int64(62)
_MAX_POINTS = 8
SMALL_P = 11


@njit(cache=True)
def _powmod(b, e, p):
    r = 1
    b %= p
    while e > 0:
        if e & 1:
            r = r * b % p
        b = b * b % p
        e >>= 1
    return r


@njit(cache=True)
def _inv(a, p):
    # extended Euclid; a is a nonzero residue
    t, new_t = 0, 1
    r, new_r = p, a % p
    while new_r != 0:
        q = r // new_r
        t, new_t = new_t, t - q * new_t
        r, new_r = new_r, r - q * new_r
    return t % p


@njit(cache=True)
def _sqrt(a, p):
    if a == 0:
        return 0
    if p % 4 == 3:
        return _powmod(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while _powmod(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, _powmod(z, q, p), _powmod(a, q, p), _powmod(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = _powmod(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


@njit(cache=True)
def _add(x1, y1, o1, x2, y2, o2, a, p):
    # points are (x, y, is_infinity)
    if o1:
        return x2, y2, o2
    if o2:
        return x1, y1, o1
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return 0, 0, True
        lam = (3 * (x1 * x1 % p) + a) % p * _inv(2 * y1 % p, p) % p
    else:
        lam = (y2 - y1) % p * _inv((x2 - x1) % p, p) % p
    x3 = (lam * lam - x1 - x2) % p
    y3 = (lam * ((x1 - x3) % p) - y1) % p
    return x3, y3, False


@njit(cache=True)
def _mul(k, x, y, a, p):
    rx, ry, ro = 0, 0, True
    o = False
    while k > 0:
        if k & 1:
            rx, ry, ro = _add(rx, ry, ro, x, y, o, a, p)
        x, y, o = _add(x, y, o, x, y, o, a, p)
        k >>= 1
    return rx, ry, ro


@njit(cache=True)
def _next(state):
    # xorshift64, logical right shifts emulated by masking
    state ^= (state >> 12) & 0x000FFFFFFFFFFFFF
    state ^= state << 25
    state ^= (state >> 27) & 0x0000001FFFFFFFFF
    return state


@njit(cache=True)
def _random_point(a, b, p, state):
    # callers keep p >= SMALL_P, where an affine point always exists
    while True:
        state = _next(state)
        x = (state & 0x7FFFFFFFFFFFFFFF) % p
        rhs = (x * x % p * x + a * x + b) % p
        if rhs == 0:
            return x, 0, state
        if _powmod(rhs, (p - 1) // 2, p) == 1:
            return x, _sqrt(rhs, p), state


@njit(cache=True)
def _annihilators(x, y, a, p, lo, hi, out):
    """out[k] = True iff [lo + k]P = O, for 0 <= k <= hi - lo."""
    w = hi - lo
    out[:] = False
    s = int(np.sqrt(w)) + 1
    bx = np.empty(s, dtype=np.int64)
    by = np.empty(s, dtype=np.int64)
    rx, ry, ro = 0, 0, True
    for j in range(s):
        if j > 0 and ro:
            first = ((lo + j - 1) // j) * j
            for m in range(first, hi + 1, j):
                out[m - lo] = True
            return
        # j = 0 is infinity; mark with x = -1
        bx[j] = -1 if ro else rx
        by[j] = ry
        rx, ry, ro = _add(rx, ry, ro, x, y, False, a, p)
    sx, sy, so = rx, ry, ro  # [s]P
    order = np.argsort(bx)
    keys = bx[order]
    tx, ty, to = _mul(lo, x, y, a, p)
    for i in range(w // s + 1):
        kx = -1 if to else tx
        pos = np.searchsorted(keys, kx)
        # each x appears at most twice among 0 <= j < s (for +-jP)
        while pos < s and keys[pos] == kx:
            j = order[pos]
            if to or by[j] == (p - ty) % p:
                k = i * s + j
                if k <= w:
                    out[k] = True
            pos += 1
        tx, ty, to = _add(tx, ty, to, sx, sy, so, a, p)


@njit(cache=True)
def _trace_one(A, B, p):
    if p < SMALL_P:
        return UNRESOLVED
    amax = int(np.sqrt(4 * p - 1))
    while amax * amax > 4 * p - 1:
        amax -= 1
    while (amax + 1) * (amax + 1) <= 4 * p - 1:
        amax += 1
    lo, hi = p + 1 - amax, p + 1 + amax
    w = hi - lo
    a, b = A % p, B % p
    state = np.int64(p * 0x9E3779B1 + 1) ^ np.int64((A & 0xFFFF) << 40) ^ np.int64((B & 0xFFFF) << 20)
    if state == 0:
        state = 1
    cand = np.ones(w + 1, dtype=np.bool_)
    hits = np.empty(w + 1, dtype=np.bool_)
    for _ in range(_MAX_POINTS):
        x, y, state = _random_point(a, b, p, state)
        _annihilators(x, y, a, p, lo, hi, hits)
        cand &= hits
        n = cand.sum()
        if n == 1:
            return p + 1 - (lo + np.argmax(cand))
    d = 2
    while _powmod(d, (p - 1) // 2, p) != p - 1:
        d += 1
    at = a * d % p * d % p
    bt = b * d % p * d % p * d % p
    for _ in range(_MAX_POINTS):
        x, y, state = _random_point(at, bt, p, state)
        _annihilators(x, y, at, p, lo, hi, hits)
        # candidate n needs 2p + 2 - n among the twist's annihilators: index w - k
        cand &= hits[::-1]
        n = cand.sum()
        if n == 1:
            return p + 1 - (lo + np.argmax(cand))
    return UNRESOLVED


@njit(cache=True)
def traces_batch(A, B, primes):
    out = np.empty(primes.shape[0], dtype=np.int64)
    for i in range(primes.shape[0]):
        out[i] = _trace_one(A, B, primes[i])
    return out

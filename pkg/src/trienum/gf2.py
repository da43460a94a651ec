"""Arithmetic on GF(2)[x] polynomials stored as Python ints, and GF(2^k)."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def degree(f: int) -> int:
    return f.bit_length() - 1


def pmod(a: int, f: int) -> int:
    df = degree(f)
    while a and degree(a) >= df:
        a ^= f << (degree(a) - df)
    return a


def pmulmod(a: int, b: int, f: int) -> int:
    r = 0
    a = pmod(a, f)
    df = degree(f)
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> df & 1:
            a ^= f
    return r


def pgcd(a: int, b: int) -> int:
    while b:
        a, b = b, pmod(a, b)
    return a


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(f: int) -> bool:
    """Rabin's test over GF(2)."""
    m = degree(f)
    if m < 1:
        return False
    if m == 1:
        return True
    if not f & 1:
        return False
    # powers[i] = x^(2^i) mod f
    powers = [pmod(2, f)]
    for _ in range(m):
        powers.append(pmulmod(powers[-1], powers[-1], f))
    if powers[m] != pmod(2, f):
        return False
    for p in _prime_factors(m):
        if pgcd(f, powers[m // p] ^ 2) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def irreducibles(m: int) -> tuple[int, ...]:
    """All monic irreducible polynomials of degree ``m``, ascending."""
    lo = 1 << m
    return tuple(f for f in range(lo, lo << 1) if is_irreducible(f))


@lru_cache(maxsize=None)
def field_poly(k: int) -> int:
    """The smallest irreducible polynomial of degree ``k`` (defines GF(2^k))."""
    lo = 1 << k
    for f in range(lo, lo << 1):
        if is_irreducible(f):
            return f
    raise AssertionError("unreachable")


def gf_mul(a, b, k: int, poly: int) -> np.ndarray:
    """Elementwise product in GF(2^k) of integer arrays ``a`` and ``b``."""
    a = np.array(a, dtype=np.int64, copy=True)
    b = np.asarray(b, dtype=np.int64)
    a, b = np.broadcast_arrays(a, b)
    a = a.copy()
    r = np.zeros_like(a)
    top = 1 << k
    for i in range(k):
        r ^= np.where((b >> i) & 1, a, 0)
        a <<= 1
        a ^= np.where(a & top, poly, 0)
    return r


def fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis (length 2^m)."""
    a = np.array(a, copy=True)
    n = a.shape[-1]
    lead = a.shape[:-1]
    h = 1
    while h < n:
        v = a.reshape(*lead, n // (2 * h), 2, h)
        x = v[..., 0, :].copy()
        y = v[..., 1, :]
        v[..., 0, :] += y
        v[..., 1, :] = x - y
        h *= 2
    return a


def parity(x) -> np.ndarray:
    return (np.bitwise_count(np.asarray(x, dtype=np.int64)) & 1).astype(np.int64)

"""Primes, Legendre symbols and binomial residues modulo powers of two."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ResourceError

__all__ = [
    "MAX_SIEVE_LIMIT",
    "PrimeTable",
    "sieve_primes",
    "prime_in_progression",
    "is_prime",
    "legendre_symbol",
    "binom_parity",
    "binom_mod_pow2",
    "BinomResidue",
]

MAX_SIEVE_LIMIT = 1 << 24


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: tuple

    def __len__(self):
        return len(self.primes)

    def __contains__(self, n):
        i = bisect.bisect_left(self.primes, n)
        return i < len(self.primes) and self.primes[i] == n

    def between(self, lo, hi):
        """Primes ``p`` with ``lo <= p <= hi`` (clipped to the table)."""
        i = bisect.bisect_left(self.primes, lo)
        j = bisect.bisect_right(self.primes, hi)
        return self.primes[i:j]

    def count_upto(self, x):
        return bisect.bisect_right(self.primes, x)

    def as_array(self):
        return np.asarray(self.primes, dtype=np.int64)


def sieve_primes(limit: int, max_limit: int = MAX_SIEVE_LIMIT) -> PrimeTable:
    """All primes up to ``limit`` by the sieve of Eratosthenes over odd numbers."""
    if limit < 2:
        raise ValueError(f"sieve limit must be >= 2, got {limit}")
    if limit > max_limit:
        raise ResourceError(f"sieve limit {limit} exceeds bound {max_limit}")
    # is_odd_prime[i] describes 2*i + 1
    half = (limit - 1) // 2 + 1
    is_odd_prime = np.ones(half, dtype=bool)
    is_odd_prime[0] = False
    r = int(limit**0.5)
    for i in range(1, (r - 1) // 2 + 1):
        if is_odd_prime[i]:
            p = 2 * i + 1
            is_odd_prime[(p * p) // 2 :: p] = False
    odd = 2 * np.flatnonzero(is_odd_prime) + 1
    primes = [2] + odd.tolist()
    return PrimeTable(limit, tuple(primes))


@lru_cache(maxsize=16)
def cached_table(limit: int) -> PrimeTable:
    return sieve_primes(limit)


@lru_cache(maxsize=4096)
def is_prime(n: int) -> bool:
    """Deterministic trial division; only meant for argument validation."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_in_progression(table: PrimeTable, lo: int, hi: int, residue: int, modulus: int):
    """Smallest prime ``p`` in ``[lo, hi]`` with ``p % modulus == residue``, else None."""
    if not 0 <= residue < modulus:
        raise ValueError("need 0 <= residue < modulus")
    if lo > hi or hi > table.limit:
        raise ValueError("need lo <= hi <= table.limit")
    for p in table.between(lo, hi):
        if p % modulus == residue:
            return p
    return None


def legendre_symbol(a: int, p: int) -> int:
    """(a/p) by Euler's criterion."""
    if p < 3 or not is_prime(p):
        raise ValueError(f"legendre_symbol needs an odd prime, got {p}")
    t = pow(a % p, (p - 1) // 2, p)
    if t == 0:
        return 0
    return 1 if t == 1 else -1


def binom_parity(n: int, k: int) -> int:
    """C(n, k) mod 2 via Lucas: odd iff k and n - k share no set bit."""
    if k < 0 or n < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    return 1 if (k & (n - k)) == 0 else 0


@dataclass(frozen=True)
class BinomResidue:
    """``C(n, k) mod 2^m`` together with its 2-adic valuation.

    ``valuation`` is exact when ``exact`` is True; otherwise the true
    valuation is at least ``m`` and ``residue`` is 0.
    """

    residue: int
    valuation: int
    exact: bool


@lru_cache(maxsize=None)
def _odd_prefix_products(m: int) -> tuple:
    # prefix[r] = product of odd t <= r, mod 2^m, for 0 <= r < 2^m
    mod = 1 << m
    out = [1] * mod
    acc = 1
    for r in range(mod):
        if r & 1:
            acc = (acc * r) % mod
        out[r] = acc
    # acc is now the product over one full period of odd residues
    return tuple(out), acc


def _odd_factorial_part(n: int, m: int) -> int:
    """Odd part of n! modulo 2^m: n! = 2^v * prod_{j>=0} oddfact(n >> j)."""
    mod = 1 << m
    prefix, full = _odd_prefix_products(m)
    acc = 1
    while n > 0:
        q, r = divmod(n, mod)
        acc = acc * pow(full, q, mod) * prefix[r] % mod
        n >>= 1
    return acc


def binom_mod_pow2(n: int, k: int, m: int) -> BinomResidue:
    """C(n, k) mod 2^m with the Kummer valuation (carries of k + (n-k) in base 2)."""
    if k < 0 or n < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    if not 1 <= m <= 16:
        raise ValueError("m must lie in [1, 16]")
    v = bin(k).count("1") + bin(n - k).count("1") - bin(n).count("1")
    if v >= m:
        return BinomResidue(0, m, False)
    mod = 1 << m
    odd = _odd_factorial_part(n, m)
    den = _odd_factorial_part(k, m) * _odd_factorial_part(n - k, m) % mod
    odd = odd * pow(den, -1, mod) % mod
    return BinomResidue((odd << v) % mod, v, True)

"""Cyclotomic polynomials, Euler's phi and exact rational-root tests."""

from __future__ import annotations

from functools import lru_cache
from math import gcd

import numpy as np

from ..polycore import IntPolynomial

__all__ = [
    "euler_phi",
    "phi_inverse",
    "cyclotomic_polynomial",
    "cyclotomic_check",
    "rational_root_check",
    "divisors",
]


def _factorize(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("phi is defined for n >= 1")
    result = n
    for p in _factorize(n):
        result -= result // p
    return result


def _mobius(n):
    fac = _factorize(n)
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


@lru_cache(maxsize=8)
def _phi_table(limit):
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if phi[p] == p:  # p untouched so far, hence prime
            phi[p::p] -= phi[p::p] // p
    return phi


@lru_cache(maxsize=None)
def phi_inverse(d: int) -> tuple:
    """All n with phi(n) == d, ascending. Uses phi(n) >= sqrt(n/2), so n <= 2 d^2."""
    if d < 1:
        return ()
    limit = max(2 * d * d, 2)
    table = _phi_table(1 << max(limit - 1, 1).bit_length())
    return tuple(int(n) for n in np.flatnonzero(table[: limit + 1] == d) if n >= 1)


@lru_cache(maxsize=512)
def cyclotomic_polynomial(n: int) -> IntPolynomial:
    """Phi_n = prod_{e | n} (X^e - 1)^{mu(n/e)}: multiply the positive factors,
    then divide out the negative ones exactly."""
    if n < 1:
        raise ValueError("order must be >= 1")
    num = IntPolynomial([1])
    dens = []
    for e in range(1, n + 1):
        if n % e:
            continue
        mu = _mobius(n // e)
        binom = IntPolynomial([-1] + [0] * (e - 1) + [1])
        if mu == 1:
            num = num * binom
        elif mu == -1:
            dens.append(binom)
    for binom in dens:
        q, r = num.divmod_exact(binom)
        assert r.is_zero()
        num = q
    return num


def _fold(P, n):
    """P mod (X^n - 1); Phi_n divides P iff it divides the fold."""
    out = [0] * n
    for i, c in enumerate(P.coeffs):
        out[i % n] += c
    return IntPolynomial(out)


def _clearly_nonzero_at_root_of_unity(P, n):
    coeffs = P.coeffs
    if max(abs(c) for c in coeffs) > 1 << 50:
        return False
    z = np.exp(2j * np.pi / n)
    val = np.polyval(np.array(coeffs[::-1], dtype=np.complex128), z)
    # Horner roundoff is far below this threshold for any practical degree
    scale = float(sum(abs(c) for c in coeffs))
    return abs(val) > 1e-6 * scale


def cyclotomic_check(P: IntPolynomial, n: int):
    """(divisible, Phi_n or None): exact remainder of P modulo Phi_n."""
    if n < 1:
        raise ValueError("order must be >= 1")
    if P.is_zero():
        return True, cyclotomic_polynomial(n)
    if _clearly_nonzero_at_root_of_unity(P, n):
        return False, None
    phi = cyclotomic_polynomial(n)
    folded = _fold(P, n) if P.deg >= n else P
    _, r = folded.divmod_exact(phi)
    if r.is_zero():
        return True, phi
    return False, None


def divisors(n: int) -> list:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _root_is_exact(P, r, s):
    # s^deg * P(r/s) == 0
    deg = P.deg
    return sum(c * r**i * s ** (deg - i) for i, c in enumerate(P.coeffs)) == 0


def rational_root_check(P: IntPolynomial):
    """(excluded, witness): degree-1 factors via the rational root theorem.

    ``excluded`` is True when P has no rational root; otherwise ``witness``
    is the primitive linear factor ``sX - r``.
    """
    if P.deg < 1:
        return True, None
    if P[0] == 0:
        return False, IntPolynomial([0, 1])
    a0, lead = P[0], P.lead
    if abs(a0) == 1 and abs(lead) == 1:
        candidates = [(1, 1), (-1, 1)]
    else:
        candidates = []
        for s in divisors(lead):
            for r in divisors(a0):
                if gcd(r, s) == 1:
                    candidates.extend([(r, s), (-r, s)])
    for r, s in candidates:
        if _root_is_exact(P, r, s):
            return False, IntPolynomial([-r, s])
    return True, None

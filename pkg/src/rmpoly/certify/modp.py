"""Factor-degree patterns modulo small primes and the subset-sum exclusion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..arith import cached_table
from ..errors import CertificationUnavailable
from ..kernels import gcd_kernel, polyrem_kernel, powmod_kernel

__all__ = [
    "FactorDegreeConstraint",
    "modp_degree_multiset",
    "excluded_degrees",
    "subset_sums",
    "select_modp_primes",
    "odd_primes",
]


@dataclass(frozen=True)
class FactorDegreeConstraint:
    """Degrees of the irreducible factors of P mod p.

    When the factorization was stopped early, ``tail`` is the total degree of
    the unsplit remainder, all of whose irreducible factors have degree
    > ``split_upto``. ``tail == 0`` means the multiset is complete.
    """

    p: int
    degrees: tuple
    squarefree: bool
    tail: int = 0
    split_upto: int | None = None

    @property
    def complete(self) -> bool:
        return self.tail == 0

    def to_dict(self):
        return {"p": self.p, "squarefree": self.squarefree, "degrees": list(self.degrees), "tail": self.tail}

    def excludes(self, d: int) -> bool:
        if not self.squarefree:
            return False
        if self.tail and d > self.split_upto:
            return False
        return not (subset_sums(self.degrees, d) >> d) & 1


def odd_primes(count: int) -> list:
    primes = cached_table(1 << 16).primes
    return list(primes[1 : count + 1])


def _reduce(P, p):
    arr = np.array([c % p for c in P.coeffs], dtype=np.int64)
    nz = np.flatnonzero(arr)
    return arr[: nz[-1] + 1] if nz.size else arr[:0]


def _monic(a, p):
    return (a * pow(int(a[-1]), -1, p)) % p


def _quotient(a, b, p):
    """Exact quotient a / b over F_p (b monic)."""
    r = a.copy()
    db = len(b) - 1
    q = np.zeros(len(a) - db, dtype=np.int64)
    for i in range(len(a) - 1, db - 1, -1):
        c = int(r[i])
        if c:
            q[i - db] = c
            r[i - db : i + 1] = (r[i - db : i + 1] - c * b) % p
    return q


def _minus_x(h, p):
    out = np.zeros(max(len(h), 2), dtype=np.int64)
    out[: len(h)] = h
    out[1] = (out[1] - 1) % p
    nz = np.flatnonzero(out)
    return out[: nz[-1] + 1] if nz.size else out[:0]


def modp_degree_multiset(P, p: int, max_degree: int | None = None) -> FactorDegreeConstraint:
    """Distinct-degree factorization of P mod p.

    Returns a non-squarefree constraint (empty degrees) when gcd(P, P') is
    nontrivial mod p. With ``max_degree`` the search stops once all factors
    of degree <= max_degree have been split off.
    """
    f = _reduce(P, p)
    if len(f) - 1 != P.deg:
        raise ValueError(f"p={p} divides the leading coefficient")
    n = P.deg
    if n <= 0:
        return FactorDegreeConstraint(p, (), True)
    f = _monic(f, p)
    deriv = (np.arange(1, n + 1, dtype=np.int64) * f[1:]) % p
    g = gcd_kernel(f, deriv, p)
    if len(g) != 1:
        return FactorDegreeConstraint(p, (), False)
    degrees = []
    rest = f
    h = np.array([0, 1], dtype=np.int64)
    e = 1
    while 2 * e <= len(rest) - 1 and (max_degree is None or e <= max_degree):
        h = powmod_kernel(h, p, rest, p)
        g = gcd_kernel(rest, _minus_x(h, p), p)
        dg = len(g) - 1
        if dg > 0:
            degrees.extend([e] * (dg // e))
            rest = _quotient(rest, g, p)
            h = polyrem_kernel(h, rest, p)
        e += 1
    tail = 0
    dr = len(rest) - 1
    if dr > 0:
        if 2 * e > dr:
            degrees.append(dr)
        else:
            tail = dr
    return FactorDegreeConstraint(p, tuple(degrees), True, tail, max_degree if tail else None)


def subset_sums(degrees, bound: int) -> int:
    """Bitmask of achievable sub-multiset sums <= bound (bit s set iff s achievable)."""
    mask = (1 << (bound + 1)) - 1
    reach = 1
    for d in degrees:
        reach = (reach | (reach << d)) & mask
    return reach


def excluded_degrees(constraints, B: int) -> set:
    """Degrees d in [1, B] that no squarefree constraint can realise as a factor degree."""
    good = [c for c in constraints if c.squarefree]
    if not good:
        raise CertificationUnavailable("no squarefree reduction available")
    out = set()
    for c in good:
        reach = subset_sums(c.degrees, B)
        top = B if c.complete else min(B, c.split_upto)
        out.update(d for d in range(1, top + 1) if not (reach >> d) & 1)
    return out


def select_modp_primes(P, count: int = 5, pool: int = 40, max_degree: int | None = None, primes=None):
    """Constraints from the first ``count`` odd primes with squarefree reduction.

    Scans the first ``pool`` odd primes, or ``primes`` when given, in order,
    skipping those dividing the leading coefficient; non-squarefree primes
    are returned separately.
    """
    lead = P.lead
    candidates = primes if primes is not None else odd_primes(pool)
    good, rejected = [], []
    for p in candidates:
        if lead % p == 0:
            continue
        c = modp_degree_multiset(P, p, max_degree)
        (good if c.squarefree else rejected).append(c)
        if len(good) >= count:
            break
    return good, rejected

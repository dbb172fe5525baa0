"""Brute-force factorization over Q for small degree, used as a test oracle.

Roots are located numerically, grouped into conjugation-closed units (a real
root, or a conjugate pair), and unions of units are tried as factor
candidates in increasing degree. A candidate is accepted only after exact
division in Z[X], so every returned factor is genuine; trying every feasible
degree in order makes the factorization complete. Sizes that some prime's
factor-degree pattern forbids are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd

import numpy as np

from ..errors import OracleUnavailable
from ..polycore import IntPolynomial
from .cyclotomic import divisors
from .modp import odd_primes, select_modp_primes, subset_sums

__all__ = ["OracleFactorization", "oracle_factor_small"]

EXHAUSTIVE_MAX_DEG = 24
PRUNED_MAX_DEG = 64
ORACLE_PRIMES = 12
DEFAULT_BUDGET = 2_000_000


@dataclass(frozen=True)
class OracleFactorization:
    """Irreducible factors (up to sign) with ``content`` collecting the integer part."""

    content: int
    factors: tuple

    @property
    def degrees(self):
        return sorted(f.deg for f in self.factors)

    @property
    def irreducible(self) -> bool:
        return len(self.factors) == 1

    def has_factor_of_degree(self, d):
        """True iff some product of the factors has degree d."""
        return bool((subset_sums(self.degrees, d) >> d) & 1)

    def product(self):
        out = IntPolynomial([self.content])
        for f in self.factors:
            out = out * f
        return out


def _content(P):
    g = 0
    for c in P.coeffs:
        g = gcd(g, c)
    return g if P.lead > 0 else -g


def _roots(P):
    coeffs = np.array([float(c) for c in P.coeffs[::-1]])
    z = np.roots(coeffs)
    # Newton polish, kept only where it lowers the residual
    dcoeffs = np.polyder(coeffs)
    for _ in range(3):
        pz = np.polyval(coeffs, z)
        dz = np.polyval(dcoeffs, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = z - pz / dz
        better = np.isfinite(cand) & (np.abs(np.polyval(coeffs, cand)) < np.abs(pz))
        z = np.where(better, cand, z)
    scale = np.polyval(np.abs(coeffs), np.abs(z))
    resid = np.abs(np.polyval(coeffs, z)) / scale
    if not np.all(resid < 1e-9):
        raise OracleUnavailable(f"root residual {resid.max():.2e} above 1e-9")
    return z


def _units(z):
    """Split roots into real singletons and conjugate pairs."""
    tol = 1e-6
    real = [complex(r.real, 0.0) for r in z if abs(r.imag) <= tol * max(1.0, abs(r))]
    upper = sorted((r for r in z if r.imag > tol * max(1.0, abs(r))), key=lambda r: (r.real, r.imag))
    lower = [r for r in z if r.imag < -tol * max(1.0, abs(r))]
    if len(upper) != len(lower):
        raise OracleUnavailable("roots are not closed under conjugation")
    pairs = []
    for r in upper:
        j = min(range(len(lower)), key=lambda t: abs(lower[t] - r.conjugate()))
        pairs.append((r, lower.pop(j)))
    return real, pairs


def _feasible_sizes(P, exhaustive):
    n = P.deg
    top = n // 2
    if exhaustive:
        return list(range(1, top + 1))
    good, _ = select_modp_primes(P, count=ORACLE_PRIMES, primes=[p for p in odd_primes(60) if P.lead % p][:40])
    ok = (1 << (top + 1)) - 1
    for c in good[:ORACLE_PRIMES]:
        ok &= subset_sums(c.degrees, top)
    return [d for d in range(1, top + 1) if (ok >> d) & 1]


def _candidate(roots, c):
    poly = np.poly(np.array(roots)) * c
    coeffs = poly.real[::-1]
    rounded = np.rint(coeffs)
    if np.max(np.abs(coeffs - rounded) / (1.0 + np.abs(rounded))) > 1e-4:
        return None
    if np.max(np.abs(poly.imag)) > 1e-4 * (1.0 + np.max(np.abs(rounded))):
        return None
    return IntPolynomial([int(x) for x in rounded])


def _split(P, exhaustive, budget):
    """One irreducible factor of minimal degree and its cofactor, or None."""
    z = _roots(P)
    real, pairs = _units(z)
    leads = [d for d in divisors(P.lead)]
    for d in _feasible_sizes(P, exhaustive):
        for a in range(min(d // 2, len(pairs)), -1, -1):
            b = d - 2 * a
            if b > len(real):
                continue
            for pc in combinations(range(len(pairs)), a):
                proots = [r for t in pc for r in pairs[t]]
                psum = sum(2.0 * pairs[t][0].real for t in pc)
                for rc in combinations(range(len(real)), b):
                    budget[0] -= 1
                    if budget[0] < 0:
                        raise OracleUnavailable("subset enumeration budget exhausted")
                    e1 = psum + sum(real[t].real for t in rc)
                    roots = proots + [real[t] for t in rc]
                    for c in leads:
                        # c * e1 is minus the next-to-leading coefficient of an integral factor
                        if abs(c * e1 - round(c * e1)) > 1e-6 * (1 + abs(c * e1)):
                            continue
                        g = _candidate(roots, c)
                        if g is None:
                            continue
                        res = P.divmod_exact(g)
                        if res is not None and res[1].is_zero():
                            return g, res[0]
    return None


def oracle_factor_small(P: IntPolynomial, max_deg: int = PRUNED_MAX_DEG, budget: int = DEFAULT_BUDGET) -> OracleFactorization:
    """Complete factorization of P over Q for deg(P) <= max_deg (at most 64).

    Degrees up to 24 are searched exhaustively; above that, candidate sizes
    are pruned by factor-degree patterns modulo several primes.
    """
    if P.is_zero() or P.deg < 1:
        raise ValueError("oracle needs a polynomial of degree >= 1")
    if P.deg > min(max_deg, PRUNED_MAX_DEG):
        raise OracleUnavailable(f"degree {P.deg} exceeds oracle limit")
    cont = _content(P)
    Q = IntPolynomial([c // cont for c in P.coeffs])
    factors = []
    # powers of X first, they have no usable root moduli
    while Q[0] == 0 and Q.deg >= 1:
        factors.append(IntPolynomial([0, 1]))
        Q = IntPolynomial(Q.coeffs[1:])
    left = [budget]
    stack = [Q] if Q.deg >= 1 else []
    while stack:
        F = stack.pop()
        if F.deg == 1:
            factors.append(F)
            continue
        hit = _split(F, F.deg <= EXHAUSTIVE_MAX_DEG, left)
        if hit is None:
            factors.append(F)
        else:
            g, h = hit
            factors.append(g)
            stack.append(h)
    # normalise signs so that leading coefficients are positive
    sign = 1
    normed = []
    for f in factors:
        if f.lead < 0:
            f = -f
            sign = -sign
        normed.append(f)
    normed.sort(key=lambda f: (f.deg, f.coeffs))
    out = OracleFactorization(cont * sign, tuple(normed))
    if out.product().coeffs != P.coeffs:
        raise OracleUnavailable("factor product does not reproduce the input")
    return out

"""Simultaneous root refinement, root moduli and Mahler measure."""

from __future__ import annotations

import math

import numpy as np

from ..errors import NumericError
from ..kernels import gcd_kernel
from ..polycore import IntPolynomial

__all__ = ["all_roots", "root_moduli", "mahler_measure", "dobrowolski_floor"]

MAX_SWEEPS = 1000
START_RADIUS = 1.5
START_PHASE = 0.4


def _horner(coeffs, z):
    """P(z), P'(z) and sum |a_k| |z|^k for a vector of points."""
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    scale = np.zeros(z.shape, dtype=np.float64)
    az = np.abs(z)
    for c in coeffs[::-1]:
        dp = dp * z + p
        p = p * z + c
        scale = scale * az + abs(c)
    return p, dp, scale


def all_roots(P, tol: float = 1e-12, max_sweeps: int = MAX_SWEEPS):
    """All complex roots by Aberth-Ehrlich iteration.

    Converged when every approximation has relative residual
    |P(z)| / sum |a_k||z|^k <= tol. Start points sit on a circle of radius
    1.5 with a fixed phase offset, so results are deterministic.
    """
    if tol < 1e-12:
        raise ValueError("tol must be >= 1e-12")
    deg = P.deg
    if deg < 1:
        raise ValueError("need degree >= 1")
    coeffs = np.array([float(c) for c in P.coeffs])
    coeffs = coeffs / coeffs[-1]
    if deg == 1:
        return np.array([-coeffs[0] + 0j])
    k = np.arange(deg)
    z = START_RADIUS * np.exp(1j * (2 * np.pi * k / deg + START_PHASE / deg + 0.1 * np.sin(k)))
    eye = np.eye(deg, dtype=bool)
    for _ in range(max_sweeps):
        p, dp, scale = _horner(coeffs, z)
        resid = np.abs(p) / scale
        if np.all(resid <= tol):
            return z
        diff = z[:, None] - z[None, :]
        diff[eye] = 1.0
        inv = 1.0 / diff
        inv[eye] = 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            w = p / dp
            step = w / (1.0 - w * inv.sum(axis=1))
        # freeze converged points; guard against 0/0 at exact hits
        step = np.where((resid <= tol) | ~np.isfinite(step), 0.0, step)
        z = z - step
    raise NumericError(f"root refinement did not reach tol={tol} in {max_sweeps} sweeps")


def root_moduli(P, tol: float = 1e-12):
    """Moduli of all roots, sorted descending."""
    return np.sort(np.abs(all_roots(P, tol)))[::-1]


def _primitive(P):
    g = 0
    for c in P.coeffs:
        g = math.gcd(g, c)
    q = [c // g for c in P.coeffs]
    return IntPolynomial(q if q[-1] > 0 else [-c for c in q])


def _gcd_z(a, b):
    """Primitive gcd in Z[X] by the primitive remainder sequence."""
    a, b = _primitive(a), _primitive(b)
    while not b.is_zero() and b.deg > 0:
        k = a.deg - b.deg + 1
        _, r = (a * b.lead**k).divmod_exact(b)
        a, b = b, (r if r.is_zero() else _primitive(r))
    return a if b.is_zero() else IntPolynomial([1])


def _squarefree_mod_small_prime(P):
    for p in (3, 5, 7, 11, 13, 17, 19, 23):
        if P.lead % p == 0:
            continue
        f = np.array([c % p for c in P.coeffs], dtype=np.int64)
        df = (np.arange(1, len(f), dtype=np.int64) * f[1:]) % p
        if len(gcd_kernel(f, df, p)) == 1:
            return True
    return False


def radical_tower(P):
    """Polynomials v_1, v_2, ... with v_i the product of the distinct
    irreducible factors of multiplicity >= i; their roots, taken once each,
    are the roots of P with multiplicity."""
    if P.deg < 1 or _squarefree_mod_small_prime(P):
        return [P]
    tower = []
    u = _primitive(P)
    while u.deg > 0:
        nxt = _gcd_z(u, u.derivative())
        tower.append(u.divmod_exact(nxt)[0])
        u = nxt
    return tower


def mahler_measure(P, tol: float = 1e-12) -> float:
    """|lead| * prod max(1, |z_i|).

    Repeated roots are split off exactly first, since iterative refinement
    only locates a root of multiplicity k to about tol^(1/k).
    """
    if P.deg == 0:
        return float(abs(P.lead))
    out = float(abs(P.lead))
    for v in radical_tower(P):
        if v.deg > 0:
            out *= float(np.prod(np.maximum(1.0, root_moduli(v, tol))))
    return out


def dobrowolski_floor(d: int, c: float) -> float:
    """1 + c (log log d / log d)^3; a reporting diagnostic only."""
    if d < 3:
        raise ValueError("Dobrowolski floor needs d >= 3")
    return 1.0 + c * (math.log(math.log(d)) / math.log(d)) ** 3

"""Integer polynomials, Taylor shifts and 2-adic Newton polygons."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import binom_mod_pow2
from .errors import CertificationUnavailable
from .kernels import shift_mod_kernel

__all__ = [
    "IntPolynomial",
    "ShiftedResidues",
    "DyadicProfile",
    "Segment",
    "NewtonPolygon",
    "build_polynomial",
    "taylor_shift",
    "shift_mod",
    "coefficient_direct",
    "dyadic_profile",
    "newton_polygon",
]


def _strip(coeffs):
    coeffs = [int(c) for c in coeffs]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs) if coeffs else (0,)


@dataclass(frozen=True)
class IntPolynomial:
    """Dense polynomial over Z, ``coeffs[i]`` is the coefficient of X^i."""

    coeffs: tuple

    def __init__(self, coeffs: Sequence[int]):
        object.__setattr__(self, "coeffs", _strip(coeffs))

    @property
    def deg(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self):
        return f"IntPolynomial({list(self.coeffs)})"

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{'*' + mono if mono else ''}"
            terms.append(("-" if c < 0 else "+", body))
        if not terms:
            return "0"
        sign, body = terms[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def __neg__(self):
        return IntPolynomial([-c for c in self.coeffs])

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return IntPolynomial([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial([other * c for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return IntPolynomial(out)

    __rmul__ = __mul__

    def divmod_exact(self, divisor: "IntPolynomial"):
        """Quotient and remainder over Z, or None if some step is not integral.

        Integral whenever the divisor's leading coefficient is +-1. Otherwise
        returns None as soon as a quotient coefficient leaves Z, which already
        rules out exact divisibility in Z[X] (Gauss).
        """
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        r = list(self.coeffs)
        d = divisor.coeffs
        dd = len(d) - 1
        lead = d[-1]
        if len(r) - 1 < dd:
            return IntPolynomial([0]), IntPolynomial(r)
        q = [0] * (len(r) - dd)
        for i in range(len(r) - 1, dd - 1, -1):
            c = r[i]
            if c == 0:
                continue
            t, rest = divmod(c, lead)
            if rest:
                return None
            q[i - dd] = t
            off = i - dd
            for j in range(dd + 1):
                r[off + j] -= t * d[j]
        return IntPolynomial(q), IntPolynomial(r[:dd] if dd else [0])

    def divides(self, other: "IntPolynomial") -> bool:
        """True iff ``self`` divides ``other`` exactly in Z[X]."""
        res = other.divmod_exact(self)
        return res is not None and res[1].is_zero()

    def derivative(self):
        if self.deg == 0:
            return IntPolynomial([0])
        return IntPolynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def to_json(self) -> str:
        return json.dumps([str(c) for c in self.coeffs])

    @classmethod
    def from_json(cls, text: str) -> "IntPolynomial":
        data = json.loads(text)
        if not isinstance(data, list) or not data:
            raise ValueError("expected a nonempty JSON array of decimal strings")
        return cls([int(c) for c in data])

    @classmethod
    def from_text(cls, text: str) -> "IntPolynomial":
        """Whitespace-separated decimal integers, constant term first."""
        parts = text.split()
        if not parts:
            raise ValueError("empty coefficient list")
        return cls([int(p) for p in parts])

    @classmethod
    def monomial(cls, k: int, c: int = 1):
        return cls([0] * k + [c])


def build_polynomial(f, N: int) -> IntPolynomial:
    """P_{f,N}(X) = sum_{n<=N} f(n) X^(n-1)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if f.N < N:
        raise ValueError(f"sign function only defined up to {f.N} < N={N}")
    return IntPolynomial(f.values[1 : N + 1].tolist())


def taylor_shift(P: IntPolynomial, by: int = 1) -> IntPolynomial:
    """Exact coefficients of P(X + by), O(deg^2) big-integer additions."""
    c = list(P.coeffs)
    deg = len(c) - 1
    for i in range(deg):
        for j in range(deg - 1, i - 1, -1):
            c[j] += by * c[j + 1]
    return IntPolynomial(c)


@dataclass(frozen=True, eq=False)
class ShiftedResidues:
    """Coefficients of P(X+1) reduced into [0, 2^m)."""

    m: int
    residues: np.ndarray

    def __eq__(self, other):
        return isinstance(other, ShiftedResidues) and self.m == other.m and np.array_equal(self.residues, other.residues)

    def tolist(self):
        return [int(r) for r in self.residues]


def _check_m(m):
    if not 1 <= m <= 16:
        raise ValueError(f"residue exponent m={m} outside [1, 16]")


def shift_mod(P: IntPolynomial, m: int = 8) -> ShiftedResidues:
    """P(X+1) mod 2^m using machine words."""
    _check_m(m)
    mask = (1 << m) - 1
    c = np.array([x & mask for x in P.coeffs], dtype=np.uint64)
    out = shift_mod_kernel(c, mask)
    out.setflags(write=False)
    return ShiftedResidues(m, out)


def coefficient_direct(f, N: int, l: int, m: int) -> int:
    """sum_{n=l+1}^{N} f(n) C(n-1, l) mod 2^m, by per-term binomial residues."""
    _check_m(m)
    if not 0 <= l <= N - 1:
        raise ValueError(f"index l={l} outside [0, {N - 1}]")
    mod = 1 << m
    total = 0
    for n in range(l + 1, N + 1):
        total += f.evaluate(n) * binom_mod_pow2(n - 1, l, m).residue
    return total % mod


@dataclass(frozen=True, eq=False)
class DyadicProfile:
    """Per-coefficient 2-adic valuations: ``heights[i]`` is exact where
    ``exact[i]`` holds, otherwise it is the lower bound ``m``."""

    m: int
    heights: np.ndarray
    exact: np.ndarray

    def __len__(self):
        return len(self.heights)

    def entries(self):
        """(``"exact"`` | ``"atleast"``, value) per index."""
        return [("exact" if e else "atleast", int(h)) for h, e in zip(self.heights, self.exact)]


def dyadic_profile(r: ShiftedResidues) -> DyadicProfile:
    res = np.asarray(r.residues, dtype=np.uint64)
    m = r.m
    exact = res != 0
    heights = np.full(len(res), m, dtype=np.int64)
    nz = res[exact].astype(np.int64)
    # 2-adic valuation of nonzero words: index of the lowest set bit
    heights[exact] = np.log2(nz & -nz).astype(np.int64)
    exact.setflags(write=False)
    heights.setflags(write=False)
    return DyadicProfile(m, heights, exact)


@dataclass(frozen=True)
class Segment:
    slope: Fraction
    length: int
    height: int

    def to_dict(self):
        return {
            "slope": f"{self.slope.numerator}/{self.slope.denominator}",
            "length": self.length,
            "height": self.height,
        }


@dataclass(frozen=True)
class NewtonPolygon:
    vertices: tuple
    exact: tuple
    segments: tuple
    degree: int

    def to_dict(self):
        return {
            "degree": self.degree,
            "vertices": [[i, h] for i, h in self.vertices],
            "exact": list(self.exact),
            "segments": [s.to_dict() for s in self.segments],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def height_at(self, x) -> Fraction:
        """Height of the polygon above abscissa ``x``."""
        vs = self.vertices
        if not vs[0][0] <= x <= vs[-1][0]:
            raise ValueError("abscissa outside the polygon")
        for (x0, y0), (x1, y1) in zip(vs, vs[1:]):
            if x0 <= x <= x1:
                return Fraction(y0) + Fraction(y1 - y0, x1 - x0) * (x - x0)
        return Fraction(vs[-1][1])


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def newton_polygon(profile: DyadicProfile) -> NewtonPolygon:
    """Lower convex hull of the points (i, height_i) by monotone chain."""
    n = len(profile)
    if n < 2:
        raise CertificationUnavailable("degenerate degree 0")
    if not profile.exact[-1]:
        raise CertificationUnavailable("leading coefficient valuation unknown")
    hull = []
    flags = []
    for i in range(n):
        pt = (i, int(profile.heights[i]))
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
            flags.pop()
        hull.append(pt)
        flags.append(bool(profile.exact[i]))
    segments = []
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        segments.append(Segment(Fraction(y1 - y0, x1 - x0), x1 - x0, abs(y1 - y0)))
    return NewtonPolygon(tuple(hull), tuple(flags), tuple(segments), n - 1)

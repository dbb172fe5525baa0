"""Irreducibility certificates for integer polynomials.

The pipeline combines a 2-adic Newton polygon bound (a terminal edge of
height 1 and length L forces an irreducible factor of degree L over Q_2,
hence a rational factor of degree >= L) with a deterministic exclusion of
every smaller complementary degree: rational roots, cyclotomic divisors and
factor-degree patterns modulo small primes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import CertificationUnavailable
from ..polycore import IntPolynomial, dyadic_profile, newton_polygon, shift_mod
from .cyclotomic import cyclotomic_check, cyclotomic_polynomial, euler_phi, phi_inverse, rational_root_check
from .modp import FactorDegreeConstraint, excluded_degrees, modp_degree_multiset, select_modp_primes
from .oracle import OracleFactorization, oracle_factor_small
from .roots import all_roots, dobrowolski_floor, mahler_measure, root_moduli

__all__ = [
    "CertifyConfig",
    "Certificate",
    "PolygonEdge",
    "large_factor_bound",
    "certify",
    "verify_certificate",
    "rational_root_check",
    "cyclotomic_check",
    "cyclotomic_polynomial",
    "euler_phi",
    "phi_inverse",
    "modp_degree_multiset",
    "excluded_degrees",
    "select_modp_primes",
    "FactorDegreeConstraint",
    "oracle_factor_small",
    "OracleFactorization",
    "all_roots",
    "root_moduli",
    "mahler_measure",
    "dobrowolski_floor",
]

IRREDUCIBLE = "Irreducible"
REDUCIBLE = "Reducible"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class CertifyConfig:
    """Knobs for :func:`certify`.

    ``modp_primes=None`` picks the first ``modp_count`` odd primes whose
    reduction is squarefree (scanning ``modp_pool`` candidates).
    """

    small_factor_bound: int = 64
    polygon_search_bound: int = 64
    modp_primes: tuple | None = None
    modp_count: int = 5
    modp_pool: int = 40
    residue_exponent: int = 8

    def __post_init__(self):
        if self.small_factor_bound < 2:
            raise ValueError("small_factor_bound must be >= 2")
        if self.polygon_search_bound < 1:
            raise ValueError("polygon_search_bound must be >= 1")
        if self.modp_primes is not None:
            if not self.modp_primes:
                raise ValueError("modp_primes must be nonempty")
            if any(p < 3 or p % 2 == 0 for p in self.modp_primes):
                raise ValueError("modp_primes must be odd primes")
        if self.modp_count < 1:
            raise ValueError("modp_count must be >= 1")
        if not 1 <= self.residue_exponent <= 16:
            raise ValueError("residue_exponent must lie in [1, 16]")

    def to_dict(self):
        return {
            "small_factor_bound": self.small_factor_bound,
            "polygon_search_bound": self.polygon_search_bound,
            "modp_primes": list(self.modp_primes) if self.modp_primes is not None else None,
            "modp_count": self.modp_count,
            "modp_pool": self.modp_pool,
            "residue_exponent": self.residue_exponent,
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if d.get("modp_primes") is not None:
            d["modp_primes"] = tuple(d["modp_primes"])
        return cls(**d)


@dataclass(frozen=True)
class PolygonEdge:
    j: int
    length: int

    def to_dict(self):
        return {"j": self.j, "length": self.length}


@dataclass(frozen=True)
class Certificate:
    verdict: str
    degree: int
    route: str | None = None
    edge: PolygonEdge | None = None
    target: int = 0
    exclusions: dict = field(default_factory=dict)
    constraints: tuple = ()
    witness: IntPolynomial | None = None
    cofactor: IntPolynomial | None = None
    first_unexcluded: int | None = None
    reason: str | None = None
    transcript: tuple = ()

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "degree": self.degree,
            "route": self.route,
            "edge": self.edge.to_dict() if self.edge else None,
            "target": self.target,
            "exclusions": {str(d): v for d, v in sorted(self.exclusions.items())},
            "constraints": [c.to_dict() for c in self.constraints],
            "witness": [str(c) for c in self.witness.coeffs] if self.witness else None,
            "cofactor": [str(c) for c in self.cofactor.coeffs] if self.cofactor else None,
            "first_unexcluded": self.first_unexcluded,
            "reason": self.reason,
            "transcript": list(self.transcript),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def large_factor_bound(polygon, search_bound: int | None = None):
    """Terminal polygon edge (j, 1) -> (deg, 0) with exact endpoints, or None.

    Such an edge has slope -1/L with L = deg - j, so the matching Q_2 factor
    is totally ramified of degree L and therefore irreducible.
    """
    (xr, yr), exact_r = polygon.vertices[-1], polygon.exact[-1]
    if not exact_r:
        raise CertificationUnavailable("leading coefficient valuation unknown")
    if yr != 0 or not polygon.segments:
        return None
    (xl, yl), exact_l = polygon.vertices[-2], polygon.exact[-2]
    if yl != 1 or not exact_l:
        return None
    if search_bound is not None and xl > search_bound:
        return None
    return PolygonEdge(xl, xr - xl)


def _witness(P, g, verdict_reason, transcript, edge=None):
    q, r = P.divmod_exact(g)
    assert r.is_zero(), "witness must divide exactly"
    return Certificate(
        REDUCIBLE,
        P.deg,
        route="witness",
        edge=edge,
        witness=g,
        cofactor=q,
        reason=verdict_reason,
        transcript=tuple(transcript) + (f"{g} divides P exactly with cofactor of degree {q.deg}",),
    )


def certify(P: IntPolynomial, cfg: CertifyConfig | None = None) -> Certificate:
    """Decide irreducibility of P over Q, or return Unknown with a reason."""
    cfg = cfg or CertifyConfig()
    deg = P.deg
    if P.is_zero() or deg == 0:
        return Certificate(UNKNOWN, max(deg, 0), reason="degenerate degree 0")
    if deg == 1:
        return Certificate(IRREDUCIBLE, 1, route="linear", transcript=("linear polynomials are irreducible",))
    transcript = []
    edge = None
    try:
        polygon = newton_polygon(dyadic_profile(shift_mod(P, cfg.residue_exponent)))
        edge = large_factor_bound(polygon, cfg.polygon_search_bound)
    except CertificationUnavailable as exc:
        transcript.append(f"2-adic polygon unavailable: {exc}")
    if edge is not None and deg - edge.length <= cfg.small_factor_bound:
        route = "polygon"
        target = min(deg - edge.length, deg // 2)
        transcript.append(
            f"P(X+1) has terminal Newton edge ({edge.j},1)->({deg},0) of slope -1/{edge.length}: "
            f"an irreducible Q_2 factor of degree {edge.length}"
        )
        transcript.append(f"so any proper rational factorization has a factor of degree <= {deg - edge.length}")
    else:
        route = "exclusion"
        target = deg // 2
        if edge is not None:
            transcript.append(f"polygon edge of length {edge.length} leaves {deg - edge.length} > B; exclusion only")
        transcript.append(f"any proper rational factorization has a factor of degree <= {target}")

    constraints, rejected = [], []
    if target > 0:
        constraints, rejected = select_modp_primes(
            P,
            count=cfg.modp_count,
            pool=cfg.modp_pool,
            max_degree=target,
            primes=list(cfg.modp_primes) if cfg.modp_primes is not None else None,
        )
    exclusions = {}
    first_unexcluded = None
    for d in range(1, target + 1):
        reasons = []
        if d == 1:
            ok, g = rational_root_check(P)
            if not ok:
                return _witness(P, g, "rational root", transcript, edge)
            reasons.append("rational")
        reasons.extend(f"modp:{c.p}" for c in constraints if c.excludes(d))
        checked = []
        if not reasons:
            for n in phi_inverse(d):
                divisible, phi = cyclotomic_check(P, n)
                if divisible:
                    return _witness(P, phi, f"cyclotomic:{n}", transcript, edge)
                checked.append(f"cyclotomic:{n}")
        entry = {"excluded": bool(reasons), "reasons": reasons}
        if checked:
            entry["checked"] = checked
        exclusions[d] = entry
        if not reasons and first_unexcluded is None:
            first_unexcluded = d
    base = dict(degree=deg, route=route, edge=edge, target=target, exclusions=exclusions, constraints=tuple(constraints))
    if first_unexcluded is None:
        transcript.append(f"every degree in [1, {target}] excluded")
        return Certificate(IRREDUCIBLE, transcript=tuple(transcript), **base)
    if not constraints:
        reason = f"no squarefree reduction among {len(rejected)} primes tried"
    else:
        reason = f"degree {first_unexcluded} not excluded"
    return Certificate(UNKNOWN, first_unexcluded=first_unexcluded, reason=reason, transcript=tuple(transcript), **base)


def _edge_holds(P, edge):
    # chord (j,1)->(deg,0) must support every point (i, v_2(coefficient i) of P(X+1))
    deg, j, L = P.deg, edge.j, edge.length
    if j + L != deg:
        return False
    res = shift_mod(P, 16).residues
    heights = [16 if r == 0 else ((int(r) & -int(r)).bit_length() - 1) for r in res]
    if heights[deg] != 0 or heights[j] != 1 or res[j] == 0:
        return False
    # h_i >= 1 - (i - j)/L  <=>  L*h_i >= L - i + j
    return all(L * heights[i] >= L - i + j for i in range(deg + 1))


def verify_certificate(P: IntPolynomial, cert: Certificate) -> bool:
    """Re-check a certificate's evidence without reusing the polygon code path."""
    if cert.verdict == REDUCIBLE:
        g = cert.witness
        return g is not None and 1 <= g.deg < P.deg and g.divides(P)
    if cert.verdict != IRREDUCIBLE:
        return True
    if cert.route == "linear":
        return P.deg == 1
    need = P.deg // 2
    if cert.route == "polygon":
        if cert.edge is None or not _edge_holds(P, cert.edge):
            return False
        need = min(need, P.deg - cert.edge.length)
    if cert.target < need:
        return False
    fresh = [modp_degree_multiset(P, c.p) for c in cert.constraints]
    for d in range(1, need + 1):
        if d == 1 and rational_root_check(P)[0]:
            continue
        if not any(c.excludes(d) for c in fresh):
            return False
    return True

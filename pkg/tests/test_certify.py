import json
import math
import random

import numpy as np
import pytest

from conftest import pm1_polys, sympy_factor_degrees
from rmpoly.certify import (
    Certificate,
    CertifyConfig,
    certify,
    cyclotomic_check,
    cyclotomic_polynomial,
    dobrowolski_floor,
    euler_phi,
    excluded_degrees,
    large_factor_bound,
    mahler_measure,
    modp_degree_multiset,
    oracle_factor_small,
    phi_inverse,
    rational_root_check,
    root_moduli,
    verify_certificate,
)
from rmpoly.certify.modp import FactorDegreeConstraint
from rmpoly.errors import CertificationUnavailable, NumericError
from rmpoly.experiments import exhaustive_function
from rmpoly.multfunc import primes_upto, sample_mult_function
from rmpoly.polycore import DyadicProfile, IntPolynomial, build_polynomial, dyadic_profile, newton_polygon, shift_mod

X = IntPolynomial([0, 1])
ONES4 = IntPolynomial([1, 1, 1, 1])
CUBIC = IntPolynomial([1, 1, -1, 1])
LEHMER = IntPolynomial([1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1])


def polygon_of(P, m=8):
    return newton_polygon(dyadic_profile(shift_mod(P, m)))


def profile(heights):
    return DyadicProfile(16, np.array(heights, dtype=np.int64), np.ones(len(heights), dtype=bool))


# -- polygon bound ---------------------------------------------------------

def test_large_factor_bound_examples():
    edge = large_factor_bound(polygon_of(ONES4))
    assert (edge.j, edge.length) == (1, 2)
    edge = large_factor_bound(newton_polygon(profile([1, 0])))
    assert (edge.j, edge.length) == (0, 1)
    assert large_factor_bound(newton_polygon(profile([0, 0, 0]))) is None
    assert large_factor_bound(polygon_of(ONES4), search_bound=0) is None


def test_polygon_factor_degree_consistency_with_oracle():
    hits = 0
    for N in (8, 16, 32):
        for t in range(60):
            P = build_polynomial(sample_mult_function(21, t, N), N)
            edge = large_factor_bound(polygon_of(P, 16))
            if edge is None:
                continue
            hits += 1
            assert max(oracle_factor_small(P).degrees) >= edge.length
    assert hits > 50


# -- rational roots and cyclotomic factors ---------------------------------

def test_rational_root_examples():
    ok, w = rational_root_check(ONES4)
    assert not ok and w == IntPolynomial([1, 1])
    assert rational_root_check(CUBIC) == (True, None)
    assert rational_root_check(IntPolynomial([1])) == (True, None)
    ok, w = rational_root_check(IntPolynomial([-1, 0, 4]))
    assert not ok and w.deg == 1 and w.divides(IntPolynomial([-1, 0, 4]))


def test_cyclotomic_examples():
    ok, phi = cyclotomic_check(IntPolynomial([1, 1, 1]), 3)
    assert ok and phi == IntPolynomial([1, 1, 1])
    assert cyclotomic_check(CUBIC, 4) == (False, None)
    _, r = CUBIC.divmod_exact(cyclotomic_polynomial(4))
    assert r == IntPolynomial([2])
    assert cyclotomic_check(CUBIC, 1) == (False, None)


def test_cyclotomic_polynomials_match_definition():
    for n in range(1, 80):
        phi = cyclotomic_polynomial(n)
        assert phi.deg == euler_phi(n)
        roots = np.roots(phi.coeffs[::-1]) if phi.deg else []
        assert np.allclose(np.abs(roots), 1, atol=1e-6)
    # X^n - 1 is the product of Phi_d over d | n
    for n in (12, 30, 36):
        prod = IntPolynomial([1])
        for d in range(1, n + 1):
            if n % d == 0:
                prod = prod * cyclotomic_polynomial(d)
        assert prod == IntPolynomial([-1] + [0] * (n - 1) + [1])


def test_phi_inverse_complete():
    table = {}
    for n in range(1, 3000):
        table.setdefault(euler_phi(n), []).append(n)
    for d in range(1, 30):
        assert list(phi_inverse(d)) == table.get(d, [])


def test_cyclotomic_check_on_products():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 40)
        Q = IntPolynomial([rng.choice((-1, 1)) for _ in range(rng.randint(1, 8))])
        P = cyclotomic_polynomial(n) * Q
        ok, phi = cyclotomic_check(P, n)
        assert ok and phi.divides(P)


# -- factor degrees mod p ---------------------------------------------------

def test_modp_examples():
    X2p1 = IntPolynomial([1, 0, 1])
    assert modp_degree_multiset(X2p1, 3).degrees == (2,)
    assert modp_degree_multiset(X2p1, 5).degrees == (1, 1)
    for p in (3, 5, 7, 11):
        c = modp_degree_multiset(IntPolynomial([-1, 0, 1]), p)
        assert c.squarefree and c.degrees == (1, 1)
    assert not modp_degree_multiset(IntPolynomial([1, 2, 1]), 3).squarefree


def test_modp_matches_sympy():
    import sympy
    x = sympy.symbols("x")
    rng = random.Random(5)
    for P in pm1_polys(rng, 30, 25):
        for p in (3, 5, 7, 13):
            c = modp_degree_multiset(P, p)
            poly = sympy.Poly(list(reversed(P.coeffs)), x, modulus=p)
            _, facs = poly.factor_list()
            sqf = all(e == 1 for _, e in facs)
            assert c.squarefree == sqf
            if sqf:
                assert sorted(c.degrees) == sorted(g.degree() for g, _ in facs)


def test_modp_truncation_is_consistent():
    rng = random.Random(9)
    for P in pm1_polys(rng, 60, 20):
        full = modp_degree_multiset(P, 7)
        if not full.squarefree:
            continue
        part = modp_degree_multiset(P, 7, max_degree=5)
        assert sorted(part.degrees) == sorted(d for d in full.degrees if d <= 5) or part.complete
        if not part.complete:
            assert part.tail == sum(d for d in full.degrees if d > 5)
        for d in range(1, 6):
            assert part.excludes(d) == full.excludes(d)


def test_excluded_degrees_examples():
    c = FactorDegreeConstraint(3, (2,), True)
    assert excluded_degrees([c], 2) == {1}
    c = FactorDegreeConstraint(5, (9,), True)
    assert excluded_degrees([c], 4) == {1, 2, 3, 4}
    c = FactorDegreeConstraint(5, (1, 1, 1, 1, 1), True)
    assert excluded_degrees([c], 5) == set()
    with pytest.raises(CertificationUnavailable):
        excluded_degrees([FactorDegreeConstraint(3, (), False)], 3)


@pytest.mark.parametrize("N", [12, 16, 20, 24])
def test_excluded_degrees_sound_against_oracle(N):
    from rmpoly.certify import select_modp_primes
    for t in range(40):
        P = build_polynomial(sample_mult_function(8, t, N), N)
        good, _ = select_modp_primes(P)
        if not good:
            continue
        fac = oracle_factor_small(P)
        for d in excluded_degrees(good, P.deg):
            assert not fac.has_factor_of_degree(d)


# -- roots ------------------------------------------------------------------

def test_root_moduli_examples():
    assert np.allclose(root_moduli(IntPolynomial([-1, 0, 1])), [1, 1])
    assert np.allclose(root_moduli(IntPolynomial([-2, 1])), [2])
    with pytest.raises(ValueError):
        root_moduli(IntPolynomial([-2, 1]), tol=1e-15)


def test_cauchy_bound_on_samples():
    for N in (16, 64, 128):
        for t in range(10):
            P = build_polynomial(sample_mult_function(4, t, N), N)
            assert root_moduli(P)[0] < 2


def test_mahler_examples():
    assert mahler_measure(IntPolynomial([-2, 1])) == pytest.approx(2.0)
    for n in (1, 5, 12, 30):
        assert mahler_measure(cyclotomic_polynomial(n)) == pytest.approx(1.0, abs=1e-8)
    assert mahler_measure(LEHMER) == pytest.approx(1.17628, abs=1e-4)


def test_mahler_multiplicative():
    rng = random.Random(0)
    for _ in range(20):
        P, Q = pm1_polys(rng, rng.randint(3, 12), 2)
        assert mahler_measure(P * Q) == pytest.approx(mahler_measure(P) * mahler_measure(Q), rel=1e-6)


def test_radical_tower_on_repeated_roots():
    from rmpoly.certify.roots import radical_tower
    P = IntPolynomial([-1, 1]) * IntPolynomial([-1, 1]) * IntPolynomial([-1, 1]) * IntPolynomial([1, 0, 1])
    assert radical_tower(P) == [IntPolynomial([-1, 1, -1, 1]), IntPolynomial([-1, 1]), IntPolynomial([-1, 1])]
    assert radical_tower(LEHMER) == [LEHMER]


def test_dobrowolski():
    assert dobrowolski_floor(3, 1) == 1 + (math.log(math.log(3)) / math.log(3)) ** 3
    assert all(dobrowolski_floor(d, 0) == 1.0 for d in (3, 10, 1000))
    vals = [dobrowolski_floor(d, 1.0) for d in range(16, 2000)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        dobrowolski_floor(2, 1.0)


# -- oracle -----------------------------------------------------------------

def test_oracle_examples():
    assert oracle_factor_small(ONES4).degrees == [1, 2]
    fac = oracle_factor_small(IntPolynomial([1, -2, 1]))
    assert fac.degrees == [1, 1] and fac.factors[0] == IntPolynomial([-1, 1])
    assert oracle_factor_small(LEHMER).irreducible


def test_oracle_matches_sympy():
    rng = random.Random(17)
    for P in pm1_polys(rng, 20, 40) + pm1_polys(rng, 40, 10):
        assert oracle_factor_small(P).degrees == sympy_factor_degrees(P)


# -- certify ----------------------------------------------------------------

def test_certify_examples():
    c = certify(ONES4)
    assert c.verdict == "Reducible" and c.witness == IntPolynomial([1, 1])
    c = certify(CUBIC)
    assert c.verdict == "Irreducible" and verify_certificate(CUBIC, c)
    # no 2-adic edge here, so degree 1 is ruled out by the root check
    Q = IntPolynomial([-1, -1, 0, 1])
    c = certify(Q)
    assert c.verdict == "Irreducible" and c.route == "exclusion"
    assert c.exclusions[1]["reasons"][0] == "rational"
    c = certify(IntPolynomial([1]))
    assert c.verdict == "Unknown" and c.reason == "degenerate degree 0"
    assert certify(IntPolynomial([3, 1])).verdict == "Irreducible"


def test_certify_finds_cyclotomic_factor():
    P = cyclotomic_polynomial(7) * IntPolynomial([1, -1, 1, 1, 1, -1, -1, 1, 1])
    c = certify(P)
    assert c.verdict == "Reducible" and c.witness.divides(P)


def test_certificate_json():
    P = build_polynomial(sample_mult_function(1, 3, 64), 64)
    c = certify(P)
    d = json.loads(c.to_json())
    assert d["verdict"] == c.verdict and d["degree"] == 63
    if c.verdict == "Irreducible" and c.route == "polygon":
        assert d["edge"]["j"] + d["edge"]["length"] == 63
    for entry in d["exclusions"].values():
        for r in entry["reasons"]:
            assert r == "rational" or r.startswith("modp:")


def _check_against_oracle(P):
    c = certify(P)
    fac = oracle_factor_small(P)
    if c.verdict == "Irreducible":
        assert fac.irreducible, (P, fac.degrees)
    elif c.verdict == "Reducible":
        assert not fac.irreducible
        assert c.witness.divides(P)
    assert verify_certificate(P, c)
    return c.verdict


@pytest.mark.parametrize("N", [4, 8])
def test_certify_sound_exhaustive(N):
    for pattern in range(1 << len(primes_upto(N))):
        _check_against_oracle(build_polynomial(exhaustive_function(N, pattern), N))


@pytest.mark.parametrize("N", [16, 32])
def test_certify_sound_sampled(N):
    verdicts = [_check_against_oracle(build_polynomial(sample_mult_function(31, t, N), N)) for t in range(100)]
    assert verdicts.count("Unknown") <= 10


def test_verify_rejects_forged_certificates():
    P = build_polynomial(sample_mult_function(2, 2, 64), 64)
    c = certify(P)
    forged = Certificate("Reducible", P.deg, witness=IntPolynomial([1, 1, 1]))
    if not IntPolynomial([1, 1, 1]).divides(P):
        assert not verify_certificate(P, forged)
    fake_edge = Certificate("Irreducible", P.deg, route="polygon", edge=type(c.edge or object)(1, P.deg - 1) if c.edge else None, target=P.deg // 2)
    if c.edge is None or c.edge.j != 1:
        assert not verify_certificate(P, fake_edge)
    assert not verify_certificate(ONES4, Certificate("Irreducible", 3, route="exclusion", target=1))


def test_certify_config_roundtrip_and_validation():
    cfg = CertifyConfig(small_factor_bound=10, modp_primes=(3, 5))
    assert CertifyConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ValueError):
        CertifyConfig(small_factor_bound=-1)

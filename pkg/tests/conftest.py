import pytest
import sympy

from rmpoly.polycore import IntPolynomial

_X = sympy.symbols("x")

ACCEPTANCE_LINES = []


def sympy_factor_degrees(P: IntPolynomial):
    """Irreducible factor degrees (with multiplicity) according to sympy."""
    poly = sympy.Poly(list(reversed(P.coeffs)), _X)
    _, factors = poly.factor_list()
    out = []
    for g, e in factors:
        out.extend([g.degree()] * e)
    return sorted(out)


def pm1_polys(rng, n, count):
    """Random +-1 polynomials of degree n."""
    return [IntPolynomial([rng.choice((-1, 1)) for _ in range(n + 1)]) for _ in range(count)]


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

"""Irreducibility certificates for polynomials with random completely
multiplicative +-1 coefficients, and Monte Carlo experiments around them."""

__version__ = "0.1.0"

from ._accel import BACKEND  # noqa: E402
from .polycore import IntPolynomial, build_polynomial  # noqa: E402
from .multfunc import SignFunction, sample_mult_function, character_mult_function  # noqa: E402
from .certify import CertifyConfig, Certificate, certify  # noqa: E402

__all__ = [
    "__version__",
    "BACKEND",
    "IntPolynomial",
    "build_polynomial",
    "SignFunction",
    "sample_mult_function",
    "character_mult_function",
    "CertifyConfig",
    "Certificate",
    "certify",
]

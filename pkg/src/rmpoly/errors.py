"""Exception hierarchy shared by all modules."""


class RmpolyError(Exception):
    """Base class for errors raised by this package."""


class ResourceError(RmpolyError):
    """A request exceeds a configured memory or size bound."""


class CertificationUnavailable(RmpolyError):
    """The 2-adic or mod-p data needed for a certificate cannot be produced."""


class OracleUnavailable(RmpolyError):
    """The brute-force factorization oracle could not reach a trustworthy answer."""


class NumericError(RmpolyError):
    """Iterative root refinement failed to converge."""

"""Exception and warning types raised by :mod:`cvbell`."""


class CovarianceError(ValueError):
    """Base class for rejected covariance matrices."""


class NotSymmetric(CovarianceError):
    def __init__(self, asymmetry):
        self.asymmetry = float(asymmetry)
        super().__init__(f"covariance matrix is not symmetric (max |V - V^T| = {asymmetry:.3e})")


class Unphysical(CovarianceError):
    """V + i*Omega/2 has a negative eigenvalue, so no quantum state has this covariance."""

    def __init__(self, min_eigenvalue):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(
            f"covariance matrix violates the uncertainty principle: "
            f"min eigenvalue of V + i*Omega/2 is {min_eigenvalue:.6e}"
        )


class SingularCovariance(CovarianceError):
    def __init__(self, det):
        self.det = float(det)
        super().__init__(f"covariance matrix is singular (det V = {det:.3e})")


class NumericalDomain(ArithmeticError):
    """A square root argument went negative beyond round-off."""


class SamplerStarvation(RuntimeError):
    """Rejection sampler acceptance fell below 0.1%."""


class ChainAssertionError(AssertionError):
    """One inequality of the nonlocality-implies-entanglement chain failed.

    ``context`` holds the offending x value or standard form.
    """

    def __init__(self, message, context=None):
        self.context = context
        super().__init__(f"{message} [{context!r}]")


class NonConvergence(RuntimeWarning):
    """Local polish of the numeric Bell maximizer hit its iteration budget."""

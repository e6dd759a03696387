"""Two-mode covariance matrices, phase-space points and Wigner functions.

Conventions: hbar = 1, vacuum quadrature variance 1/2, quadrature ordering
(Q_I, P_I, Q_S, P_S) with I the idler mode and S the signal mode.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotSymmetric, SingularCovariance, Unphysical

SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-10
ORDERING = ("qI", "pI", "qS", "pS")

OMEGA2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
#: Two-mode symplectic form, one [[0, 1], [-1, 0]] block per mode.
OMEGA = np.block([[OMEGA2, np.zeros((2, 2))], [np.zeros((2, 2)), OMEGA2]])
OMEGA.flags.writeable = False
OMEGA2.flags.writeable = False


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """A validated 4x4 covariance matrix. Build it with :func:`validate_covariance`."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, CovarianceMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.entries))

    def tolist(self):
        return self.entries.tolist()


@dataclass(frozen=True)
class PhasePoint:
    """Phase-space displacement u = (Q_I, P_I, Q_S, P_S)."""

    qi: float
    pi: float
    qs: float
    ps: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.qi, self.pi, self.qs, self.ps)):
            raise ValueError(f"non-finite phase point {self}")

    @classmethod
    def origin(cls) -> PhasePoint:
        return cls(0.0, 0.0, 0.0, 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.qi, self.pi, self.qs, self.ps])

    def idler_only(self) -> PhasePoint:
        """u_I0: the signal coordinates zeroed."""
        return PhasePoint(self.qi, self.pi, 0.0, 0.0)

    def signal_only(self) -> PhasePoint:
        """u_0S: the idler coordinates zeroed."""
        return PhasePoint(0.0, 0.0, self.qs, self.ps)


def min_uncertainty_eigenvalues(mats: np.ndarray) -> np.ndarray:
    """Smallest eigenvalue of V + i*Omega/2 for a stack of (..., 4, 4) matrices."""
    h = np.asarray(mats, dtype=float) + 0.5j * OMEGA
    return np.linalg.eigvalsh(h)[..., 0]


def physical_mask(mats: np.ndarray) -> np.ndarray:
    """Vectorized form of the acceptance test in :func:`validate_covariance`.

    Expects already-symmetric matrices.
    """
    mats = np.asarray(mats, dtype=float)
    return (min_uncertainty_eigenvalues(mats) >= -PHYSICAL_TOL) & (np.linalg.det(mats) > 0)


def validate_covariance(raw) -> CovarianceMatrix:
    """Check that ``raw`` is the covariance matrix of a two-mode Gaussian state.

    Asymmetry up to ``SYMMETRY_TOL`` is absorbed by symmetrizing. Raises
    :class:`NotSymmetric`, :class:`Unphysical` or :class:`SingularCovariance`.
    """
    if isinstance(raw, CovarianceMatrix):
        return raw
    v = np.array(raw, dtype=float)
    if v.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("covariance matrix has non-finite entries")
    asym = np.max(np.abs(v - v.T))
    if asym > SYMMETRY_TOL:
        raise NotSymmetric(asym)
    v = 0.5 * (v + v.T)
    lam = min_uncertainty_eigenvalues(v)
    if lam < -PHYSICAL_TOL:
        raise Unphysical(lam)
    det = np.linalg.det(v)
    if det <= 0:
        raise SingularCovariance(det)
    return CovarianceMatrix(v)


def purity(cov: CovarianceMatrix) -> float:
    """Tr(rho^2) = 1 / (4 sqrt(det V))."""
    return 1.0 / (4.0 * math.sqrt(cov.det))


def _inverse(cov: CovarianceMatrix):
    det = cov.det
    if det < 1e-300:
        raise SingularCovariance(det)
    return np.linalg.inv(cov.entries), det


def wigner(cov: CovarianceMatrix, u):
    """Gaussian Wigner function of a zero-mean state.

    ``u`` may be a :class:`PhasePoint`, a length-4 vector, or an (N, 4) array of
    points, in which case an array of N values is returned.
    """
    vinv, det = _inverse(cov)
    pts = u.as_array() if isinstance(u, PhasePoint) else np.asarray(u, dtype=float)
    quad = np.einsum("...i,ij,...j->...", pts, vinv, pts)
    w = np.exp(-0.5 * quad) / (4.0 * math.pi**2 * math.sqrt(det))
    return float(w) if np.ndim(w) == 0 else w


def blocks(cov: CovarianceMatrix):
    """Return (V_I, V_S, V_IS): idler block, signal block and cross block."""
    v = cov.entries
    return v[:2, :2].copy(), v[2:, 2:].copy(), v[:2, 2:].copy()


def assemble(v_i, v_s, v_is) -> np.ndarray:
    """Inverse of :func:`blocks`."""
    v_is = np.asarray(v_is, dtype=float)
    return np.block([[np.asarray(v_i, dtype=float), v_is], [v_is.T, np.asarray(v_s, dtype=float)]])


def _det2(a) -> float:
    return float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])


def local_invariants(cov: CovarianceMatrix) -> dict:
    """Determinants left unchanged by local symplectic operations."""
    v_i, v_s, v_is = blocks(cov)
    return {
        "detVI": _det2(v_i),
        "detVS": _det2(v_s),
        "detVIS": _det2(v_is),
        "detV": cov.det,
    }

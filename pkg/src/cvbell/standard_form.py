"""Reduction of two-mode covariance matrices to the local standard form.

Every physical two-mode covariance matrix can be brought, by a rotation and a
squeezer on each mode, to

    [[n, 0, c1, 0 ],
     [0, n, 0,  c2],
     [c1, 0, m, 0 ],
     [0, c2, 0, m ]]

:func:`reduce` does this constructively and returns the local transformation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .covariance import OMEGA2, CovarianceMatrix, validate_covariance

SYMPLECTIC_TOL = 1e-12

_R90 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def squeezer(z: float) -> np.ndarray:
    return np.diag([math.exp(z), math.exp(-z)])


def single_mode_symplectic(theta1: float, z: float, theta2: float) -> np.ndarray:
    """R(theta1) . diag(e^z, e^-z) . R(theta2)."""
    return rotation(theta1) @ squeezer(z) @ rotation(theta2)


@dataclass(frozen=True)
class StandardForm:
    n: float
    m: float
    c1: float
    c2: float

    def __post_init__(self):
        for name in ("n", "m", "c1", "c2"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise ValueError(f"{name} must be finite, got {val}")
            object.__setattr__(self, name, val)
        if self.n <= 0 or self.m <= 0:
            raise ValueError(f"n and m must be positive, got n={self.n}, m={self.m}")

    @property
    def c_tilde(self) -> float:
        return max(abs(self.c1), abs(self.c2))

    @property
    def c(self) -> float:
        return math.hypot(self.c1, self.c2)

    @property
    def phi(self) -> float:
        return math.atan2(self.c2, self.c1)

    @property
    def x(self) -> float:
        return self.c_tilde / math.sqrt(self.n * self.m)

    @property
    def x_prime(self) -> float:
        return min(abs(self.c1), abs(self.c2)) / math.sqrt(self.n * self.m)

    @property
    def det(self) -> float:
        """(nm - c1^2)(nm - c2^2), each factor computed without cancellation loss."""
        return kernels.det_standard(self.n, self.m, self.c1, self.c2)

    @property
    def is_canonical(self) -> bool:
        return self.c1 >= abs(self.c2)

    def matrix(self) -> np.ndarray:
        n, m, c1, c2 = self.n, self.m, self.c1, self.c2
        return np.array([
            [n, 0.0, c1, 0.0],
            [0.0, n, 0.0, c2],
            [c1, 0.0, m, 0.0],
            [0.0, c2, 0.0, m],
        ])

    def covariance(self) -> CovarianceMatrix:
        return validate_covariance(self.matrix())

    def as_tuple(self):
        return (self.n, self.m, self.c1, self.c2)


def _check_block(s: np.ndarray):
    s = np.asarray(s, dtype=float)
    if s.shape != (2, 2):
        raise ValueError(f"local symplectic block must be 2x2, got {s.shape}")
    err = np.max(np.abs(s @ OMEGA2 @ s.T - OMEGA2))
    if err > SYMPLECTIC_TOL * max(1.0, float(np.sum(s * s))):
        raise ValueError(f"block is not symplectic (|S W S^T - W| = {err:.3e})")
    s = s.copy()
    s.flags.writeable = False
    return s


@dataclass(frozen=True, eq=False)
class LocalSymplectic:
    """A local operation S_I (+) S_S, one 2x2 symplectic block per mode."""

    s_i: np.ndarray
    s_s: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "s_i", _check_block(self.s_i))
        object.__setattr__(self, "s_s", _check_block(self.s_s))

    @classmethod
    def identity(cls) -> LocalSymplectic:
        return cls(np.eye(2), np.eye(2))

    @property
    def matrix(self) -> np.ndarray:
        out = np.zeros((4, 4))
        out[:2, :2] = self.s_i
        out[2:, 2:] = self.s_s
        return out

    def then(self, other: LocalSymplectic) -> LocalSymplectic:
        """Apply ``self`` first, then ``other``."""
        return LocalSymplectic(other.s_i @ self.s_i, other.s_s @ self.s_s)

    def inverse(self) -> LocalSymplectic:
        return LocalSymplectic(np.linalg.inv(self.s_i), np.linalg.inv(self.s_s))


def apply_local_symplectic(cov: CovarianceMatrix, t: LocalSymplectic) -> CovarianceMatrix:
    s = t.matrix
    w = s @ cov.entries @ s.T
    # a congruence is symmetric; drop the round-off asymmetry before validation
    return validate_covariance(0.5 * (w + w.T))


def random_local_symplectic(seed, max_squeeze: float) -> LocalSymplectic:
    """Random R(theta1) diag(e^z, e^-z) R(theta2) on each mode, deterministic in ``seed``."""
    if max_squeeze < 0:
        raise ValueError("max_squeeze must be >= 0")
    rng = np.random.default_rng(seed)
    blocks = []
    for _ in range(2):
        th1, th2 = rng.uniform(0.0, 2.0 * math.pi, size=2)
        z = rng.uniform(-max_squeeze, max_squeeze)
        blocks.append(single_mode_symplectic(th1, z, th2))
    return LocalSymplectic(*blocks)


def _diagonalize_and_equalize(a: np.ndarray):
    """Rotation then squeeze taking symmetric 2x2 ``a`` to sqrt(det a) * I."""
    a00, a11 = a[0, 0], a[1, 1]
    b = 0.5 * (a[0, 1] + a[1, 0])
    # half-angle formula; atan2(0, 0) = 0 covers the degenerate block
    theta = 0.5 * math.atan2(2.0 * b, a00 - a11)
    mean = 0.5 * (a00 + a11)
    radius = math.hypot(0.5 * (a00 - a11), b)
    det = a00 * a11 - b * b
    if radius == 0.0:
        return rotation(-theta), math.sqrt(det)
    lam1 = mean + radius
    s = (det / lam1 / lam1) ** 0.25
    return np.diag([s, 1.0 / s]) @ rotation(-theta), math.sqrt(det)


def proper_svd2(c: np.ndarray):
    """Closed-form 2x2 SVD with proper rotations: c = R(phi) diag(d1, d2) R(theta).

    d1 >= |d2|; d2 carries the sign when det(c) < 0.
    """
    e = 0.5 * (c[0, 0] + c[1, 1])
    f = 0.5 * (c[0, 0] - c[1, 1])
    g = 0.5 * (c[1, 0] + c[0, 1])
    h = 0.5 * (c[1, 0] - c[0, 1])
    q, r = math.hypot(e, h), math.hypot(f, g)
    a1, a2 = math.atan2(g, f), math.atan2(h, e)
    return 0.5 * (a2 + a1), (q + r, q - r), 0.5 * (a2 - a1)


def _canonical_transform(c1: float, c2: float):
    """Local rotations taking diag(c1, c2) to diag(c1', c2') with c1' >= |c2'|."""
    t_i, t_s = np.eye(2), np.eye(2)
    if abs(c2) > abs(c1):
        # quarter turn on both modes swaps the Q and P correlations
        t_i, t_s = _R90.copy(), _R90.copy()
        c1, c2 = c2, c1
    if c1 < 0:
        # half turn on the signal mode flips both signs
        t_s = -t_s
        c1, c2 = -c1, -c2
    return LocalSymplectic(t_i, t_s), c1, c2


def canonicalize_signs(sf: StandardForm) -> StandardForm:
    _, c1, c2 = _canonical_transform(sf.c1, sf.c2)
    return StandardForm(sf.n, sf.m, c1, c2)


def reduce(cov: CovarianceMatrix):
    """Return ``(StandardForm, LocalSymplectic)`` with S V S^T in standard form."""
    cov = validate_covariance(cov)
    v = cov.entries
    k_i, n = _diagonalize_and_equalize(v[:2, :2])
    k_s, m = _diagonalize_and_equalize(v[2:, 2:])
    t = LocalSymplectic(k_i, k_s)

    cross = (t.matrix @ v @ t.matrix.T)[:2, 2:]
    if np.any(cross != 0.0):
        phi, _, theta = proper_svd2(cross)
        t = t.then(LocalSymplectic(rotation(phi).T, rotation(theta)))

    w = t.matrix @ v @ t.matrix.T
    canon, c1, c2 = _canonical_transform(w[0, 2], w[1, 3])
    t = t.then(canon)
    return StandardForm(n, m, c1, c2), t

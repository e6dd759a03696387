"""Bell-CHSH function in Wigner form and its maximum over phase space.

The Bell combination uses the four displacements u_00 (origin), u_I0, u_0S and
u_IS. :func:`bell_max_closed_form` evaluates the analytic maximum;
:func:`bell_max_numeric` finds it by direct search and serves as a check on it.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize

from ._backend import kernels
from .covariance import CovarianceMatrix, PhasePoint, wigner
from .errors import NonConvergence
from .standard_form import StandardForm

LOCAL_BOUND = 2.0
# round-off floor on the numeric maximum; the vacuum otherwise lands at 2 + 4e-16
NUMERIC_DECISION_TOL = 1e-12
#: Limit of the maximized Bell function for infinitely squeezed vacuum.
TMSV_CEILING = 1.0 + 3.0 / 2.0 ** (4.0 / 3.0)


@dataclass(frozen=True)
class BellReport:
    bmax: float
    a_star: float
    alpha_i_star: float
    x: float
    c_tilde: float
    nonlocal_: bool
    margin: float
    converged: bool = True

    def to_dict(self) -> dict:
        d = asdict(self)
        d["nonlocal"] = d.pop("nonlocal_")
        return d


@dataclass(frozen=True)
class BellEvaluationPoint:
    """Polar coordinates of the rescaled quadratures of each mode."""

    alpha_i: float
    alpha_s: float
    theta_i: float
    theta_s: float

    def __post_init__(self):
        for a in (self.alpha_i, self.alpha_s):
            if not (math.isfinite(a) and a >= 0):
                raise ValueError(f"radial coordinates must be finite and >= 0, got {a}")


@dataclass(frozen=True)
class OptimizerConfig:
    grid_points: int = 9
    alpha_max: float = 4.0
    restarts: int = 6
    repolish: int = 3
    xatol: float = 1e-10
    fatol: float = 1e-14
    max_iter: int = 4000


def bell_function(cov: CovarianceMatrix, u):
    """pi^2 [W(u_00) + W(u_I0) + W(u_0S) - W(u_IS)].

    ``u`` is a :class:`PhasePoint` or an (N, 4) array of points; u_I0 keeps the
    idler coordinates of u and u_0S the signal ones.
    """
    if isinstance(u, PhasePoint):
        return math.pi**2 * (
            wigner(cov, PhasePoint.origin())
            + wigner(cov, u.idler_only())
            + wigner(cov, u.signal_only())
            - wigner(cov, u)
        )
    pts = np.asarray(u, dtype=float)
    idler, signal = pts.copy(), pts.copy()
    idler[..., 2:] = 0.0
    signal[..., :2] = 0.0
    return math.pi**2 * (
        wigner(cov, np.zeros(4)) + wigner(cov, idler) + wigner(cov, signal) - wigner(cov, pts)
    )


def scaled_point_to_phase(sf: StandardForm, p: BellEvaluationPoint) -> PhasePoint:
    sq = math.sqrt(kernels.gap(sf.n, sf.m, sf.c1))
    sp = math.sqrt(kernels.gap(sf.n, sf.m, sf.c2))
    return PhasePoint(
        p.alpha_i * math.cos(p.theta_i) * sq,
        p.alpha_i * math.sin(p.theta_i) * sp,
        p.alpha_s * math.cos(p.theta_s) * sq,
        p.alpha_s * math.sin(p.theta_s) * sp,
    )


def phase_to_scaled_radii(sf: StandardForm, u: PhasePoint):
    """(alpha_I, alpha_S) of a phase point; inverse of the radial part of the scaling."""
    dq, dp = kernels.gap(sf.n, sf.m, sf.c1), kernels.gap(sf.n, sf.m, sf.c2)
    return math.sqrt(u.qi**2 / dq + u.pi**2 / dp), math.sqrt(u.qs**2 / dq + u.ps**2 / dp)


def bell_intermediate(sf: StandardForm, alpha_i: float, alpha_s: float) -> float:
    """Bell function already maximized over both phase angles."""
    a = sf.m * alpha_i**2
    b = sf.n * alpha_s**2
    cross = 2.0 * sf.c_tilde * alpha_i * alpha_s
    return (1.0 + math.exp(-0.5 * a) + math.exp(-0.5 * b) - math.exp(-0.5 * (a + b + cross))) / (
        4.0 * math.sqrt(sf.det)
    )


def ray_profile(sf: StandardForm, a: float):
    """M(A) = 1 + 2A^-m - A^-k on the ray alpha_S = sqrt(m/n) alpha_I, and its two derivatives.

    Here A = exp(alpha_I^2 / 2) and k = 2m + 2 c_tilde sqrt(m/n).
    """
    m = sf.m
    k = 2.0 * m + 2.0 * sf.c_tilde * math.sqrt(m / sf.n)
    value = 1.0 + 2.0 * a**-m - a**-k
    d1 = -2.0 * m * a ** (-m - 1.0) + k * a ** (-k - 1.0)
    d2 = 2.0 * m * (m + 1.0) * a ** (-m - 2.0) - k * (k + 1.0) * a ** (-k - 2.0)
    return value, d1, d2


def _report(bmax, a_star, sf, converged=True, tol=0.0) -> BellReport:
    return BellReport(
        bmax=bmax,
        a_star=a_star,
        alpha_i_star=math.sqrt(2.0 * math.log(max(a_star, 1.0))),
        x=sf.x,
        c_tilde=sf.c_tilde,
        nonlocal_=bmax - LOCAL_BOUND > tol,
        margin=bmax - LOCAL_BOUND,
        converged=converged,
    )


def bell_max_closed_form(sf: StandardForm) -> BellReport:
    bmax, a_star, _, _ = kernels.closed_form(sf.n, sf.m, sf.c1, sf.c2)
    return _report(bmax, a_star, sf)


def _seed_points(sf: StandardForm, cfg: OptimizerConfig) -> np.ndarray:
    alphas = np.linspace(0.0, cfg.alpha_max, cfg.grid_points)
    thetas = np.array([0.0, 0.5, 1.0, 1.5]) * math.pi
    ai, as_, ti, ts = np.meshgrid(alphas, alphas, thetas, thetas, indexing="ij")
    sq = math.sqrt(kernels.gap(sf.n, sf.m, sf.c1))
    sp = math.sqrt(kernels.gap(sf.n, sf.m, sf.c2))
    pts = np.stack([
        ai * np.cos(ti) * sq, ai * np.sin(ti) * sp,
        as_ * np.cos(ts) * sq, as_ * np.sin(ts) * sp,
    ], axis=-1)
    return pts.reshape(-1, 4)


def bell_max_numeric(sf: StandardForm, cfg: OptimizerConfig | None = None) -> BellReport:
    """Maximize the Bell function over raw phase space by multi-start Nelder-Mead.

    The coarse grid only seeds the search; the polish runs on (Q_I, P_I, Q_S, P_S)
    with the inverse covariance formed numerically, so nothing here relies on the
    closed-form solution.
    """
    cfg = cfg or OptimizerConfig()
    v = sf.matrix()
    vinv = np.ascontiguousarray(np.linalg.inv(v))
    pref = 1.0 / (4.0 * math.sqrt(np.linalg.det(v)))

    seeds = _seed_points(sf, cfg)
    values = kernels.bell_points(vinv, pref, seeds)
    order = np.argsort(-values, kind="stable")
    starts = []
    for idx in order:
        if not any(np.allclose(seeds[idx], s) for s in starts):
            starts.append(seeds[idx])
        if len(starts) == cfg.restarts:
            break

    def neg_bell(u):
        return -abs(kernels.bell_point(vinv, pref, u[0], u[1], u[2], u[3]))

    options = {"xatol": cfg.xatol, "fatol": cfg.fatol, "maxiter": cfg.max_iter,
               "maxfev": 2 * cfg.max_iter}
    best_val, best_u = values[order[0]], seeds[order[0]]
    converged = True
    for start in starts:
        res = minimize(neg_bell, start, method="Nelder-Mead", options=options)
        converged &= bool(res.success)
        if -res.fun > best_val:
            best_val, best_u = -res.fun, res.x
    # Nelder-Mead can stall on flat ground; restart from the best point with a
    # fresh simplex until that stops paying off
    for _ in range(cfg.repolish):
        res = minimize(neg_bell, best_u, method="Nelder-Mead", options=options)
        converged &= bool(res.success)
        if not -res.fun > best_val:
            break
        best_val, best_u = -res.fun, res.x
    if not converged:
        warnings.warn(f"Nelder-Mead polish hit the iteration budget for {sf}", NonConvergence,
                      stacklevel=2)

    alpha_i, _ = phase_to_scaled_radii(sf, PhasePoint(*map(float, best_u)))
    return _report(float(best_val), math.exp(0.5 * alpha_i**2), sf, converged,
                   tol=NUMERIC_DECISION_TOL)


def is_nonlocal(sf: StandardForm):
    """Return (bmax > 2, lhs, rhs) in the squared form lhs > rhs."""
    lhs, rhs = kernels.nonlocality_sides(sf.n, sf.m, sf.c1, sf.c2)
    return lhs > rhs, lhs, rhs

"""Separability tests for two-mode Gaussian states in standard form."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from ._backend import kernels
from .errors import NumericalDomain
from .standard_form import StandardForm

MIXEDNESS_SLACK = 1e-9


@dataclass(frozen=True)
class EntanglementReport:
    simon_lhs: float
    simon_rhs: float
    entangled: bool
    nu_tilde: float
    log_negativity: float
    purity: float

    def to_dict(self) -> dict:
        return asdict(self)


def simon_criterion(sf: StandardForm):
    """Return (lhs, rhs, entangled); the state is entangled iff lhs < rhs.

    lhs = 4 (nm - c1^2)(nm - c2^2),  rhs = n^2 + m^2 + 2|c1 c2| - 1/4.
    Equality (e.g. the vacuum) counts as separable.
    """
    lhs, rhs = kernels.simon_sides(sf.n, sf.m, sf.c1, sf.c2)
    return lhs, rhs, lhs < rhs


def ppt_symplectic_eigenvalue(sf: StandardForm) -> float:
    """Smallest symplectic eigenvalue of the partially transposed state (c2 -> -c2)."""
    nu = kernels.ppt_nu(sf.n, sf.m, sf.c1, sf.c2)
    if math.isnan(nu):
        raise NumericalDomain(f"partial-transpose discriminant is negative for {sf}")
    return nu


def log_negativity(sf: StandardForm) -> float:
    return max(0.0, -math.log(2.0 * ppt_symplectic_eigenvalue(sf)))


def mixedness_bounds(sf: StandardForm):
    """Check the purity bound 4 det V >= 1/4 and its corollary nm - |c1 c2| >= 1/4."""
    nm = sf.n * sf.m
    ineq3 = 4.0 * sf.det >= 0.25 - MIXEDNESS_SLACK
    product = nm - abs(sf.c1 * sf.c2) >= 0.25 - MIXEDNESS_SLACK
    return ineq3, product


def entanglement_report(sf: StandardForm) -> EntanglementReport:
    lhs, rhs, entangled = simon_criterion(sf)
    return EntanglementReport(
        simon_lhs=lhs,
        simon_rhs=rhs,
        entangled=entangled,
        nu_tilde=ppt_symplectic_eigenvalue(sf),
        log_negativity=log_negativity(sf),
        purity=1.0 / (4.0 * math.sqrt(sf.det)),
    )

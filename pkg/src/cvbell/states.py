"""State generators, the JSON state-file format, and the combined per-state analysis."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bell import BellReport, OptimizerConfig, bell_max_closed_form, bell_max_numeric
from .covariance import ORDERING, CovarianceMatrix, purity, validate_covariance
from .entanglement import EntanglementReport, entanglement_report
from .standard_form import StandardForm, reduce

ORDERING_TAG = ",".join(ORDERING)

SEPARABLE_LOCAL = "separable+local"
ENTANGLED_LOCAL = "entangled+local"
ENTANGLED_NONLOCAL = "entangled+nonlocal"
SEPARABLE_NONLOCAL = "separable+nonlocal"


def _purity_defect(ch: float, sh: float) -> Fraction:
    return abs(Fraction(ch) ** 2 - Fraction(sh) ** 2 - Fraction(1, 4))


def _pure_pair(r: float):
    """Floats (ch, sh) near (cosh 2r, sinh 2r)/2 with ch^2 - sh^2 as close to 1/4 as possible.

    Rounding cosh and sinh separately leaves ch^2 - sh^2 - 1/4 of order
    ch * ulp(ch), about 1e-8 at r = 5, so the generated state would be visibly
    mixed. Instead fix the difference ch - sh on the float grid and take the
    sum from the purity condition (ch - sh)(ch + sh) = 1/4.
    """
    ch, sh = 0.5 * math.cosh(2.0 * r), 0.5 * math.sinh(2.0 * r)
    if sh == 0.0:
        return ch, sh
    u = math.ulp(ch)
    d = round(0.5 * math.exp(-2.0 * r) / u) * u
    if d <= 0.0:
        return ch, sh
    sh2 = round(0.5 * (0.25 / d - d) / u) * u
    ch2 = sh2 + d
    if _purity_defect(ch2, sh2) < _purity_defect(ch, sh):
        return ch2, sh2
    return ch, sh


def tmsv_standard_form(r: float) -> StandardForm:
    """Two-mode squeezed vacuum: n = m = cosh(2r)/2, c1 = -c2 = sinh(2r)/2.

    The float pair is chosen so the state is pure to working precision. The
    price is that n - c sits on the float grid of n, so n and c may differ
    from the naively rounded values by about 1e-16 * e^(4r) relative
    (5e-8 at r = 5).
    """
    if r < 0:
        raise ValueError("squeezing r must be >= 0")
    ch, sh = _pure_pair(r)
    return StandardForm(ch, ch, sh, -sh)


def thermal_channel(v: np.ndarray, n_th: float = 0.0, eta: float = 1.0) -> np.ndarray:
    """eta V + (1 - eta)(n_th + 1/2) I on both modes; at eta = 1, n_th is added as noise."""
    if n_th < 0:
        raise ValueError("thermal occupation must be >= 0")
    if not 0.0 <= eta <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1]")
    v = np.asarray(v, dtype=float)
    if eta == 1.0:
        return v + n_th * np.eye(4)
    return eta * v + (1.0 - eta) * (n_th + 0.5) * np.eye(4)


def tmsv_covariance(r: float, n_th: float = 0.0, eta: float = 1.0) -> CovarianceMatrix:
    return validate_covariance(thermal_channel(tmsv_standard_form(r).matrix(), n_th, eta))


@dataclass
class StateFile:
    """Either a full matrix (with ordering) or a standard-form quadruple."""

    matrix: list | None = None
    standard_form: StandardForm | None = None
    ordering: str | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.matrix is None) == (self.standard_form is None):
            raise ValueError("a state file holds exactly one of 'matrix' or 'standard_form'")
        if self.matrix is not None:
            if self.ordering is None:
                raise ValueError("'ordering' is required with 'matrix'")
            if self.ordering.replace(" ", "") != ORDERING_TAG:
                raise ValueError(f"unsupported ordering {self.ordering!r}; expected {ORDERING_TAG!r}")

    @classmethod
    def from_covariance(cls, cov: CovarianceMatrix, **meta) -> StateFile:
        return cls(matrix=cov.tolist(), ordering=ORDERING_TAG, meta=dict(meta))

    def covariance(self) -> CovarianceMatrix:
        """Validate and return the covariance matrix; raises the covariance errors."""
        if self.matrix is not None:
            return validate_covariance(self.matrix)
        return validate_covariance(self.standard_form.matrix())

    def to_json(self) -> dict:
        if self.matrix is not None:
            d = {"ordering": self.ordering, "matrix": [list(map(float, row)) for row in self.matrix]}
        else:
            sf = self.standard_form
            d = {"standard_form": {"n": sf.n, "m": sf.m, "c1": sf.c1, "c2": sf.c2}}
        if self.meta:
            d["meta"] = self.meta
        return d

    @classmethod
    def from_json(cls, d: dict) -> StateFile:
        if not isinstance(d, dict):
            raise ValueError("state file must be a JSON object")
        sf = d.get("standard_form")
        if sf is not None:
            sf = StandardForm(sf["n"], sf["m"], sf["c1"], sf["c2"])
        return cls(matrix=d.get("matrix"), standard_form=sf, ordering=d.get("ordering"),
                   meta=d.get("meta") or {})

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def read(cls, path) -> StateFile:
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass
class Analysis:
    purity: float
    standard_form: StandardForm
    bell: BellReport
    entanglement: EntanglementReport
    oracle: BellReport | None = None

    @property
    def verdict(self) -> str:
        ent, nl = self.entanglement.entangled, self.bell.nonlocal_
        if nl:
            return ENTANGLED_NONLOCAL if ent else SEPARABLE_NONLOCAL
        return ENTANGLED_LOCAL if ent else SEPARABLE_LOCAL

    def to_dict(self) -> dict:
        sf = self.standard_form
        return {
            "purity": self.purity,
            "standard_form": {"n": sf.n, "m": sf.m, "c1": sf.c1, "c2": sf.c2,
                              "c_tilde": sf.c_tilde, "x": sf.x, "x_prime": sf.x_prime,
                              "det": sf.det},
            "bell": self.bell.to_dict(),
            "bell_oracle": self.oracle.to_dict() if self.oracle else None,
            "entanglement": self.entanglement.to_dict(),
            "verdict": self.verdict,
        }


def analyze(cov: CovarianceMatrix, oracle: bool = False,
            cfg: OptimizerConfig | None = None) -> Analysis:
    sf, _ = reduce(cov)
    return Analysis(
        purity=purity(cov),
        standard_form=sf,
        bell=bell_max_closed_form(sf),
        entanglement=entanglement_report(sf),
        oracle=bell_max_numeric(sf, cfg) if oracle else None,
    )

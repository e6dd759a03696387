"""Randomized and grid verification that Bell nonlocality implies entanglement.

The argument runs through a chain of scalar inequalities in
x = c_tilde / sqrt(nm) and x' = min(|c1|, |c2|) / sqrt(nm):

* the squared Bell bracket over 16 is at most (1 + x^2) / 4,
* nm (2 + 2 x x' - 1/(4nm)) >= (1 + x^2) / 4 suffices for entanglement,
* purity gives x'^2 <= 1 - 1/(16 (nm)^2 (1 - x^2)) and 1/(4nm) <= sqrt(1 - x^2),
* 2 - (2 + x^2) sqrt(1 - x^2) >= 0 closes the chain.

Each state-level check here evaluates these numerically; the scan samples
physical standard forms and looks for a nonlocal but separable state.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ._backend import kernels
from .covariance import physical_mask, validate_covariance
from .errors import ChainAssertionError, SamplerStarvation
from .standard_form import StandardForm, reduce

TAYLOR_SLACK = 1e-12
CHAIN_SLACK = 1e-9
DEFAULT_TAYLOR_GRID = np.linspace(0.0, 1.0, 10_001)
#: x values for the O(x^3) remainder check, largest first.
REMAINDER_PROBES = (1e-2, 1e-3, 1e-4)

_SAMPLER_BATCH = 8
_STARVATION_WINDOW = 1_000_000
_STARVATION_RATE = 1e-3

_COL = {name: i for i, name in enumerate(kernels.SCAN_COLUMNS)}


@dataclass(frozen=True)
class ChainReport:
    x: float
    taylor_lhs: float
    taylor_rhs: float
    eq15_value: float
    x_prime: float | None = None
    eq13_lhs: float | None = None
    eq13_rhs: float | None = None
    # None when x = 1, where the purity bounds divide by zero
    eq14a_ok: bool | None = None
    eq14b_ok: bool | None = None
    # simon_rhs - taylor_lhs: the chain without replacing n^2 + m^2 by 2nm
    original_margin: float | None = None
    weakened_margin: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ScanReport:
    samples: int
    nonlocal_count: int
    entangled_count: int
    entangled_local_count: int
    separable_local_count: int
    counterexamples: list = field(default_factory=list)
    seed: int = 0
    n_max: float = 3.0
    acceptance_rate: float = 1.0
    injected: int = 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["counterexamples"] = [asdict(sf) for sf in self.counterexamples]
        return d


@dataclass(frozen=True)
class SampleBatch:
    """Columns of accepted standard forms plus the number of proposals drawn."""

    n: np.ndarray
    m: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    attempts: int

    def __len__(self):
        return len(self.n)

    @property
    def acceptance_rate(self) -> float:
        return len(self) / self.attempts if self.attempts else 1.0

    def forms(self):
        for row in zip(self.n.tolist(), self.m.tolist(), self.c1.tolist(), self.c2.tolist()):
            yield StandardForm(*row)


def _standard_matrices(n, m, c1, c2) -> np.ndarray:
    mats = np.zeros((len(n), 4, 4))
    mats[:, 0, 0] = mats[:, 1, 1] = n
    mats[:, 2, 2] = mats[:, 3, 3] = m
    mats[:, 0, 2] = mats[:, 2, 0] = c1
    mats[:, 1, 3] = mats[:, 3, 1] = c2
    return mats


def _sample_range(seed: int, start: int, stop: int, n_max: float):
    out = np.empty((stop - start, 4))
    attempts = 0
    for row, index in enumerate(range(start, stop)):
        rng = np.random.default_rng([seed, index])
        while True:
            nm = rng.uniform(0.5, n_max, size=(_SAMPLER_BATCH, 2))
            frac = rng.uniform(-1.0, 1.0, size=(_SAMPLER_BATCH, 2))
            n, m = nm[:, 0], nm[:, 1]
            root = np.sqrt(n * m)
            c1, c2 = frac[:, 0] * root, frac[:, 1] * root
            ok = physical_mask(_standard_matrices(n, m, c1, c2))
            if ok.any():
                k = int(np.argmax(ok))
                attempts += k + 1
                out[row] = n[k], m[k], c1[k], c2[k]
                break
            attempts += _SAMPLER_BATCH
            if attempts >= _STARVATION_WINDOW and (row + 1) / attempts < _STARVATION_RATE:
                raise SamplerStarvation(
                    f"acceptance {(row + 1) / attempts:.2e} after {attempts} proposals"
                )
    return out, attempts


_XXPP_TO_LOCAL = [0, 2, 1, 3]


def _passive(rng) -> np.ndarray:
    """Random two-mode beam splitter with phases, in (x1, x2, p1, p2) ordering."""
    p1, p2, p3, t = rng.uniform(0.0, 2.0 * math.pi, size=4)
    u = (np.diag(np.exp(1j * np.array([p1, p2])))
         @ np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
         @ np.diag([np.exp(1j * p3), 1.0]))
    return np.block([[u.real, -u.imag], [u.imag, u.real]])


def _sample_williamson_range(seed: int, start: int, stop: int, r_max: float, noise_max: float):
    out = np.empty((stop - start, 4))
    for row, index in enumerate(range(start, stop)):
        rng = np.random.default_rng([seed, index])
        nu1, nu2 = 0.5 + rng.uniform(0.0, noise_max, size=2)
        r1, r2 = rng.uniform(0.0, r_max, size=2)
        squeeze = np.diag(np.exp([-r1, -r2, r1, r2]))
        s = _passive(rng) @ squeeze @ _passive(rng)
        v = s @ np.diag([nu1, nu2, nu1, nu2]) @ s.T
        v = v[np.ix_(_XXPP_TO_LOCAL, _XXPP_TO_LOCAL)]
        sf, _ = reduce(validate_covariance(0.5 * (v + v.T)))
        out[row] = sf.as_tuple()
    return out, stop - start


def sample_arrays(count: int, seed: int, n_max: float = 3.0, workers: int = 1,
                  chunk: int = 5000, distribution: str = "uniform",
                  r_max: float = 1.5, noise_max: float = 0.1) -> SampleBatch:
    """Rejection-sample ``count`` physical standard forms.

    n, m ~ U[1/2, n_max] and c1, c2 ~ U[-sqrt(nm), sqrt(nm)], kept when the
    matrix passes the same test as :func:`~cvbell.covariance.validate_covariance`.
    Sample ``i`` draws from its own stream seeded by ``(seed, i)``, so the output
    does not depend on ``workers``. Signs are canonicalized to c1 >= |c2|.

    ``distribution="williamson"`` instead draws near-pure states: thermal states
    with symplectic eigenvalues in [1/2, 1/2 + noise_max], transformed by a random
    two-mode symplectic (passive . squeeze(r <= r_max) . passive) and reduced.
    Uniform sampling almost never produces a nonlocal state; this one does.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not n_max > 0.5:
        raise ValueError("n_max must exceed 1/2")
    if distribution == "uniform":
        fn, extra = _sample_range, (n_max,)
    elif distribution == "williamson":
        fn, extra = _sample_williamson_range, (r_max, noise_max)
    else:
        raise ValueError(f"unknown distribution {distribution!r}")
    jobs = [(seed, a, min(a + chunk, count), *extra) for a in range(0, count, chunk)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, *zip(*jobs)))
    else:
        parts = [fn(*job) for job in jobs]
    rows = np.concatenate([p[0] for p in parts])
    attempts = sum(p[1] for p in parts)
    n, m, c1, c2 = rows.T
    a1, a2 = np.abs(c1), np.abs(c2)
    sign = np.where(c1 * c2 < 0, -1.0, 1.0)
    return SampleBatch(n.copy(), m.copy(), np.maximum(a1, a2), sign * np.minimum(a1, a2), attempts)


def sample_physical_states(count: int, seed: int, n_max: float = 3.0):
    """Yield ``count`` physical :class:`StandardForm` values; see :func:`sample_arrays`."""
    yield from sample_arrays(count, seed, n_max).forms()


def scan_table(n, m, c1, c2) -> dict:
    """Per-state Bell, Simon, PPT and chain quantities, one array per column."""
    table = kernels.scan_states(n, m, c1, c2)
    return {name: table[:, i] for name, i in _COL.items()}


def classify(table: dict):
    """Boolean arrays (nonlocal, entangled) from a :func:`scan_table` result."""
    return table["nl_lhs"] > table["nl_rhs"], table["simon_lhs"] < table["simon_rhs"]


def scan_batch(batch: SampleBatch, seed: int = 0, n_max: float = 3.0, inject=()) -> ScanReport:
    inject = list(inject)
    cols = [batch.n, batch.m, batch.c1, batch.c2]
    if inject:
        extra = np.array([sf.as_tuple() for sf in inject]).T
        cols = [np.concatenate([c, e]) for c, e in zip(cols, extra)]
    table = scan_table(*cols)
    nonlocal_, entangled = classify(table)
    bad = np.flatnonzero(nonlocal_ & ~entangled)
    return ScanReport(
        samples=len(cols[0]),
        nonlocal_count=int(nonlocal_.sum()),
        entangled_count=int(entangled.sum()),
        entangled_local_count=int((entangled & ~nonlocal_).sum()),
        separable_local_count=int((~entangled & ~nonlocal_).sum()),
        counterexamples=[StandardForm(*(float(c[i]) for c in cols)) for i in bad],
        seed=seed,
        n_max=n_max,
        acceptance_rate=batch.acceptance_rate,
        injected=len(inject),
    )


def scan_nonlocal_implies_entangled(count: int, seed: int, n_max: float = 3.0, inject=(),
                                    workers: int = 1, distribution: str = "uniform") -> ScanReport:
    """Sample states and collect every one that is nonlocal but not entangled.

    ``inject`` appends extra standard forms to the sampled set.
    """
    batch = sample_arrays(count, seed, n_max, workers=workers, distribution=distribution)
    return scan_batch(batch, seed=seed, n_max=n_max, inject=inject)


def taylor_bound_table(x_grid) -> dict:
    """Vectorized Taylor bound: squared bracket / 16 against (1 + x^2)/4, plus the final term."""
    xs = np.asarray(x_grid, dtype=float)
    if np.any((xs < 0) | (xs > 1)):
        raise ValueError("x values must lie in [0, 1]")
    t = kernels.taylor_grid(xs)
    return {"x": xs, "taylor_lhs": t[:, 0], "taylor_rhs": t[:, 1], "eq15": t[:, 2]}


def remainder_ratios(probes=REMAINDER_PROBES):
    """(rhs - lhs) / x^2 at small x; it must shrink towards 0 like x."""
    t = taylor_bound_table(probes)
    return (t["taylor_rhs"] - t["taylor_lhs"]) / np.asarray(probes) ** 2


def taylor_bound_check(x_grid=DEFAULT_TAYLOR_GRID) -> list:
    t = taylor_bound_table(x_grid)
    reports = []
    for x, lhs, rhs, e15 in zip(*(t[k].tolist() for k in ("x", "taylor_lhs", "taylor_rhs", "eq15"))):
        if lhs > rhs + TAYLOR_SLACK:
            raise ChainAssertionError("Taylor bound violated", x)
        if e15 < -TAYLOR_SLACK:
            raise ChainAssertionError("2 - (2+x^2) sqrt(1-x^2) is negative", x)
        reports.append(ChainReport(x=x, taylor_lhs=lhs, taylor_rhs=rhs, eq15_value=e15))
    ratios = remainder_ratios()
    if not (np.all(np.diff(ratios) < 0) and ratios[1] < 0.1):
        raise ChainAssertionError("Taylor remainder is not o(x^2)", ratios.tolist())
    return reports


def _chain_failures(table: dict, slack: float = CHAIN_SLACK) -> np.ndarray:
    """Boolean mask of states where any inequality of the chain fails beyond ``slack``."""
    with np.errstate(invalid="ignore"):
        fail = table["eq13_lhs"] < table["eq13_rhs"] - slack
        fail |= table["x"] > 1.0 + TAYLOR_SLACK
        fail |= table["eq14a_margin"] < -slack
        fail |= table["eq14b_margin"] < -slack
        fail |= table["eq15"] < -slack
        fail |= table["taylor_lhs"] > table["eq13_rhs"] + TAYLOR_SLACK
        fail |= table["simon_rhs"] - table["taylor_lhs"] < -slack
    return fail


def chain_failures(batch: SampleBatch, slack: float = CHAIN_SLACK) -> list:
    """Standard forms in ``batch`` that break the inequality chain."""
    table = scan_table(batch.n, batch.m, batch.c1, batch.c2)
    idx = np.flatnonzero(_chain_failures(table, slack))
    return [StandardForm(float(batch.n[i]), float(batch.m[i]), float(batch.c1[i]),
                         float(batch.c2[i])) for i in idx]


def chain_inequality_check(sf: StandardForm) -> ChainReport:
    table = {k: v[0] for k, v in scan_table([sf.n], [sf.m], [sf.c1], [sf.c2]).items()}
    skipped = math.isnan(table["eq14a_margin"])
    report = ChainReport(
        x=table["x"],
        taylor_lhs=table["taylor_lhs"],
        taylor_rhs=table["eq13_rhs"],
        eq15_value=table["eq15"],
        x_prime=table["x_prime"],
        eq13_lhs=table["eq13_lhs"],
        eq13_rhs=table["eq13_rhs"],
        eq14a_ok=None if skipped else bool(table["eq14a_margin"] >= -CHAIN_SLACK),
        eq14b_ok=None if skipped else bool(table["eq14b_margin"] >= -CHAIN_SLACK),
        original_margin=table["simon_rhs"] - table["taylor_lhs"],
        weakened_margin=table["eq13_lhs"] - table["eq13_rhs"],
    )
    if report.eq13_lhs < report.eq13_rhs - CHAIN_SLACK:
        raise ChainAssertionError("sufficient condition nm(2 + 2xx' - 1/4nm) >= (1+x^2)/4 failed", sf)
    if report.eq14a_ok is False or report.eq14b_ok is False:
        raise ChainAssertionError("purity-derived bound failed", sf)
    if report.eq15_value < -CHAIN_SLACK:
        raise ChainAssertionError("2 - (2+x^2) sqrt(1-x^2) is negative", sf)
    if report.taylor_lhs > report.taylor_rhs + TAYLOR_SLACK:
        raise ChainAssertionError("Taylor bound failed", sf)
    if report.original_margin < -CHAIN_SLACK:
        raise ChainAssertionError("nonlocality bound exceeds the Simon right-hand side", sf)
    return report

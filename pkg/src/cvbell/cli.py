"""Command-line interface: ``cvbell {tmsv,check,sweep,verify}``.

Exit codes: 0 success, 1 theorem violation, 2 invalid or unphysical input,
64 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .covariance import purity
from .errors import ChainAssertionError, CovarianceError, Unphysical
from .states import SEPARABLE_NONLOCAL, StateFile, analyze, tmsv_covariance
from .verification import (
    DEFAULT_TAYLOR_GRID,
    chain_failures,
    remainder_ratios,
    sample_arrays,
    scan_batch,
    taylor_bound_check,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_USAGE = 64

SWEEP_COLUMNS = (
    "r", "n_th", "eta", "n", "m", "c1", "c2", "purity", "bmax", "nonlocal",
    "simon_lhs", "simon_rhs", "entangled", "log_negativity",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_range(text: str) -> np.ndarray:
    """'A:B:S' -> A, A+S, ..., up to and including B; a bare number is a single point."""
    parts = text.split(":")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected START:STOP:STEP") from None
    if len(vals) == 1:
        return np.array(vals)
    if len(vals) != 3:
        raise UsageError(f"bad range {text!r}; expected START:STOP:STEP")
    start, stop, step = vals
    if not step > 0:
        raise UsageError(f"range {text!r}: step must be > 0")
    if stop < start:
        raise UsageError(f"range {text!r} is empty")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


@dataclass
class SweepConfig:
    r: np.ndarray
    n_th: np.ndarray = field(default_factory=lambda: np.array([0.0]))
    eta: np.ndarray = field(default_factory=lambda: np.array([1.0]))
    columns: tuple = SWEEP_COLUMNS

    def __post_init__(self):
        for name in ("r", "n_th", "eta"):
            if len(getattr(self, name)) == 0:
                raise UsageError(f"{name} range is empty")
        unknown = set(self.columns) - set(SWEEP_COLUMNS)
        if unknown:
            raise UsageError(f"unknown sweep columns: {sorted(unknown)}")


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return format(float(value), ".17g")


def sweep_rows(cfg: SweepConfig):
    for r in cfg.r:
        for n_th in cfg.n_th:
            for eta in cfg.eta:
                cov = tmsv_covariance(float(r), float(n_th), float(eta))
                a = analyze(cov)
                sf = a.standard_form
                row = {
                    "r": r, "n_th": n_th, "eta": eta,
                    "n": sf.n, "m": sf.m, "c1": sf.c1, "c2": sf.c2,
                    "purity": a.purity, "bmax": a.bell.bmax, "nonlocal": a.bell.nonlocal_,
                    "simon_lhs": a.entanglement.simon_lhs,
                    "simon_rhs": a.entanglement.simon_rhs,
                    "entangled": a.entanglement.entangled,
                    "log_negativity": a.entanglement.log_negativity,
                }
                yield [_fmt(row[c]) for c in cfg.columns]


def write_sweep(cfg: SweepConfig, path) -> int:
    rows = list(sweep_rows(cfg))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(cfg.columns)
        writer.writerows(rows)
    return len(rows)


def cmd_tmsv(args) -> int:
    cov = tmsv_covariance(args.r, args.thermal, args.eta)
    state = StateFile.from_covariance(cov, generator="tmsv", r=args.r, n_th=args.thermal,
                                      eta=args.eta)
    if args.out:
        state.write(args.out)
    else:
        print(json.dumps(state.to_json(), indent=2))
    return EXIT_OK


def _print_analysis(a, stream=None):
    stream = stream or sys.stdout
    sf, b, e = a.standard_form, a.bell, a.entanglement
    print(f"purity            {a.purity:.10g}", file=stream)
    print(f"standard form     n={sf.n:.10g} m={sf.m:.10g} c1={sf.c1:.10g} c2={sf.c2:.10g}",
          file=stream)
    print(f"                  c_tilde={sf.c_tilde:.10g} x={sf.x:.10g} x'={sf.x_prime:.10g} "
          f"det V={sf.det:.10g}", file=stream)
    print(f"bell max          {b.bmax:.10g} (margin {b.margin:+.3e}, A*={b.a_star:.10g}, "
          f"alpha_I*={b.alpha_i_star:.10g})", file=stream)
    if a.oracle is not None:
        o = a.oracle
        flag = "" if o.converged else " [not converged]"
        print(f"bell max (oracle) {o.bmax:.10g} (diff {o.bmax - b.bmax:+.3e}){flag}", file=stream)
    print(f"simon             lhs={e.simon_lhs:.10g} rhs={e.simon_rhs:.10g}", file=stream)
    print(f"ppt nu_tilde      {e.nu_tilde:.10g}", file=stream)
    print(f"log negativity    {e.log_negativity:.10g}", file=stream)
    print(f"verdict           {a.verdict}", file=stream)


def cmd_check(args) -> int:
    try:
        state = StateFile.read(args.input)
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: invalid state file {args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        cov = state.covariance()
    except Unphysical as exc:
        print(f"error: unphysical state: min eigenvalue of V + i*Omega/2 = "
              f"{exc.min_eigenvalue:.6e}", file=sys.stderr)
        return EXIT_INPUT
    except (CovarianceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    a = analyze(cov, oracle=args.oracle)
    if args.json:
        print(json.dumps(a.to_dict(), indent=2))
    else:
        _print_analysis(a)
    if a.verdict == SEPARABLE_NONLOCAL:
        print("WARNING: state is nonlocal but separable; this contradicts "
              "nonlocality => entanglement", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = SweepConfig(
        r=parse_range(args.r),
        n_th=parse_range(args.thermal),
        eta=parse_range(args.eta),
        columns=tuple(args.columns.split(",")) if args.columns else SWEEP_COLUMNS,
    )
    if np.any(cfg.r < 0) or np.any(cfg.n_th < 0) or np.any((cfg.eta < 0) | (cfg.eta > 1)):
        raise UsageError("need r >= 0, thermal >= 0 and 0 <= eta <= 1")
    try:
        rows = write_sweep(cfg, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"wrote {rows} rows to {args.out}", file=sys.stderr)
    return EXIT_OK


def run_verification(samples: int, seed: int, n_max: float, workers: int = 1,
                     distribution: str = "uniform") -> dict:
    result = {"passed": True}
    try:
        reports = taylor_bound_check(DEFAULT_TAYLOR_GRID)
        result["taylor"] = {
            "points": len(reports),
            "max_lhs_minus_rhs": max(r.taylor_lhs - r.taylor_rhs for r in reports),
            "min_final_term": min(r.eq15_value for r in reports),
            "remainder_ratios": remainder_ratios().tolist(),
        }
    except ChainAssertionError as exc:
        result["passed"] = False
        result["taylor"] = {"error": str(exc)}
    batch = sample_arrays(samples, seed, n_max, workers=workers, distribution=distribution)
    failures = chain_failures(batch)
    result["chain_failures"] = [sf.as_tuple() for sf in failures]
    scan = scan_batch(batch, seed=seed, n_max=n_max)
    result["scan"] = scan.to_dict()
    result["distribution"] = distribution
    if failures or scan.counterexamples:
        result["passed"] = False
    return result


def cmd_verify(args) -> int:
    result = run_verification(args.samples, args.seed, args.n_max, args.workers,
                              args.distribution)
    scan = result["scan"]
    if args.json:
        print(json.dumps(result, indent=2))
    else:
        print(f"samples               {scan['samples']} (acceptance {scan['acceptance_rate']:.3f})")
        print(f"separable+local       {scan['separable_local_count']}")
        print(f"entangled+local       {scan['entangled_local_count']}")
        print(f"entangled+nonlocal    {scan['nonlocal_count'] - len(scan['counterexamples'])}")
        print(f"separable+nonlocal    {len(scan['counterexamples'])}")
        print(f"chain failures        {len(result['chain_failures'])}")
        taylor = result["taylor"]
        if "error" in taylor:
            print(f"taylor grid           FAILED: {taylor['error']}")
        else:
            print(f"taylor grid           {taylor['points']} points, "
                  f"max(lhs - rhs) = {taylor['max_lhs_minus_rhs']:.3e}")
        if scan["nonlocal_count"] == 0:
            print("note: no nonlocal state was sampled; --distribution williamson "
                  "samples near-pure states", file=sys.stderr)
    if not result["passed"]:
        for sf in scan["counterexamples"]:
            print(f"COUNTEREXAMPLE {json.dumps(sf)}", file=sys.stderr)
        for sf in result["chain_failures"]:
            print(f"CHAIN FAILURE {list(sf)}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cvbell", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tmsv", help="write a (noisy) two-mode squeezed vacuum state file")
    t.add_argument("--r", type=float, required=True, help="squeezing parameter")
    t.add_argument("--thermal", type=float, default=0.0, help="thermal occupation n_th")
    t.add_argument("--eta", type=float, default=1.0, help="channel transmissivity")
    t.add_argument("--out", help="output JSON path (default: stdout)")
    t.set_defaults(func=cmd_tmsv)

    c = sub.add_parser("check", help="analyze a state file")
    c.add_argument("--input", required=True)
    c.add_argument("--oracle", action="store_true", help="also run the numeric maximizer")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("sweep", help="tabulate TMSV states over parameter ranges")
    s.add_argument("--r", required=True, metavar="A:B:S")
    s.add_argument("--thermal", default="0", metavar="A:B:S")
    s.add_argument("--eta", default="1", metavar="A:B:S")
    s.add_argument("--columns", help="comma-separated subset of " + ",".join(SWEEP_COLUMNS))
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="randomized check that nonlocality implies entanglement")
    v.add_argument("--samples", type=_positive_int, required=True)
    v.add_argument("--seed", type=_nonneg_int, required=True)
    v.add_argument("--n-max", type=float, default=3.0)
    v.add_argument("--distribution", choices=("uniform", "williamson"), default="uniform")
    v.add_argument("--workers", type=_positive_int, default=1)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "tmsv":
            if args.r < 0 or args.thermal < 0 or not 0 <= args.eta <= 1:
                raise UsageError("need r >= 0, thermal >= 0 and 0 <= eta <= 1")
        if args.command == "verify" and not args.n_max > 0.5:
            raise UsageError("--n-max must exceed 0.5")
        return args.func(args)
    except UsageError as exc:
        print(f"cvbell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

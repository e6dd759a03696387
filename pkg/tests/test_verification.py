import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import standard_forms
from oracles import CEILING_NL_LHS, NOISY_C, NOISY_N
from cvbell import (
    ChainAssertionError,
    SamplerStarvation,
    StandardForm,
    chain_inequality_check,
    is_nonlocal,
    sample_physical_states,
    scan_nonlocal_implies_entangled,
    simon_criterion,
    taylor_bound_check,
    tmsv_standard_form,
    validate_covariance,
)
from cvbell import verification as ver

NOISY_SF = StandardForm(NOISY_N, NOISY_N, NOISY_C, -NOISY_C)


class TestTaylor:
    def test_endpoints(self):
        lo, hi = taylor_bound_check([0.0, 1.0])
        assert lo.taylor_lhs == lo.taylor_rhs == 0.25
        assert hi.taylor_lhs == pytest.approx(CEILING_NL_LHS, rel=1e-14)
        assert hi.taylor_rhs == 0.5
        assert hi.eq15_value == 2.0

    def test_midpoint_remainder_positive(self):
        (r,) = taylor_bound_check([0.5])
        assert r.taylor_rhs - r.taylor_lhs > 0

    def test_default_grid(self):
        reports = taylor_bound_check()
        assert len(reports) == 10_001
        assert all(r.taylor_lhs <= r.taylor_rhs + 1e-12 for r in reports)

    def test_remainder_is_cubic(self):
        ratios = ver.remainder_ratios()
        assert np.all(np.diff(ratios) < 0) and ratios[1] < 0.1
        # the leading remainder is 3x^3/4, so ratio / x tends to 3/4
        np.testing.assert_allclose(ratios / np.array(ver.REMAINDER_PROBES), 0.75, rtol=0.03)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            taylor_bound_check([1.5])

    def test_failure_carries_x(self, monkeypatch):
        def broken(xs):
            t = np.zeros((len(xs), 3))
            t[:, 0] = 1.0
            return t
        monkeypatch.setattr(ver.kernels, "taylor_grid", broken)
        with pytest.raises(ChainAssertionError) as err:
            taylor_bound_check([0.25])
        assert err.value.context == 0.25

    @given(st.floats(0.0, 1.0))
    def test_final_term_identity(self, x):
        assert (2 + x * x) ** 2 * (1 - x * x) == pytest.approx(4 - 3 * x**4 - x**6, abs=1e-12)


class TestChain:
    def test_vacuum_equality(self):
        r = chain_inequality_check(StandardForm(0.5, 0.5, 0.0, 0.0))
        assert r.eq13_lhs == r.eq13_rhs == 0.25

    def test_pure_limit_skips_purity_bounds(self):
        # c = sqrt(nm) exactly is the x = 1 edge; the purity bounds divide by 1 - x^2
        r = chain_inequality_check(StandardForm(1.0, 1.0, 1.0, 0.5))
        assert r.x == 1.0
        assert r.eq14a_ok is None and r.eq14b_ok is None
        assert r.eq15_value == 2.0

    def test_reports_both_margins(self):
        r = chain_inequality_check(tmsv_standard_form(0.5))
        assert r.original_margin > 0 and r.weakened_margin > 0

    @given(standard_forms())
    def test_holds_for_physical(self, sf):
        r = chain_inequality_check(sf)
        assert r.eq14a_ok is not False and r.eq14b_ok is not False

    def test_failure_carries_state(self):
        sf = StandardForm(0.5, 0.5, 0.45, 0.45)  # unphysical: nm - |c1 c2| < 1/4
        with pytest.raises(ChainAssertionError) as err:
            chain_inequality_check(sf)
        assert err.value.context == sf


class TestSampler:
    def test_single_state_valid(self):
        (sf,) = sample_physical_states(1, 11)
        validate_covariance(sf.matrix())

    def test_deterministic(self):
        a = list(sample_physical_states(50, 5))
        b = list(sample_physical_states(50, 5))
        assert a == b

    def test_worker_independent(self):
        a = ver.sample_arrays(300, 9, chunk=100, workers=1)
        b = ver.sample_arrays(300, 9, chunk=100, workers=3)
        for col in ("n", "m", "c1", "c2"):
            assert np.array_equal(getattr(a, col), getattr(b, col))
        assert a.attempts == b.attempts

    def test_emitted_states_satisfy_purity_bound(self):
        batch = ver.sample_arrays(2000, 1)
        det = (batch.n * batch.m - batch.c1**2) * (batch.n * batch.m - batch.c2**2)
        assert np.all(4 * det >= 0.25 - 1e-9)
        assert np.all(batch.c1 >= np.abs(batch.c2))
        assert 0.5 < batch.acceptance_rate < 0.8

    def test_williamson_produces_nonlocal(self):
        rep = scan_nonlocal_implies_entangled(500, 2, distribution="williamson")
        assert rep.nonlocal_count > 0
        assert rep.counterexamples == []

    def test_starvation(self, monkeypatch):
        monkeypatch.setattr(ver, "physical_mask", lambda mats: np.zeros(len(mats), dtype=bool))
        monkeypatch.setattr(ver, "_STARVATION_WINDOW", 800)
        with pytest.raises(SamplerStarvation):
            ver.sample_arrays(1, 0)

    @pytest.mark.parametrize("kwargs", [{"count": 0}, {"n_max": 0.5}, {"distribution": "x"}])
    def test_bad_arguments(self, kwargs):
        args = {"count": 1, "seed": 0, **kwargs}
        with pytest.raises(ValueError):
            ver.sample_arrays(**args)


class TestScan:
    def test_injected_states_are_classified(self):
        rep = scan_nonlocal_implies_entangled(200, 4, inject=[NOISY_SF, tmsv_standard_form(0.5)])
        assert rep.samples == 202 and rep.injected == 2
        assert rep.entangled_local_count >= 1
        assert rep.nonlocal_count >= 1
        assert rep.counterexamples == []

    def test_counterexample_is_recorded(self):
        # unphysical on purpose: nonlocal by the Bell test, separable by Simon
        fake = StandardForm(0.45, 0.45, 0.0, 0.0)
        assert is_nonlocal(fake)[0] and not simon_criterion(fake)[2]
        rep = scan_nonlocal_implies_entangled(10, 4, inject=[fake])
        assert rep.counterexamples == [fake]

    def test_deterministic(self):
        a = scan_nonlocal_implies_entangled(1000, 8)
        b = scan_nonlocal_implies_entangled(1000, 8)
        assert a == b

    def test_implication_chain_per_state(self):
        batch = ver.sample_arrays(300, 6, distribution="williamson")
        table = ver.scan_table(batch.n, batch.m, batch.c1, batch.c2)
        nl, ent = ver.classify(table)
        assert nl.any()
        assert np.all(table["eq13_lhs"][nl] >= table["eq13_rhs"][nl] - 1e-9)
        assert np.all(ent[nl])

    def test_to_dict(self):
        d = scan_nonlocal_implies_entangled(5, 1, inject=[StandardForm(0.45, 0.45, 0.0, 0.0)]).to_dict()
        assert d["counterexamples"] == [{"n": 0.45, "m": 0.45, "c1": 0.0, "c2": 0.0}]
        assert math.isfinite(d["acceptance_rate"])

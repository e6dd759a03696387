import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvbell import StandardForm, StateFile, analyze, tmsv_covariance, tmsv_standard_form
from cvbell.states import thermal_channel


class TestTmsv:
    def test_zero_is_vacuum(self):
        assert np.array_equal(tmsv_covariance(0.0).entries, 0.5 * np.eye(4))

    def test_eta_zero_is_thermal(self):
        v = tmsv_covariance(1.3, 0.4, 0.0).entries
        assert np.allclose(v, 0.9 * np.eye(4), atol=0)

    def test_additive_noise(self):
        v = tmsv_covariance(0.3, 0.1).entries
        assert v[0, 0] == pytest.approx(math.cosh(0.6) / 2 + 0.1, rel=1e-15)

    @given(st.floats(0.0, 8.0))
    def test_close_to_naive_values(self, r):
        sf = tmsv_standard_form(r)
        rel = max(1e-15, 2.3e-16 * math.exp(4 * r))
        assert sf.n == pytest.approx(math.cosh(2 * r) / 2, rel=rel)
        # c is rounded on the grid of n, so its error is bounded relative to n
        assert sf.c1 == pytest.approx(math.sinh(2 * r) / 2, abs=rel * sf.n)
        assert sf.c2 == -sf.c1 and sf.n == sf.m

    @given(st.floats(0.0, 8.0))
    def test_pure_to_working_precision(self, r):
        sf = tmsv_standard_form(r)
        defect = Fraction(sf.n) ** 2 - Fraction(sf.c1) ** 2 - Fraction(1, 4)
        assert abs(float(defect)) <= 1e-15

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            tmsv_standard_form(-0.1)

    @pytest.mark.parametrize("n_th,eta", [(-1.0, 1.0), (0.0, 1.5)])
    def test_channel_ranges(self, n_th, eta):
        with pytest.raises(ValueError):
            thermal_channel(np.eye(4), n_th, eta)


class TestStateFile:
    def test_matrix_round_trip_bit_exact(self, tmp_path):
        cov = tmsv_covariance(0.5, 0.2, 0.7)
        path = tmp_path / "s.json"
        StateFile.from_covariance(cov, label="x").write(path)
        back = StateFile.read(path)
        assert np.array_equal(back.covariance().entries, cov.entries)
        assert back.meta == {"label": "x"}

    def test_standard_form_entry(self):
        d = {"standard_form": {"n": 1.0, "m": 1.0, "c1": 0.5, "c2": -0.2}}
        sf = StateFile.from_json(d).standard_form
        assert sf == StandardForm(1.0, 1.0, 0.5, -0.2)
        assert StateFile.from_json(d).to_json() == d

    @pytest.mark.parametrize("d", [
        {},
        {"matrix": np.eye(4).tolist()},
        {"matrix": np.eye(4).tolist(), "ordering": "qI,qS,pI,pS"},
        {"matrix": np.eye(4).tolist(), "ordering": "qI,pI,qS,pS",
         "standard_form": {"n": 1, "m": 1, "c1": 0, "c2": 0}},
        [1, 2],
    ])
    def test_invalid(self, d):
        with pytest.raises(ValueError):
            StateFile.from_json(d)

    def test_json_is_plain(self, tmp_path):
        path = tmp_path / "s.json"
        StateFile.from_covariance(tmsv_covariance(0.1)).write(path)
        d = json.loads(path.read_text())
        assert d["ordering"] == "qI,pI,qS,pS"
        assert len(d["matrix"]) == 4


class TestAnalyze:
    def test_verdicts(self):
        assert analyze(tmsv_covariance(0.0)).verdict == "separable+local"
        assert analyze(tmsv_covariance(0.5)).verdict == "entangled+nonlocal"
        assert analyze(tmsv_covariance(0.3, 0.1)).verdict == "entangled+local"

    def test_oracle_attached(self):
        a = analyze(tmsv_covariance(0.5), oracle=True)
        assert a.oracle.bmax <= a.bell.bmax + 1e-6
        d = a.to_dict()
        assert d["bell_oracle"]["bmax"] == a.oracle.bmax
        assert d["verdict"] == "entangled+nonlocal"

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import standard_forms
from oracles import (
    TMSV05_C,
    TMSV05_DET_VI,
    TMSV05_DET_VIS,
    TMSV05_N,
    cofactor_det,
    gauss_jordan_inverse,
    standard_matrix,
    wigner_direct,
)
from cvbell import (
    OMEGA,
    CovarianceMatrix,
    NotSymmetric,
    PhasePoint,
    SingularCovariance,
    Unphysical,
    apply_local_symplectic,
    blocks,
    local_invariants,
    purity,
    random_local_symplectic,
    tmsv_covariance,
    validate_covariance,
    wigner,
)
from cvbell.covariance import assemble, min_uncertainty_eigenvalues

VACUUM = 0.5 * np.eye(4)


def test_symplectic_form_identities():
    assert np.array_equal(OMEGA @ OMEGA, -np.eye(4))
    assert np.array_equal(OMEGA.T, -OMEGA)


class TestValidate:
    def test_vacuum_is_valid(self):
        cov = validate_covariance(VACUUM)
        assert isinstance(cov, CovarianceMatrix)
        assert np.array_equal(cov.entries, VACUUM)

    def test_below_vacuum_is_unphysical(self):
        with pytest.raises(Unphysical) as err:
            validate_covariance(0.25 * np.eye(4))
        assert err.value.min_eigenvalue == pytest.approx(-0.25)

    def test_tmsv_half_is_valid(self):
        v = standard_matrix(TMSV05_N, TMSV05_N, TMSV05_C, -TMSV05_C)
        # direct Hermitian eigensolve of V + i Omega / 2
        lam = np.linalg.eigvalsh(v + 0.5j * OMEGA)
        assert lam.min() > -1e-10
        validate_covariance(v)

    def test_tiny_asymmetry_is_symmetrized(self):
        v = VACUUM.copy()
        v[0, 1] = 1e-13
        cov = validate_covariance(v)
        assert cov.entries[0, 1] == cov.entries[1, 0] == 5e-14

    def test_asymmetry_rejected(self):
        v = VACUUM.copy()
        v[0, 1] = 1e-6
        with pytest.raises(NotSymmetric):
            validate_covariance(v)

    def test_singular_rejected(self):
        # physical in the eigenvalue sense is impossible with det 0 for a 4x4
        # positive matrix, so feed the determinant check directly
        v = np.diag([0.5, 0.5, 0.5, 0.0])
        with pytest.raises((SingularCovariance, Unphysical)):
            validate_covariance(v)

    @pytest.mark.parametrize("bad", [np.eye(3), np.full((4, 4), np.nan)])
    def test_shape_and_finiteness(self, bad):
        with pytest.raises(ValueError):
            validate_covariance(bad)

    def test_entries_read_only(self):
        cov = validate_covariance(VACUUM)
        with pytest.raises(ValueError):
            cov.entries[0, 0] = 3.0


class TestPurity:
    def test_vacuum(self):
        assert purity(validate_covariance(VACUUM)) == 1.0

    def test_thermal(self):
        assert purity(validate_covariance(np.eye(4))) == pytest.approx(0.25, abs=1e-15)

    def test_tmsv_half(self):
        cov = tmsv_covariance(0.5)
        assert cofactor_det(cov.entries) == pytest.approx(1 / 16, rel=1e-12)
        assert purity(cov) == pytest.approx(1.0, abs=1e-12)

    @given(standard_forms())
    def test_at_most_one(self, sf):
        assert purity(validate_covariance(sf.matrix())) <= 1 + 1e-9


class TestWigner:
    def test_vacuum_origin(self):
        assert wigner(validate_covariance(VACUUM), PhasePoint.origin()) == pytest.approx(
            1 / math.pi**2, rel=1e-15)

    def test_vacuum_unit_displacement(self):
        w = wigner(validate_covariance(VACUUM), PhasePoint(1, 0, 0, 0))
        assert w == pytest.approx(math.exp(-1) / math.pi**2, rel=1e-14)

    def test_tmsv_matches_gauss_jordan(self):
        cov = tmsv_covariance(0.5)
        u = np.ones(4)
        vinv = gauss_jordan_inverse(cov.entries)
        expected = math.exp(-0.5 * u @ vinv @ u) / (4 * math.pi**2 * 0.25)
        assert wigner(cov, PhasePoint(*u)) == pytest.approx(expected, rel=1e-12)
        assert wigner(cov, u) == pytest.approx(wigner_direct(cov.entries, u), rel=1e-12)

    def test_batched_points(self, rng):
        cov = tmsv_covariance(0.3, 0.1)
        pts = rng.normal(size=(20, 4))
        w = wigner(cov, pts)
        assert w.shape == (20,)
        for p, val in zip(pts, w):
            assert val == pytest.approx(wigner_direct(cov.entries, p), rel=1e-11)

    @pytest.mark.parametrize("r", [0.0, 0.25, 0.5])
    def test_normalization(self, r):
        cov = tmsv_covariance(r)
        sigma = math.sqrt(np.max(np.linalg.eigvalsh(cov.entries)))
        k = 24
        edges = np.linspace(-6 * sigma, 6 * sigma, k + 1)
        mids = 0.5 * (edges[1:] + edges[:-1])
        h = edges[1] - edges[0]
        grid = np.stack(np.meshgrid(mids, mids, mids, mids, indexing="ij"), -1).reshape(-1, 4)
        total = wigner(cov, grid).sum() * h**4
        assert total == pytest.approx(1.0, abs=1e-2)

    def test_strictly_positive(self):
        cov = tmsv_covariance(1.0)
        assert wigner(cov, PhasePoint(3, -3, 3, 3)) > 0


class TestBlocks:
    def test_vacuum(self):
        vi, vs, vis = blocks(validate_covariance(VACUUM))
        assert np.array_equal(vi, 0.5 * np.eye(2))
        assert np.array_equal(vs, 0.5 * np.eye(2))
        assert np.array_equal(vis, np.zeros((2, 2)))

    def test_tmsv(self):
        r = 0.7
        ch, sh = math.cosh(2 * r) / 2, math.sinh(2 * r) / 2
        vi, vs, vis = blocks(tmsv_covariance(r))
        np.testing.assert_allclose(vi, ch * np.eye(2), rtol=1e-7)
        np.testing.assert_allclose(vs, ch * np.eye(2), rtol=1e-7)
        np.testing.assert_allclose(vis, np.diag([sh, -sh]), rtol=1e-7)

    def test_product_state_cross_block(self):
        v = np.diag([0.7, 0.9, 1.3, 0.6])
        assert np.array_equal(blocks(validate_covariance(v))[2], np.zeros((2, 2)))

    @given(standard_forms(), st.integers(0, 2**32 - 1))
    def test_reassemble_bit_exact(self, sf, seed):
        cov = apply_local_symplectic(sf.covariance(), random_local_symplectic(seed, 0.5))
        assert np.array_equal(assemble(*blocks(cov)), cov.entries)


class TestLocalInvariants:
    def test_vacuum(self):
        inv = local_invariants(validate_covariance(VACUUM))
        assert inv == {"detVI": 0.25, "detVS": 0.25, "detVIS": 0.0, "detV": pytest.approx(1 / 16)}

    def test_tmsv_half(self):
        inv = local_invariants(tmsv_covariance(0.5))
        assert inv["detVI"] == pytest.approx(TMSV05_DET_VI, rel=1e-12)
        assert inv["detVS"] == pytest.approx(TMSV05_DET_VI, rel=1e-12)
        assert inv["detVIS"] == pytest.approx(TMSV05_DET_VIS, rel=1e-12)
        assert inv["detV"] == pytest.approx(0.0625, rel=1e-12)

    @given(standard_forms(), st.integers(0, 2**32 - 1))
    def test_unchanged_by_local_symplectic(self, sf, seed):
        cov = sf.covariance()
        before = local_invariants(cov)
        after = local_invariants(apply_local_symplectic(cov, random_local_symplectic(seed, 1.0)))
        for key in before:
            assert after[key] == pytest.approx(before[key], rel=1e-10, abs=1e-10)

    @given(standard_forms(), st.integers(0, 2**32 - 1))
    def test_physicality_preserved(self, sf, seed):
        cov = apply_local_symplectic(sf.covariance(), random_local_symplectic(seed, 1.0))
        assert min_uncertainty_eigenvalues(cov.entries) >= -1e-9

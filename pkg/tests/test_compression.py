import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reliefgen import (ReliefParams, boundary_weight, compress_normals,
                       curvature_weight)

E_INV = 1.0 - np.exp(-1.0)


class TestCurvatureWeight:
    def test_center_value_paper_table(self):
        # at k = alpha*delta the argument is 1 for every exponent
        for beta in (0.01, 1.0, 10.0):
            w = curvature_weight(np.array([0.5]), alpha=2.0, beta=beta,
                                 delta=0.25)
            assert w[0] == pytest.approx(E_INV, abs=1e-12)

    def test_beta_zero_uniform(self):
        # 0^0 = 1: beta = 0 compresses everything by the same ratio
        k = np.array([0.0, 0.1, 0.7, 1.0])
        w = curvature_weight(k, alpha=3.0, beta=0.0, delta=0.2)
        assert np.allclose(w, E_INV, atol=1e-12)

    def test_monotone_in_k_for_positive_beta(self):
        k = np.linspace(0.0, 1.0, 50)
        w = curvature_weight(k, alpha=1.0, beta=2.0, delta=0.3)
        assert (np.diff(w) >= 0).all()
        assert w[0] == 0.0

    @given(st.floats(0.01, 30.0), st.floats(0.0, 10.0),
           st.floats(0.01, 1.0))
    def test_range(self, alpha, beta, delta):
        k = np.linspace(0.0, 1.0, 20)
        w = curvature_weight(k, alpha, beta, delta)
        assert (w >= 0.0).all() and (w <= 1.0).all()

    def test_delta_zero_short_circuit(self):
        w = curvature_weight(np.array([0.3]), 1.0, 1.0, delta=0.0)
        assert w[0] == 1.0


class TestBoundaryWeight:
    def test_closed_forms(self):
        rho = 0.37
        assert boundary_weight(np.array([0.0]), rho)[0] == 0.0
        w = boundary_weight(np.array([2.0 * rho]), rho)
        assert w[0] == pytest.approx(E_INV, abs=1e-12)

    def test_saturates_inside(self):
        w = boundary_weight(np.array([100.0]), 0.5)
        assert w[0] == pytest.approx(1.0, abs=1e-12)


class TestCompressNormals:
    def test_arithmetic_oracle(self):
        # [DERIVED] hand-computed blend: n=(0.6,0,0.8), w=0.5 ->
        # (0.3,0,0.9)/|(0.3,0,0.9)| = (0.31622777, 0, 0.9486833)
        out = compress_normals(np.array([[0.6, 0.0, 0.8]]), np.array([0.5]))
        assert out[0] == pytest.approx([0.31622777, 0.0, 0.9486833], abs=1e-7)

    def test_w_zero_gives_base_normal(self):
        out = compress_normals(np.array([[1.0, 0.0, 0.0]]), np.array([0.0]))
        assert np.allclose(out[0], [0, 0, 1])

    def test_w_one_identity(self):
        n = np.array([[0.6, 0.0, 0.8]])
        assert np.allclose(compress_normals(n, np.array([1.0])), n)

    def test_negative_z_flipped(self):
        out = compress_normals(np.array([[0.0, 0.6, -0.8]]), np.array([1.0]))
        assert np.allclose(out[0], [0.0, -0.6, 0.8])

    @given(st.floats(0.0, 1.0))
    def test_unit_length(self, w):
        rng = np.random.default_rng(17)
        n = rng.normal(size=(25, 3))
        n /= np.linalg.norm(n, axis=1, keepdims=True)
        out = compress_normals(n, np.full(25, w))
        assert np.allclose(np.linalg.norm(out, axis=1), 1.0, atol=1e-12)
        assert (out[:, 2] >= 0).all()


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            ReliefParams(gamma=1.0)
        with pytest.raises(ValueError):
            ReliefParams(alpha=-1.0)
        with pytest.raises(ValueError):
            ReliefParams(beta=-0.1)

    def test_defaults(self):
        p = ReliefParams()
        assert (p.alpha, p.beta, p.gamma) == (4.0, 0.01, 0.02)

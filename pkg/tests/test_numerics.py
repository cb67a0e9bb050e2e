import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import crandn
from prppsm.numerics import (
    SingularSystemError,
    frobenius_norm,
    hermitian,
    matmul,
    solve_regularized,
)


def naive_product(a, b):
    out = [[0j] * len(b[0]) for _ in range(len(a))]
    for i in range(len(a)):
        for j in range(len(b[0])):
            for k in range(len(b)):
                out[i][j] += a[i][k] * b[k][j]
    return np.array(out)


class TestMatmul:
    def test_identity(self, rng):
        m = crandn(rng, 2, 2)
        np.testing.assert_array_equal(matmul(np.eye(2), m), m)

    def test_j_squared(self):
        jj = np.array([[1j, 0], [0, 1j]])
        np.testing.assert_array_equal(matmul(jj, jj), -np.eye(2))

    def test_against_triple_loop(self, rng):
        a, b = crandn(rng, 3, 2), crandn(rng, 2, 4)
        got = matmul(a, b)
        assert got.shape == (3, 4)
        np.testing.assert_allclose(got, naive_product(a.tolist(), b.tolist()), atol=1e-14)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValueError):
            matmul(crandn(rng, 3, 2), crandn(rng, 3, 2))

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            matmul(np.array([[np.nan]]), np.eye(1))

    def test_associative(self, rng):
        a, b, c = crandn(rng, 3, 4), crandn(rng, 4, 5), crandn(rng, 5, 2)
        left, right = matmul(matmul(a, b), c), matmul(a, matmul(b, c))
        assert np.linalg.norm(left - right) <= 1e-10 * np.linalg.norm(left)


class TestHermitian:
    def test_scalar(self):
        np.testing.assert_array_equal(hermitian([[1 + 1j]]), [[1 - 1j]])

    def test_real_diagonal(self):
        d = np.diag([1.0, -2.0, 3.5])
        np.testing.assert_array_equal(hermitian(d), d)

    def test_product_rule(self, rng):
        a, b = crandn(rng, 3, 3), crandn(rng, 3, 3)
        np.testing.assert_allclose(hermitian(a @ b), hermitian(b) @ hermitian(a), atol=1e-14)

    def test_involution(self, rng):
        a = crandn(rng, 4, 2)
        np.testing.assert_array_equal(hermitian(hermitian(a)), a)


class TestFrobenius:
    def test_zero(self):
        assert frobenius_norm(np.zeros((3, 3))) == 0.0

    @pytest.mark.parametrize("theta", [0.0, 0.7, 2.0, -3.1])
    def test_unit_modulus_rows(self, theta):
        m = np.full((2, 2), np.exp(1j * theta) / np.sqrt(2))
        assert frobenius_norm(m) == pytest.approx(np.sqrt(2), abs=1e-15)

    @pytest.mark.parametrize("p", [1, 3, 8])
    def test_diagonal_times_unit_modulus(self, rng, p):
        d = np.diag(crandn(rng, p))
        phases = np.exp(2j * np.pi * rng.random((p, p))) / np.sqrt(p)
        assert frobenius_norm(d @ phases) == pytest.approx(frobenius_norm(d), rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
    def test_submultiplicative(self, n, k, m, seed):
        r = np.random.default_rng(seed)
        a, b = crandn(r, n, k), crandn(r, k, m)
        assert frobenius_norm(a @ b) <= frobenius_norm(a) * frobenius_norm(b) * (1 + 1e-12)


class TestSolveRegularized:
    def test_zero_forcing_scalar(self):
        h, y = 0.3 - 1.2j, 2.0 + 0.5j
        np.testing.assert_allclose(solve_regularized([[h]], [y], 0.0), [y / h], rtol=1e-12)

    def test_identity_with_unit_regularizer(self):
        np.testing.assert_allclose(solve_regularized([[1.0]], [2.0], 1.0), [1.0])

    @pytest.mark.parametrize("sigma2", [0.0, 1e-3, 0.5, 4.0])
    def test_normal_equation_residual(self, rng, sigma2):
        m = crandn(rng, 4, 4) + 3 * np.eye(4)
        y = crandn(rng, 4)
        x = solve_regularized(m, y, sigma2)
        mh = m.conj().T
        lhs = (mh @ m + sigma2 * np.eye(4)) @ x
        assert np.linalg.norm(lhs - mh @ y) / np.linalg.norm(mh @ y) < 1e-10

    def test_tall_system(self, rng):
        m, y = crandn(rng, 12, 5), crandn(rng, 12)
        x = solve_regularized(m, y, 0.1)
        mh = m.conj().T
        lhs = (mh @ m + 0.1 * np.eye(5)) @ x
        assert np.linalg.norm(lhs - mh @ y) / np.linalg.norm(mh @ y) < 1e-10

    def test_singular_without_regularizer(self):
        m = np.array([[1.0, 2.0], [2.0, 4.0]])
        with pytest.raises(SingularSystemError):
            solve_regularized(m, [1.0, 1.0], 0.0)

    def test_rank_deficient_ok_when_regularized(self):
        m = np.array([[1.0, 2.0], [2.0, 4.0]])
        x = solve_regularized(m, [1.0, 1.0], 0.1)
        assert np.all(np.isfinite(x))

    def test_negative_sigma2(self):
        with pytest.raises(ValueError):
            solve_regularized(np.eye(2), [1, 1], -1.0)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from combss_cpd.linalg import (
    DiagonalScaling,
    SingularSystem,
    Tridiagonal,
    gram_apply,
    mt_dense,
    mt_solve,
    prefix_sum,
    suffix_sum,
    thomas_solve,
    xtx_inverse_tridiag,
)

from conftest import design


@pytest.mark.parametrize(
    "v, expected",
    [((1, 2, 3), (1, 3, 6)), ((0, 0, 0), (0, 0, 0)), ((5,), (5,))],
)
def test_prefix_sum(v, expected):
    np.testing.assert_array_equal(prefix_sum(v), expected)


@pytest.mark.parametrize(
    "v, expected",
    [((1, 2, 3), (6, 5, 3)), ((0, 0, 1), (1, 1, 1)), ((5,), (5,))],
)
def test_suffix_sum(v, expected):
    np.testing.assert_array_equal(suffix_sum(v), expected)


@pytest.mark.parametrize(
    "v, expected",
    [((1, 1, 1), (6, 5, 3)), ((1, 0), (2, 1)), ((0, 0, 0), (0, 0, 0))],
)
def test_gram_apply(v, expected):
    np.testing.assert_array_equal(gram_apply(v), expected)


@given(arrays(np.int64, st.integers(1, 64), elements=st.integers(-1000, 1000)))
def test_structured_products_exact_on_integers(v):
    x = design(len(v))
    np.testing.assert_array_equal(prefix_sum(v), x @ v)
    np.testing.assert_array_equal(suffix_sum(v), x.T @ v)
    np.testing.assert_array_equal(gram_apply(v), x.T @ x @ v)


@given(arrays(np.float64, st.integers(1, 64), elements=st.floats(-1e3, 1e3)))
def test_structured_products_real(v):
    x = design(len(v))
    scale = 1 + np.abs(v).sum() * len(v)
    assert np.max(np.abs(gram_apply(v) - x.T @ x @ v)) <= 1e-12 * scale


def test_xtx_inverse_small_cases():
    m = xtx_inverse_tridiag(2)
    np.testing.assert_array_equal(m.diag, [1, 2])
    np.testing.assert_array_equal(m.lower, [-1])
    np.testing.assert_array_equal(m.upper, [-1])
    m1 = xtx_inverse_tridiag(1)
    np.testing.assert_array_equal(m1.diag, [1])
    assert m1.lower.size == 0 and m1.upper.size == 0


@pytest.mark.parametrize("n", list(range(1, 65)))
def test_xtx_inverse_matches_dense(n):
    x = design(n)
    prod = xtx_inverse_tridiag(n).to_dense() @ (x.T @ x)
    assert np.max(np.abs(prod - np.eye(n))) <= 1e-10


def test_tridiagonal_band_lengths_validated():
    with pytest.raises(ValueError):
        Tridiagonal(lower=[1.0], diag=[1.0, 2.0, 3.0], upper=[1.0, 1.0])
    Tridiagonal(lower=[], diag=[4.0], upper=[])


def test_thomas_identity():
    eye = Tridiagonal(np.zeros(2), np.ones(3), np.zeros(2))
    np.testing.assert_array_equal(thomas_solve(eye, [4, 5, 6]), [4, 5, 6])


def test_thomas_on_xtx_inverse():
    # the solution is (X^T X) 1, computed independently by gram_apply
    u = thomas_solve(xtx_inverse_tridiag(3), [1, 1, 1])
    np.testing.assert_allclose(u, gram_apply(np.ones(3)), atol=1e-12)
    np.testing.assert_allclose(u, [6, 5, 3], atol=1e-12)


def test_thomas_random_vs_dense(rng):
    n = 50
    lower, upper = rng.normal(size=n - 1), rng.normal(size=n - 1)
    diag = 4 + np.abs(rng.normal(size=n))
    m = Tridiagonal(lower, diag, upper)
    b = rng.normal(size=n)
    u = thomas_solve(m, b)
    np.testing.assert_allclose(u, np.linalg.solve(m.to_dense(), b), atol=1e-9)
    assert np.max(np.abs(m.matvec(u) - b)) <= 1e-8 * (1 + np.max(np.abs(b)))


def test_thomas_singular_pivot():
    m = Tridiagonal([1.0], [0.0, 1.0], [1.0])
    with pytest.raises(SingularSystem):
        thomas_solve(m, [1.0, 1.0])


def test_mt_solve_two_by_two():
    # dense M = [[2.0, 0.25], [0.25, 1.75]]
    np.testing.assert_allclose(mt_dense([0.5, 0.5]), [[2.0, 0.25], [0.25, 1.75]])
    u = mt_solve([0.5, 0.5], [1.0, 0.0])
    np.testing.assert_allclose(u, [1.75 / 3.4375, -0.25 / 3.4375], rtol=1e-13)
    np.testing.assert_allclose(u, [0.5090909090909, -0.0727272727272], atol=1e-12)


def test_mt_solve_diagonal_limit():
    n = 6
    rhs = np.zeros(n)
    rhs[0] = n
    np.testing.assert_allclose(mt_solve(np.zeros(n), rhs), np.eye(n)[0], atol=1e-12)


def test_mt_solve_random_n64(rng):
    n = 64
    t = rng.uniform(0.1, 0.9, n)
    b = rng.normal(size=n)
    ref = np.linalg.solve(mt_dense(t), b)
    assert np.linalg.norm(mt_solve(t, b) - ref) <= 1e-8 * np.linalg.norm(ref)


def test_mt_solve_near_saturation():
    # t -> 1 leaves M_t ~ X^T X, so the solve inverts X^T
    n = 40
    t = np.ones(n)
    y = np.cumsum(np.linspace(-2, 3, n))
    u = mt_solve(t, suffix_sum(y))
    np.testing.assert_allclose(u, np.diff(np.r_[0.0, y]), atol=1e-5)


def test_clamping():
    scale = DiagonalScaling.from_t([0.0, 1.0, 0.3])
    assert scale.t.min() >= 1e-8 and scale.t.max() <= 1 - 1e-8
    assert np.all(scale.d_t > 0)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(2, 64).flatmap(
        lambda n: st.tuples(
            arrays(np.float64, n, elements=st.floats(0.05, 0.95)),
            arrays(np.float64, n, elements=st.floats(-10, 10)),
        )
    )
)
def test_mt_solve_property(tb):
    t, b = tb
    m = mt_dense(t)
    np.linalg.cholesky(m)  # symmetric positive definite
    ref = np.linalg.solve(m, b)
    err = np.linalg.norm(mt_solve(t, b) - ref)
    assert err <= 1e-8 * np.linalg.norm(ref) + 1e-300

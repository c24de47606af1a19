import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparse_iht.linalg import ConvergenceError, gram, matvec, max_eigenvalue


def jacobi_eigenvalues(S, sweeps=100):
    """Cyclic Jacobi rotations; independent of the power method under test."""
    A = np.array(S, dtype=float)
    n = A.shape[0]
    for _ in range(sweeps):
        off = np.sqrt(max(np.sum(A**2) - np.sum(np.diag(A) ** 2), 0.0))
        if off < 1e-14:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(A[p, q]) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * A[p, q])
                if theta == 0:
                    t = 1.0
                elif abs(theta) > 1e100:
                    t = 1 / (2 * theta)
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta**2 + 1))
                c = 1 / np.sqrt(t**2 + 1)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q], J[q, p] = s, -s
                A = J.T @ A @ J
    return np.sort(np.diag(A))


def test_matvec_examples():
    assert matvec(np.eye(2), [3, 4]).tolist() == [3, 4]
    assert matvec([[1, 2], [3, 4]], [1, 1]).tolist() == [3, 7]
    assert matvec(np.zeros((3, 2)), [5, -1]).tolist() == [0, 0, 0]


def test_matvec_rejects_mismatch():
    with pytest.raises(ValueError):
        matvec(np.eye(2), [1, 2, 3])
    with pytest.raises(ValueError):
        matvec(np.eye(2), [1, np.nan])


def test_gram_examples():
    assert gram([[1, 1], [1, 1]]).tolist() == [[2, 2], [2, 2]]
    assert gram(np.eye(3)).tolist() == np.eye(3).tolist()
    assert np.array_equal(gram(np.diag([1.0, 2, 3])), np.diag([1.0, 4, 9]))


@pytest.mark.parametrize("S, expected", [
    (np.diag([1.0, 4, 9]), 9.0),
    ([[2.0, 2.0], [2.0, 2.0]], 4.0),
    (np.zeros((3, 3)), 0.0),
])
def test_max_eigenvalue_examples(S, expected):
    assert max_eigenvalue(S) == pytest.approx(expected, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_max_eigenvalue_matches_jacobi(seed):
    M = np.random.default_rng(seed).standard_normal((7, 5))
    S = gram(M)
    assert max_eigenvalue(S, tol=1e-10) == pytest.approx(jacobi_eigenvalues(S)[-1], rel=1e-9)


def test_jacobi_oracle_sanity():
    S = gram(np.random.default_rng(0).standard_normal((6, 4)))
    np.testing.assert_allclose(jacobi_eigenvalues(S), np.linalg.eigvalsh(S), rtol=1e-10)


def test_max_eigenvalue_is_deterministic():
    S = gram(np.random.default_rng(3).standard_normal((9, 9)))
    assert max_eigenvalue(S) == max_eigenvalue(S)


def test_max_eigenvalue_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        max_eigenvalue([[1.0, 2.0], [0.0, 1.0]])


def test_max_eigenvalue_iteration_cap():
    # nearly equal top eigenvalues converge too slowly for a 5-step cap
    S = np.diag([1.0, 0.999999, 0.5])
    with pytest.raises(ConvergenceError):
        max_eigenvalue(S, tol=1e-14, max_iter=5)


finite = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), finite, finite)
def test_matvec_linear(seed, alpha, beta):
    r = np.random.default_rng(seed)
    A, u, v = r.standard_normal((4, 3)), r.standard_normal(3), r.standard_normal(3)
    lhs = matvec(A, alpha * u + beta * v)
    rhs = alpha * matvec(A, u) + beta * matvec(A, v)
    scale = max(np.linalg.norm(lhs), np.linalg.norm(rhs), 1e-300)
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * scale + 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_gram_symmetric_psd_and_dominates_rayleigh(seed):
    r = np.random.default_rng(seed)
    G = gram(r.standard_normal((r.integers(1, 8), r.integers(1, 8))))
    assert np.array_equal(G, G.T)
    lam = max_eigenvalue(G)
    for _ in range(20):
        v = r.standard_normal(G.shape[0])
        q = v @ G @ v / (v @ v)
        assert q >= -1e-12
        assert lam >= q - 1e-9 * max(lam, 1.0)

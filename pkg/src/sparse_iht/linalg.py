"""Small dense linear algebra helpers.

Vectors and matrices are plain float64 numpy arrays. The helpers here only
validate shapes/finiteness and provide a deterministic dominant-eigenvalue
routine for the small symmetric matrices used elsewhere (at most 15x15).
"""
import numpy as np

MAX_POWER_ITERATIONS = 10_000


class ConvergenceError(RuntimeError):
    """Raised when an iterative routine exhausts its iteration cap."""


def as_vector(v, name="vector"):
    arr = np.array(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def as_matrix(a, name="matrix"):
    arr = np.array(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def matvec(a, v):
    a = as_matrix(a)
    v = as_vector(v)
    if a.shape[1] != v.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ ({v.shape[0]},)")
    return a @ v


def gram(a):
    """Return ``a.T @ a``, symmetrized so it is exactly symmetric."""
    a = as_matrix(a)
    g = a.T @ a
    return 0.5 * (g + g.T)


def max_eigenvalue(s, tol=1e-10, seed=0, max_iter=MAX_POWER_ITERATIONS):
    """Largest eigenvalue of a symmetric positive semidefinite matrix.

    Power iteration from a seeded Gaussian start vector. Iteration stops once
    the eigen-residual ``||S x - rho x||`` drops below ``tol * rho``, which for
    a symmetric matrix bounds the eigenvalue error by the same amount.

    Raises
    ------
    ValueError
        If ``s`` is not square and symmetric.
    ConvergenceError
        If the residual test is not met within ``max_iter`` iterations.
    """
    s = as_matrix(s)
    if s.shape[0] != s.shape[1]:
        raise ValueError(f"matrix must be square, got shape {s.shape}")
    scale = np.max(np.abs(s)) if s.size else 0.0
    if not np.allclose(s, s.T, rtol=0.0, atol=1e-12 * max(scale, 1.0)):
        raise ValueError("matrix must be symmetric")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if scale == 0.0:
        return 0.0

    rng = np.random.default_rng(seed)
    x = rng.standard_normal(s.shape[0])
    x /= np.linalg.norm(x)
    for _ in range(max_iter):
        y = s @ x
        rho = float(x @ y)
        y_norm = np.linalg.norm(y)
        if y_norm == 0.0:
            # start vector landed in the null space
            x = rng.standard_normal(s.shape[0])
            x /= np.linalg.norm(x)
            continue
        if np.linalg.norm(y - rho * x) <= tol * abs(rho):
            return rho
        x = y / y_norm
    raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations")

"""Restricted smoothness: Monte Carlo estimation and exact quadratic oracles."""
from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .linalg import as_matrix, gram, max_eigenvalue
from .thresholding import hard_threshold_array, min_abs_nonzero

MAX_REDRAWS = 100
MIN_STEP_NORM = 1e-12
MAX_ENUMERATED_SUBSETS = 10**6


class EstimationError(RuntimeError):
    """A Monte Carlo trial could not produce a usable pair of points."""


class DegenerateEstimateError(ValueError):
    """The estimated modulus is zero or non-finite, so no step size follows."""


@dataclass(frozen=True)
class RssEstimate:
    l_hat: float
    trials: tuple
    n_monte: int
    s: int
    seed: int

    @property
    def degenerate(self):
        return not (np.isfinite(self.l_hat) and self.l_hat > 0)


def _trial_ratio(obj, s, rng):
    n = obj.dim
    theta = rng.standard_normal(n)
    keep = rng.choice(n, size=s, replace=False)
    mask = np.zeros(n, dtype=bool)
    mask[keep] = True
    theta[~mask] = 0.0
    delta = min_abs_nonzero(theta)
    grad = obj.gradient(theta)

    for _ in range(MAX_REDRAWS + 1):
        perturbed = hard_threshold_array(theta + delta * rng.standard_normal(n), s)
        step = np.linalg.norm(perturbed - theta)
        if step >= MIN_STEP_NORM:
            return float(np.linalg.norm(obj.gradient(perturbed) - grad) / step)
    raise EstimationError(f"no usable perturbation after {MAX_REDRAWS} re-draws")


def estimate_l2s(obj, s, n_monte=100, seed=0):
    """Monte Carlo estimate of the restricted gradient-Lipschitz modulus.

    Each trial draws a standard-normal parameter vector, keeps ``s`` randomly
    chosen coordinates, perturbs it by ``delta * d`` (``delta`` being the
    smallest kept magnitude, ``d`` standard normal), hard-thresholds the
    result back to ``s`` entries and records the gradient-difference ratio.
    The estimate is the largest ratio seen.

    Trial ``j`` draws from its own stream seeded by ``(seed, j)``, so any
    prefix of trials is reproduced exactly by a smaller ``n_monte``.
    ``s == obj.dim`` gives the unrestricted (dense) estimate.
    """
    s = int(s)
    if not 1 <= s <= obj.dim:
        raise ValueError(f"sparsity level must lie in [1, {obj.dim}], got {s}")
    if n_monte < 1:
        raise ValueError("n_monte must be at least 1")
    trials = tuple(
        _trial_ratio(obj, s, np.random.default_rng([seed, j])) for j in range(n_monte)
    )
    return RssEstimate(max(trials), trials, int(n_monte), s, int(seed))


def derive_learning_rate(est):
    l_hat = est.l_hat if isinstance(est, RssEstimate) else float(est)
    if not np.isfinite(l_hat) or l_hat <= 0:
        raise DegenerateEstimateError(f"cannot derive a step size from modulus {l_hat!r}")
    return 1.0 / l_hat


def _subsets(p, k):
    k = int(k)
    if not 1 <= k <= p:
        raise ValueError(f"subset size must lie in [1, {p}], got {k}")
    if comb(p, k) > MAX_ENUMERATED_SUBSETS:
        raise ValueError(
            f"C({p}, {k}) subsets is too many to enumerate; use estimate_l2s instead"
        )
    # interlacing: a principal submatrix never has a larger top eigenvalue than
    # one containing it, so subsets of size exactly k suffice
    return combinations(range(p), k)


def exact_l2s_quadratic(X, k):
    """Largest eigenvalue of ``X_S^T X_S`` over column subsets ``|S| <= k``."""
    X = as_matrix(X, "X")
    return max(max_eigenvalue(gram(X[:, list(S)])) for S in _subsets(X.shape[1], k))


def exact_gradient_lipschitz_quadratic(X, k):
    """Largest ``||X^T X d|| / ||d||`` over nonzero ``d`` supported on ``<= k`` columns.

    This is the constant that bounds the full-gradient ratio sampled by
    :func:`estimate_l2s` for a quadratic. It is at least
    :func:`exact_l2s_quadratic`, and equal to it when ``k`` covers every column.
    """
    X = as_matrix(X, "X")
    G = gram(X)
    return max(
        np.sqrt(max_eigenvalue(gram(G[:, list(S)]))) for S in _subsets(X.shape[1], k)
    )

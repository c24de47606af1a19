"""Certificates for sparse solutions: HT-stability and epsilon-optimality."""
from dataclasses import dataclass

import numpy as np

from .thresholding import SparseVector


@dataclass(frozen=True)
class StabilityReport:
    min_abs_on_support: float
    max_grad_off_support: float
    gamma: float
    is_stable: bool
    margin: float


def check_ht_stable(theta, grad, gamma):
    """Test ``min |theta_i| (i in S) >= gamma * max |grad_j| (j not in S)``.

    ``S`` is the support of ``theta``. With an empty complement the right-hand
    side is taken as 0.
    """
    dense = theta.dense if isinstance(theta, SparseVector) else np.asarray(theta, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != dense.shape:
        raise ValueError("gradient and parameter vector differ in length")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    on = dense != 0
    if not on.any():
        raise ValueError("parameter vector has empty support")
    min_on = float(np.min(np.abs(dense[on])))
    max_off = float(np.max(np.abs(grad[~on]))) if (~on).any() else 0.0
    margin = min_on - gamma * max_off
    return StabilityReport(min_on, max_off, float(gamma), bool(margin >= 0), float(margin))


def check_eps_optimality(loss_dense, loss_sparse, eps):
    """True when the sparse loss is within ``eps`` above the dense loss."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not (np.isfinite(loss_dense) and np.isfinite(loss_sparse)):
        raise ValueError("losses must be finite")
    return bool(loss_sparse <= loss_dense + eps)

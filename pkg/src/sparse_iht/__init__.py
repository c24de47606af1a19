"""Sparse model training with iterative hard thresholding (IHT).

The step size comes from a Monte Carlo estimate of the restricted gradient
Lipschitz modulus, and converged points are certified HT-stable.
"""
from .data import load_iris, split_and_standardize
from .experiments import (
    ExperimentRecord, Protocol, SeedTriple, aggregate, run_dense_baseline,
    run_sparse_experiment, run_sweep, sparse_init,
)
from .objectives import OneLayerClassifier, QuadraticObjective, finite_diff_gradient
from .optim import IhtConfig, gd_run, iht_run
from .rss import derive_learning_rate, estimate_l2s, exact_l2s_quadratic
from .stability import check_eps_optimality, check_ht_stable
from .thresholding import hard_threshold, support_count

__version__ = "0.1.0"

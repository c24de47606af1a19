"""Iterative hard thresholding and plain gradient descent."""
import csv
from dataclasses import dataclass, field

import numpy as np

from .thresholding import SparseVector, hard_threshold_array, support_of


class DivergenceError(RuntimeError):
    def __init__(self, step, message="non-finite loss or gradient"):
        super().__init__(f"{message} at step {step}")
        self.step = step


@dataclass(frozen=True)
class IhtConfig:
    s: int
    gamma: float
    max_steps: int = 10_000
    loss_stop: float = 0.05
    # record every k-th step; 0 records only the final iterate
    trace_every: int = 1

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("sparsity level must be at least 1")
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"learning rate must be positive and finite, got {self.gamma}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.trace_every < 0:
            raise ValueError("trace_every must be non-negative")


@dataclass(frozen=True)
class TraceStep:
    k: int
    loss: float
    grad_norm: float
    support: tuple
    changed: bool


@dataclass
class IhtTrace:
    steps: list = field(default_factory=list)
    losses: list = field(default_factory=list)
    final_theta: np.ndarray = None
    final_grad: np.ndarray = None
    stop_reason: str = ""
    steps_taken: int = 0

    @property
    def final_loss(self):
        return self.losses[-1]


def _iterate(obj, theta, gamma, max_steps, loss_stop, trace_every, project):
    trace = IhtTrace()
    prev_support = support_of(theta)
    k = 0
    while True:
        loss, grad = obj.value_and_gradient(theta)
        if not (np.isfinite(loss) and np.all(np.isfinite(grad))):
            raise DivergenceError(k)
        support = support_of(theta)
        changed = k > 0 and support != prev_support
        prev_support = support
        trace.losses.append(loss)

        if loss <= loss_stop:
            trace.stop_reason = "loss_stop"
        elif k >= max_steps:
            trace.stop_reason = "max_steps"
        done = bool(trace.stop_reason)

        if (trace_every and k % trace_every == 0) or done:
            trace.steps.append(TraceStep(k, loss, float(np.linalg.norm(grad)), support, changed))
        if done:
            trace.final_theta = theta
            trace.final_grad = grad
            trace.steps_taken = k
            return trace

        theta = project(theta - gamma * grad)
        k += 1


def iht_run(obj, theta0, cfg):
    """Run IHT from a sparse start until the loss stop or the step cap.

    ``theta0`` may be a :class:`SparseVector` or a plain array with at most
    ``cfg.s`` nonzeros. Magnitude ties inside a step keep the smaller index.
    Returns the final iterate as a :class:`SparseVector` and the trace.
    """
    dense = theta0.dense if isinstance(theta0, SparseVector) else np.asarray(theta0, dtype=np.float64)
    if dense.shape != (obj.dim,):
        raise ValueError(f"initial point must have length {obj.dim}")
    if not 1 <= cfg.s <= obj.dim:
        raise ValueError(f"sparsity level must lie in [1, {obj.dim}]")
    if np.count_nonzero(dense) > cfg.s:
        raise ValueError(f"initial point has more than {cfg.s} nonzeros")
    trace = _iterate(
        obj, dense.copy(), cfg.gamma, cfg.max_steps, cfg.loss_stop, cfg.trace_every,
        lambda v: hard_threshold_array(v, cfg.s),
    )
    return SparseVector.from_dense(trace.final_theta, cfg.s), trace


def gd_run(obj, theta0, gamma, max_steps=10_000, loss_stop=0.05, trace_every=1):
    """Plain full-gradient descent with the same stopping rules as IHT."""
    if not (np.isfinite(gamma) and gamma > 0):
        raise ValueError(f"learning rate must be positive and finite, got {gamma}")
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    theta0 = np.array(theta0, dtype=np.float64)
    if theta0.shape != (obj.dim,):
        raise ValueError(f"initial point must have length {obj.dim}")
    trace = _iterate(obj, theta0, gamma, max_steps, loss_stop, trace_every, lambda v: v)
    return trace.final_theta, trace


TRACE_COLUMNS = ["step", "loss", "grad_norm", "support", "changed"]


def write_trace_csv(path, trace):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for st in trace.steps:
            writer.writerow([
                st.k, f"{st.loss:.9g}", f"{st.grad_norm:.9g}",
                " ".join(str(i) for i in st.support), int(st.changed),
            ])

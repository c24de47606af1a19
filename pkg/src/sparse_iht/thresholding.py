"""Hard thresholding and support bookkeeping."""
from dataclasses import dataclass
from math import comb

import numpy as np

from .linalg import as_vector

INT64_MAX = 2**63 - 1


def support_of(v):
    """Sorted tuple of indices where ``v`` is nonzero."""
    return tuple(int(i) for i in np.flatnonzero(np.asarray(v)))


@dataclass(frozen=True, eq=False)
class SparseVector:
    """A dense vector together with its support and the sparsity budget."""

    dense: np.ndarray
    support: tuple
    s: int

    def __post_init__(self):
        if len(self.support) > self.s:
            raise ValueError(f"support of size {len(self.support)} exceeds budget {self.s}")
        self.dense.setflags(write=False)

    @classmethod
    def from_dense(cls, v, s):
        v = as_vector(v)
        return cls(v, support_of(v), int(s))

    @property
    def nnz(self):
        return len(self.support)

    def __len__(self):
        return self.dense.shape[0]


def hard_threshold_array(v, s):
    """Keep the ``s`` largest-magnitude entries of ``v``; ties keep the smaller index.

    Works on a raw array without validation, for use inside iteration loops.
    """
    n = v.shape[0]
    if s >= n:
        return v.copy()
    # lexsort sorts by the last key first: descending magnitude, then ascending index
    keep = np.lexsort((np.arange(n), -np.abs(v)))[:s]
    out = np.zeros_like(v)
    out[keep] = v[keep]
    return out


def hard_threshold(v, s):
    """The hard-thresholding operator H_s.

    Returns a :class:`SparseVector` holding the best s-term approximation of
    ``v``. When ``v`` has fewer than ``s`` nonzeros it is returned unchanged.
    """
    v = as_vector(v)
    s = int(s)
    if not 1 <= s <= v.shape[0]:
        raise ValueError(f"sparsity level must lie in [1, {v.shape[0]}], got {s}")
    return SparseVector.from_dense(hard_threshold_array(v, s), s)


def support_count(n, s):
    """Number of distinct supports of size ``s`` among ``n`` coordinates."""
    if not 1 <= s < n:
        raise ValueError(f"need 1 <= s < n, got n={n}, s={s}")
    count = comb(n, s)
    if count > INT64_MAX:
        raise OverflowError(f"C({n}, {s}) exceeds the 64-bit integer range")
    return count


def min_abs_nonzero(v):
    v = np.abs(as_vector(v))
    nz = v[v != 0]
    if nz.size == 0:
        raise ValueError("vector has no nonzero entries")
    return float(nz.min())

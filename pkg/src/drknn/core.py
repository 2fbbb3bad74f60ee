"""Domain types, ground costs and risk functionals.

Conventions used across the package:

* class labels are 1-based integers ``1..M`` (matching the on-disk format);
* sample indices are 0-based positions into a :class:`Dataset`;
* a family of ``M`` distributions over ``n`` support points is an ``(M, n)``
  array, a randomized classifier on the support is an ``(n, M)`` array.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

SIMPLEX_TOL = 1e-9
TIE_TOL = 1e-9   # relative; values this close to the maximum count as tied


class DimensionError(ValueError):
    """Feature vectors of inconsistent dimension."""

    def __init__(self, index: int, expected: int, got: int):
        self.index = index
        super().__init__(
            f"sample {index} has dimension {got}, expected {expected}")


class EmptyClassError(ValueError):
    """A class in ``1..M`` has no samples."""

    def __init__(self, label: int):
        self.label = label
        super().__init__(f"class {label} has no samples")


@dataclass(frozen=True)
class LabeledSample:
    features: np.ndarray
    label: int

    def __post_init__(self):
        x = np.asarray(self.features, dtype=float).reshape(-1)
        if not np.all(np.isfinite(x)):
            raise ValueError("feature entries must be finite")
        if int(self.label) < 1:
            raise ValueError(f"label {self.label} outside 1..M")
        x.setflags(write=False)
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "label", int(self.label))


@dataclass(frozen=True)
class Dataset:
    """Feature matrix ``(n, d)`` with 1-based labels in ``1..class_count``.

    Arrays are copied and marked read-only on construction.
    """

    features: np.ndarray
    labels: np.ndarray
    class_count: int = field(default=0)

    def __post_init__(self):
        x = np.array(self.features, dtype=float)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2:
            raise ValueError("features must be a 2-d array")
        y = np.array(self.labels).reshape(-1)
        if y.size and not np.all(np.equal(np.mod(y, 1), 0)):
            raise ValueError("labels must be integers")
        y = y.astype(int)
        if len(y) != len(x):
            raise ValueError(
                f"{len(x)} feature rows but {len(y)} labels")
        if len(x) == 0:
            raise ValueError("dataset must contain at least one sample")
        bad = np.flatnonzero(~np.all(np.isfinite(x), axis=1))
        if bad.size:
            raise ValueError(f"sample {bad[0]} has non-finite features")
        M = int(self.class_count) or int(y.max())
        if y.min() < 1 or y.max() > M:
            raise ValueError(f"labels must lie in 1..{M}")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "class_count", M)

    @classmethod
    def from_samples(cls, samples: Sequence[LabeledSample],
                     class_count: int = 0) -> "Dataset":
        if not samples:
            raise ValueError("dataset must contain at least one sample")
        d = len(samples[0].features)
        for i, s in enumerate(samples):
            if len(s.features) != d:
                raise DimensionError(i, d, len(s.features))
        return cls(np.stack([s.features for s in samples]),
                   np.array([s.label for s in samples]), class_count)

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, i: int) -> LabeledSample:
        return LabeledSample(self.features[i], self.labels[i])

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def subset(self, index) -> "Dataset":
        index = np.asarray(index, dtype=int)
        return Dataset(self.features[index], self.labels[index],
                       self.class_count)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.class_count + 1)[1:]


def euclidean_cost(dataset, other=None) -> np.ndarray:
    """Pairwise Euclidean distances.

    With one argument returns the symmetric ``(n, n)`` cost matrix of the
    dataset's support (exact zeros on the diagonal). With two, the
    ``(len(dataset), len(other))`` cross-distance matrix.
    """
    a = _as_features(dataset)
    b = a if other is None else _as_features(other)
    if b.shape[1] != a.shape[1]:
        raise DimensionError(0, a.shape[1], b.shape[1])
    diff = a[:, None, :] - b[None, :, :]
    cost = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    if other is None:
        np.fill_diagonal(cost, 0.0)
    return cost


def validate_cost(cost, atol: float = 1e-12) -> np.ndarray:
    """Check a user supplied ground-cost matrix and return it as an array.

    The triangle inequality is not required.
    """
    c = np.asarray(cost, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {c.shape}")
    if not np.all(np.isfinite(c)) or np.any(c < 0):
        raise ValueError("cost entries must be finite and nonnegative")
    if np.any(np.abs(np.diag(c)) > atol):
        raise ValueError("cost matrix must have a zero diagonal")
    if not np.allclose(c, c.T, rtol=0, atol=atol):
        raise ValueError("cost matrix must be symmetric")
    return c


def satisfies_triangle_inequality(cost, atol: float = 1e-12) -> bool:
    c = np.asarray(cost, dtype=float)
    for k in range(len(c)):  # one intermediate point at a time keeps memory O(n^2)
        if np.any(c > c[:, k, None] + c[None, k, :] + atol):
            return False
    return True


def empirical_distributions(dataset: Dataset) -> np.ndarray:
    """Uniform mass over each class's members, as an ``(M, n)`` array."""
    counts = dataset.class_counts()
    for m, c in enumerate(counts, start=1):
        if c == 0:
            raise EmptyClassError(m)
    onehot = dataset.labels[None, :] == np.arange(1, dataset.class_count + 1)[:, None]
    return onehot / counts[:, None]


def check_distributions(dists, n: int | None = None) -> np.ndarray:
    """Validate an ``(M, n)`` stack of probability vectors.

    Rows within :data:`SIMPLEX_TOL` of summing to one are renormalized;
    anything further off is rejected.
    """
    p = np.atleast_2d(np.asarray(dists, dtype=float))
    if p.ndim != 2:
        raise ValueError("distributions must be an (M, n) array")
    if n is not None and p.shape[1] != n:
        raise ValueError(f"distributions cover {p.shape[1]} points, expected {n}")
    if np.any(p < -SIMPLEX_TOL) or not np.all(np.isfinite(p)):
        raise ValueError("distribution entries must be finite and nonnegative")
    sums = p.sum(axis=1)
    off = np.abs(sums - 1.0) > SIMPLEX_TOL
    if np.any(off):
        m = int(np.flatnonzero(off)[0])
        raise ValueError(f"distribution {m + 1} sums to {sums[m]!r}, not 1")
    p = np.clip(p, 0.0, None)
    return p / p.sum(axis=1, keepdims=True)


def check_assignment(pi, n: int | None = None, M: int | None = None) -> np.ndarray:
    """Validate an ``(n, M)`` randomized classifier on the support."""
    a = np.asarray(pi, dtype=float)
    if a.ndim != 2:
        raise ValueError("classifier assignment must be an (n, M) array")
    if (n is not None and a.shape[0] != n) or (M is not None and a.shape[1] != M):
        raise ValueError(f"classifier assignment has shape {a.shape}, expected ({n}, {M})")
    check_distributions(a)
    return a


def risk(pi, dists) -> float:
    """Total error probability ``sum_m E_{P_m}[1 - pi_m]``.

    ``pi`` is ``(n, M)``, ``dists`` is ``(M, n)``.
    """
    p = check_distributions(dists)
    a = check_assignment(pi, n=p.shape[1], M=p.shape[0])
    return float(np.sum(p * (1.0 - a.T)))


def tied_with_max(values, axis: int = -1) -> np.ndarray:
    """Mask of entries within :data:`TIE_TOL` (relative) of the maximum along ``axis``.

    Solver output carries round-off, so mathematically equal masses rarely
    compare equal; this keeps the tie rules deterministic.
    """
    v = np.asarray(values, dtype=float)
    top = v.max(axis=axis, keepdims=True)
    return v >= top - TIE_TOL * np.abs(top)


def argmax_assignment(dists, uniform_ties: bool = True) -> np.ndarray:
    """Deterministic max-likelihood classifier on the support.

    Each row puts its mass on ``argmax_m dists[m, i]``. Tied rows spread
    mass uniformly over the tie set when ``uniform_ties`` is true, otherwise
    all of it goes to the lowest tied class.
    """
    p = np.asarray(dists, dtype=float)
    M, n = p.shape
    tied = tied_with_max(p.T, axis=1)
    if uniform_ties:
        return tied / tied.sum(axis=1, keepdims=True)
    out = np.zeros((n, M))
    out[np.arange(n), np.argmax(tied, axis=1)] = 1.0
    return out


def minimal_risk(dists) -> tuple[float, np.ndarray]:
    """Closed-form Bayes risk on a finite support and its optimal classifier.

    Returns ``M - sum_i max_m P_m(xi_i)`` and the max-likelihood assignment
    (ties shared uniformly, which does not change the risk).
    """
    p = check_distributions(dists)
    value = p.shape[0] - float(p.max(axis=0).sum())
    return value, argmax_assignment(p)


def total_margin(dists) -> float:
    """``sum_i sum_m (max_m' p_m'^i - p_m^i)``."""
    p = np.asarray(dists, dtype=float)
    return float(np.sum(p.max(axis=0)[None, :] - p))


def _as_features(data) -> np.ndarray:
    if isinstance(data, Dataset):
        return data.features
    x = np.asarray(data, dtype=float)
    return x.reshape(1, -1) if x.ndim == 1 else x

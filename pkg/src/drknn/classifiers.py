"""Query-time decision rules.

Every ``*_votes`` function accepts a single query vector or a ``(q, d)``
batch and returns ``(M,)`` or ``(q, M)`` votes accordingly. Training data is
a :class:`~drknn.core.Dataset` or a bare ``(n, d)`` feature array where
labels are not needed. Weight matrices are ``(M, n)``: row ``m`` holds the
class-``m`` mass on each training point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .core import Dataset, DimensionError, euclidean_cost, tied_with_max


def _features(train) -> np.ndarray:
    return train.features if isinstance(train, Dataset) else np.atleast_2d(
        np.asarray(train, dtype=float))


def _queries(query, d: int) -> tuple[np.ndarray, bool]:
    q = np.asarray(query, dtype=float)
    single = q.ndim == 1
    q = np.atleast_2d(q)
    if q.shape[1] != d:
        raise DimensionError(0, d, q.shape[1])
    return q, single


def _out(votes: np.ndarray, single: bool) -> np.ndarray:
    return votes[0] if single else votes


def _check_k(k: int, n: int):
    if not 1 <= k <= n:
        raise ValueError(f"k = {k} outside 1..{n}")


def neighbor_order(query, train, cost_fn=euclidean_cost) -> np.ndarray:
    """Training indices sorted by distance to the query, ties by ascending index."""
    X = _features(train)
    q, single = _queries(query, X.shape[1])
    dist = cost_fn(q, X)
    return _out(np.argsort(dist, axis=1, kind="stable"), single)


def classify(votes) -> np.ndarray | int:
    """1-based argmax of the votes, lowest class on ties.

    Votes within a relative 1e-9 of the maximum count as tied.
    """
    first = np.argmax(tied_with_max(votes, axis=-1), axis=-1)
    return int(first) + 1 if np.ndim(first) == 0 else first + 1


def drknn_votes(query, train, lfd_weights, k: int) -> np.ndarray:
    """Average LFD mass of the ``k`` nearest training points, per class."""
    X = _features(train)
    W = np.asarray(lfd_weights, dtype=float)
    _check_k(k, X.shape[0])
    order = np.atleast_2d(neighbor_order(query, X))[:, :k]
    votes = W[:, order].mean(axis=2).T
    return _out(votes, np.asarray(query).ndim == 1)


def vanilla_knn_votes(query, train: Dataset, k: int) -> np.ndarray:
    """Fraction of the ``k`` nearest neighbours carrying each label."""
    _check_k(k, len(train))
    order = np.atleast_2d(neighbor_order(query, train))[:, :k]
    onehot = train.labels[order][:, :, None] == np.arange(1, train.class_count + 1)
    return _out(onehot.mean(axis=1), np.asarray(query).ndim == 1)


def inverse_distance_votes(query, train: Dataset, k: int) -> np.ndarray:
    """Sum of ``1 / distance`` over the ``k`` nearest neighbours of each class.

    A neighbour at distance zero dominates: the vote becomes the one-hot
    vector of its label (the lowest-index such neighbour if several).
    """
    _check_k(k, len(train))
    X = train.features
    q, single = _queries(query, X.shape[1])
    dist = euclidean_cost(q, X)
    order = np.argsort(dist, axis=1, kind="stable")[:, :k]
    d_k = np.take_along_axis(dist, order, axis=1)
    lab = train.labels[order]
    M = train.class_count
    onehot = lab[:, :, None] == np.arange(1, M + 1)
    with np.errstate(divide="ignore"):
        inv = 1.0 / d_k
    exact = d_k[:, 0] == 0
    inv[exact] = 0.0
    votes = np.einsum("qk,qkm->qm", inv, onehot.astype(float))
    votes[exact] = onehot[exact, 0].astype(float)
    return _out(votes, single)


def kernel_votes(query, train, lfd_weights, bandwidth: float) -> np.ndarray:
    """Gaussian-kernel smoothing of the LFD masses.

    ``votes[m] = sum_i W[m, i] * (2 pi h)^(-d/2) exp(-|x - xi_i|^2 / (2 h))``.
    These underflow to zero far from the data at small ``h``; decide with
    :func:`kernel_log_votes` instead.
    """
    if not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    X = _features(train)
    q, single = _queries(query, X.shape[1])
    d = X.shape[1]
    sq = euclidean_cost(q, X) ** 2
    kern = (2 * np.pi * bandwidth) ** (-d / 2) * np.exp(-sq / (2 * bandwidth))
    return _out(kern @ np.asarray(lfd_weights, dtype=float).T, single)


def kernel_log_votes(query, train, lfd_weights, bandwidth: float) -> np.ndarray:
    """Log of :func:`kernel_votes` without the normalizing constant.

    Same argmax as :func:`kernel_votes` wherever that one is not flushed to
    zero; classes with no mass get ``-inf``.
    """
    if not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    X = _features(train)
    q, single = _queries(query, X.shape[1])
    W = np.asarray(lfd_weights, dtype=float)
    a = -euclidean_cost(q, X) ** 2 / (2 * bandwidth)
    with np.errstate(divide="ignore"):
        out = logsumexp(a[:, None, :], b=W[None, :, :], axis=2)
    return _out(out, single)


def sample_entropy(lfd_weights, i: int) -> float:
    """Entropy (nats) of training point ``i``'s normalized class masses."""
    col = np.asarray(lfd_weights, dtype=float)[:, i]
    total = col.sum()
    if total <= 0:
        return 0.0
    p = col[col > 0] / total
    return abs(float(np.sum(p * np.log(p))))  # avoids -0.0 for pure columns


@dataclass(frozen=True)
class TruncatedSet:
    kept_indices: np.ndarray
    tau: float
    normalized_entropy: np.ndarray


def truncate(lfd_weights, tau: float) -> TruncatedSet:
    """Keep training points whose min-max normalized entropy is at least ``tau``.

    If every point has the same entropy all of them are kept.
    """
    if not 0 <= tau <= 1:
        raise ValueError("tau must lie in [0, 1]")
    W = np.asarray(lfd_weights, dtype=float)
    H = np.array([sample_entropy(W, i) for i in range(W.shape[1])])
    lo, hi = H.min(), H.max()
    if hi - lo <= 0:
        norm = np.ones_like(H)
    else:
        norm = (H - lo) / (hi - lo)
    return TruncatedSet(np.flatnonzero(norm >= tau), float(tau), norm)


def truncated_drknn_votes(query, train, lfd_weights, k: int,
                          truncated: TruncatedSet) -> np.ndarray:
    keep = truncated.kept_indices
    if len(keep) == 0:
        raise ValueError("truncated set is empty")
    if k > len(keep):
        raise ValueError(f"k = {k} exceeds the {len(keep)} retained points")
    X = _features(train)[keep]
    W = np.asarray(lfd_weights, dtype=float)[:, keep]
    return drknn_votes(query, X, W, k)

"""Fixed linear feature maps for the PCA+kNN and SVD+kNN baselines."""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .core import Dataset, DimensionError

RANK_TOL = 1e-10


@dataclass(frozen=True)
class LinearEmbedding:
    """``x -> projection.T @ (x - mean)`` with orthonormal projection columns."""

    mean: np.ndarray             # (d,)
    projection: np.ndarray       # (d, r)
    variance_explained: np.ndarray
    rank_deficient: bool = False

    @property
    def dim_in(self) -> int:
        return self.projection.shape[0]

    @property
    def dim_out(self) -> int:
        return self.projection.shape[1]


def _fix_signs(V: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of each column made positive; near-ties go to
    # the first such entry so rounding noise cannot flip the sign
    A = np.abs(V)
    idx = np.argmax(A >= A.max(axis=0) * (1 - 1e-9), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def _fit(X: np.ndarray, r: int, center: bool) -> LinearEmbedding:
    n, d = X.shape
    if not 1 <= r <= min(n, d):
        raise ValueError(f"r = {r} outside 1..{min(n, d)}")
    mean = X.mean(axis=0) if center else np.zeros(d)
    _, s, Vt = np.linalg.svd(X - mean, full_matrices=False)
    rank = int(np.sum(s > RANK_TOL * max(1.0, s[0] if s.size else 0.0)))
    keep = min(r, rank)
    V = _fix_signs(Vt[:keep].T)
    var = s[:keep] ** 2 / max(n - 1, 1)
    return LinearEmbedding(mean, V, var, rank_deficient=keep < r)


def fit_pca(train, r: int) -> LinearEmbedding:
    """Top-``r`` principal directions of the centered training features.

    When the centered data has rank below ``r`` only the available
    components are returned and ``rank_deficient`` is set.
    """
    return _fit(_X(train), r, center=True)


def fit_svd(train, r: int) -> LinearEmbedding:
    """Like :func:`fit_pca` but on the raw, uncentered data (``mean = 0``)."""
    return _fit(_X(train), r, center=False)


def transform(emb: LinearEmbedding, samples):
    X = _X(samples)
    if X.shape[1] != emb.dim_in:
        raise DimensionError(0, emb.dim_in, X.shape[1])
    Z = (X - emb.mean) @ emb.projection
    if isinstance(samples, Dataset):
        return Dataset(Z, samples.labels, samples.class_count)
    return Z


def standardize(train) -> tuple[np.ndarray, np.ndarray]:
    """Per-feature mean and scale for z-scoring; constant features keep scale 1."""
    X = _X(train)
    mu = X.mean(axis=0)
    sd = X.std(axis=0, ddof=1) if len(X) > 1 else np.ones(X.shape[1])
    sd = np.where(sd > 0, sd, 1.0)
    return mu, sd


def _X(data) -> np.ndarray:
    return data.features if isinstance(data, Dataset) else np.atleast_2d(
        np.asarray(data, dtype=float))


# Text format: one block per matrix,
#
#   # <name> <rows> <cols>
#   <row 0 values, space separated>
#   ...
#
# blocks "mean" (1 x d), "projection" (d x r), "variance_explained" (1 x r),
# then a "# rank_deficient <0|1>" line. Values are written with repr(),
# which round-trips doubles exactly.

def dumps_embedding(emb: LinearEmbedding) -> str:
    out = io.StringIO()
    out.write("# drknn-linear-embedding 1\n")
    for name, mat in (("mean", emb.mean[None, :]), ("projection", emb.projection),
                      ("variance_explained", emb.variance_explained[None, :])):
        out.write(f"# {name} {mat.shape[0]} {mat.shape[1]}\n")
        for row in mat:
            out.write(" ".join(repr(float(v)) for v in row) + "\n")
    out.write(f"# rank_deficient {int(emb.rank_deficient)}\n")
    return out.getvalue()


def loads_embedding(text: str) -> LinearEmbedding:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# drknn-linear-embedding"):
        raise ValueError("not a linear-embedding document")
    blocks, flag, i = {}, False, 1
    while i < len(lines):
        head = lines[i].split()
        if head[:2] == ["#", "rank_deficient"]:
            flag = bool(int(head[2]))
            i += 1
            continue
        name, rows, cols = head[1], int(head[2]), int(head[3])
        body = [[float(v) for v in ln.split()] for ln in lines[i + 1:i + 1 + rows]]
        mat = np.array(body, dtype=float).reshape(rows, cols)
        blocks[name] = mat
        i += 1 + rows
    return LinearEmbedding(blocks["mean"][0], blocks["projection"],
                           blocks["variance_explained"][0], flag)


def save_embedding(emb: LinearEmbedding, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_embedding(emb))


def load_embedding(path) -> LinearEmbedding:
    with open(path) as fh:
        return loads_embedding(fh.read())

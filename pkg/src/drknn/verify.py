"""Brute-force oracles for tiny instances.

None of these share code with :mod:`drknn.lfd`. Wasserstein distances come
from enumerating the vertices (spanning-tree bases) of the transportation
polytope. The LFD objective is minimized over a simplex grid.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import Dataset, empirical_distributions, euclidean_cost, minimal_risk

MAX_TRANSPORT_N = 4


@dataclass(frozen=True)
class GridSpec:
    resolution: float = 0.05
    max_n: int = 4
    max_M: int = 3

    def __post_init__(self):
        if not self.resolution > 0:
            raise ValueError("grid resolution must be positive")
        steps = 1.0 / self.resolution
        if abs(steps - round(steps)) > 1e-12 * max(1.0, steps):
            raise ValueError(f"resolution {self.resolution} does not divide 1")

    @property
    def steps(self) -> int:
        return int(round(1.0 / self.resolution))


class InstanceTooLarge(ValueError):
    pass


@lru_cache(maxsize=None)
def _tree_solvers(n: int):
    """Spanning trees of K_{n,n} and the maps from marginals to tree flows.

    Returns ``(cells, solve)`` where ``cells[t]`` lists the ``2n - 1`` flat
    cell indices of tree ``t`` and ``solve[t] @ concat(P, Q)`` gives the
    flows on those cells.
    """
    ncell = n * n
    A = np.zeros((2 * n, ncell))
    for i in range(n):
        for j in range(n):
            A[i, i * n + j] = 1.0       # row sums = P
            A[n + j, i * n + j] = 1.0   # column sums = Q
    cells, solve = [], []
    for subset in itertools.combinations(range(ncell), 2 * n - 1):
        # union-find over the 2n vertices
        parent = list(range(2 * n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        tree = True
        for cell in subset:
            a, b = find(cell // n), find(n + cell % n)
            if a == b:
                tree = False
                break
            parent[a] = b
        if not tree:
            continue
        cells.append(subset)
        solve.append(np.linalg.pinv(A[:, subset]))
    return np.array(cells), np.stack(solve)


def _wasserstein_batch(P, Q, cost) -> np.ndarray:
    """Exact W1 from each row of ``P`` (shape ``(B, n)``) to ``Q``."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = np.asarray(Q, dtype=float)
    c = np.asarray(cost, dtype=float)
    n = Q.shape[0]
    if n == 1:
        return np.zeros(len(P))
    if n == 2:
        return np.abs(P[:, 0] - Q[0]) * c[0, 1]
    cells, solve = _tree_solvers(n)
    T, k, _ = solve.shape
    S = solve.reshape(T * k, 2 * n).T
    tree_cost = c.reshape(-1)[cells]
    marg = np.concatenate([P, np.broadcast_to(Q, P.shape)], axis=1)  # (B, 2n)
    out = np.empty(len(P))
    for lo in range(0, len(P), 64):
        flows = (marg[lo:lo + 64] @ S).reshape(-1, T, k)
        feasible = np.all(flows >= -1e-12, axis=2)
        costs = np.einsum("btk,tk->bt", flows, tree_cost)
        out[lo:lo + 64] = np.where(feasible, costs, np.inf).min(axis=1)
    return out


def wasserstein_exact_small(P, Q, cost) -> float:
    """Exact Wasserstein-1 distance between two distributions on ``n <= 4`` points."""
    P = np.asarray(P, dtype=float)
    if P.shape[0] > MAX_TRANSPORT_N:
        raise InstanceTooLarge(f"n = {P.shape[0]} exceeds {MAX_TRANSPORT_N}")
    return float(_wasserstein_batch(P[None, :], Q, cost)[0])


def simplex_grid(n: int, steps: int) -> np.ndarray:
    """All points of the ``n``-simplex whose coordinates are multiples of ``1/steps``."""
    pts = []
    for bars in itertools.combinations(range(steps + n - 1), n - 1):
        edges = (-1,) + bars + (steps + n - 1,)
        pts.append([edges[k + 1] - edges[k] - 1 for k in range(n)])
    return np.array(pts, dtype=int)


def brute_force_lfd(cost, empirical, radii, grid: GridSpec = GridSpec()) -> dict:
    """Grid-search minimum of ``sum_i max_m p_m^i`` over the Wasserstein balls.

    Each class's feasible grid points are found by exact transport. The
    coupling over classes is resolved on an integer lattice of epigraph
    levels ``t``. Class ``m`` admits ``t`` when some feasible ``p_m <= t``;
    that is a cumulative OR of the feasible indicator along every axis.
    Returns ``{"objective", "certificate"}`` where the certificate is an
    ``(M, n)`` array of grid LFDs attaining the objective.
    """
    P = np.asarray(empirical, dtype=float)
    c = np.asarray(cost, dtype=float)
    M, n = P.shape
    if n > grid.max_n or M > grid.max_M:
        raise InstanceTooLarge(f"(n, M) = ({n}, {M}) exceeds ({grid.max_n}, {grid.max_M})")
    r = np.broadcast_to(np.asarray(radii, dtype=float), (M,))
    steps = grid.steps
    pts = simplex_grid(n, steps)
    shape = (steps + 1,) * n

    admits = np.ones(shape, dtype=bool)
    feasible_pts = []
    off = c[~np.eye(n, dtype=bool)]
    c_lo, c_hi = off.min(), off.max()
    for m in range(M):
        # c_lo * TV <= W1 <= c_hi * TV; only the ambiguous band needs exact transport
        tv = 0.5 * np.abs(pts / steps - P[m]).sum(axis=1)
        inside = c_hi * tv <= r[m]
        unsure = ~inside & (c_lo * tv <= r[m] + 1e-12)
        if np.any(unsure):
            w = _wasserstein_batch(pts[unsure] / steps, P[m], c)
            inside[np.flatnonzero(unsure)[w <= r[m] + 1e-12]] = True
        ok = pts[inside]
        if len(ok) == 0:
            return {"objective": float("inf"), "certificate": None}
        feasible_pts.append(ok)
        up = np.zeros(shape, dtype=bool)
        up[tuple(ok.T)] = True
        for axis in range(n):
            up = np.logical_or.accumulate(up, axis=axis)
        admits &= up

    levels = np.indices(shape).sum(axis=0)
    best = np.where(admits, levels, np.iinfo(int).max)
    flat = int(np.argmin(best))
    t = np.array(np.unravel_index(flat, shape))
    cert = np.stack([ok[np.all(ok <= t, axis=1)][0] for ok in feasible_pts]) / steps
    return {"objective": best.flat[flat] / steps, "certificate": cert}


def exhaustive_classifier_risk(dists, deterministic_only: bool = True) -> float:
    """Minimum risk over all ``M**n`` deterministic assignments.

    Only deterministic enumeration is supported: the per-point problem is
    linear over the simplex, so a vertex is always optimal.
    """
    if not deterministic_only:
        raise NotImplementedError("only deterministic enumeration is supported")
    p = np.asarray(dists, dtype=float)
    M, n = p.shape
    if n > 6:
        raise InstanceTooLarge(f"n = {n} exceeds 6")
    choices = np.array(list(itertools.product(range(M), repeat=n)))  # (M**n, n)
    kept = p[choices, np.arange(n)].sum(axis=1)
    return float(M - kept.max())


def tiny_suite(seed: int = 0, size: int = 24) -> list[dict]:
    """Random tiny instances (``n <= 4``, ``M <= 3``) with grid-friendly masses.

    Class sizes are restricted to 1, 2 or 4 so empirical masses lie on a
    0.05 grid.
    """
    rng = np.random.default_rng(seed)
    shapes = [(2, 2, (1, 1)), (3, 2, (1, 2)), (4, 2, (2, 2)), (3, 3, (1, 1, 1)),
              (4, 3, (1, 1, 2))]
    out = []
    for k in range(size):
        n, M, sizes = shapes[k % len(shapes)]
        labels = np.repeat(np.arange(1, M + 1), sizes)
        rng.shuffle(labels)
        ds = Dataset(rng.uniform(0, 1, size=(n, 2)), labels, M)
        radius = float(rng.choice([0.0, 0.05, 0.1, 0.2, 0.4]))
        out.append({"dataset": ds, "radii": np.full(M, radius)})
    return out


def run_checks(seed: int = 0, grid: GridSpec | None = None, size: int = 24) -> list[dict]:
    """Run every oracle against the solvers on :func:`tiny_suite`.

    Returns one row per check with ``name``, ``passed`` and ``detail``.
    """
    from .lfd import solve_lfd

    rows = []
    rng = np.random.default_rng(seed)
    for k, inst in enumerate(tiny_suite(seed, size)):
        ds, r = inst["dataset"], inst["radii"]
        M, n = ds.class_count, len(ds)
        g = grid or GridSpec(0.01 if (M == 2 and n == 2) else 0.05)
        c, P = euclidean_cost(ds), empirical_distributions(ds)
        sol = solve_lfd(c, P, r)
        bf = brute_force_lfd(c, P, r, g)
        diff = abs(sol.objective - bf["objective"])
        bound = M * n * g.resolution
        rows.append({"name": f"lfd_oracle[{k}] n={n} M={M} radius={r[0]:g}",
                     "passed": bool(diff <= bound),
                     "detail": f"|{sol.objective:.6f} - {bf['objective']:.6f}| <= {bound:g}"})
        w = [wasserstein_exact_small(sol.lfds[m], P[m], c) for m in range(M)]
        excess = max(w[m] - r[m] for m in range(M))
        rows.append({"name": f"lfd_budget[{k}]",
                     "passed": bool(excess <= 1e-8),
                     "detail": f"max W(p_m, Phat_m) - radius_m = {excess:.2e}"})
    for k in range(50):
        M = int(rng.integers(2, 4))
        n = int(rng.integers(1, 7))
        p = rng.dirichlet(np.ones(n), size=M)
        ex = exhaustive_classifier_risk(p)
        cf, _ = minimal_risk(p)
        rows.append({"name": f"classifier_enumeration[{k}] n={n} M={M}",
                     "passed": bool(abs(ex - cf) <= 1e-12),
                     "detail": f"|{ex:.12f} - {cf:.12f}|"})
    return rows

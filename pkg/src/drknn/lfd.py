"""Least favorable distributions on the empirical support.

The robust classification problem reduces to the linear program::

    min  sum_i t_i
    s.t. sum_j gamma_m[i, j]               <= t_i        (all i, m)
         sum_i gamma_m[i, j]               == Phat_m[j]  (all j, m)
         sum_ij gamma_m[i, j] * c[i, j]    <= radius_m   (all m)
         gamma_m >= 0

with the LFDs recovered as the row sums ``p_m = gamma_m.sum(axis=1)``.
Columns ``j`` outside the support of ``Phat_m`` carry no mass and are dropped
from the program, so class ``m`` contributes ``n * |supp Phat_m|`` variables.

:func:`solve_lipschitz` solves a second, independent program (classification
risk plus a Lipschitz penalty per class) whose optimal value must match the
minimax risk; :func:`duality_report` compares the two.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .core import argmax_assignment, check_distributions, validate_cost

FEAS_TOL = 1e-8
LIPSCHITZ_EPS = 1e-7

_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
    "presolve": True,
}


class SolverStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    NUMERICAL_FAILURE = "numerical_failure"


class SolverError(RuntimeError):
    """The LP did not reach an optimal, feasible solution."""

    def __init__(self, status: SolverStatus, message: str):
        self.status = status
        super().__init__(f"{status.value}: {message}")


@dataclass(frozen=True)
class LfdSolution:
    lfds: np.ndarray            # (M, n)
    plans: np.ndarray           # (M, n, n); rows index LFD support, columns the empirical one
    objective: float            # sum_i max_m lfds[m, i]
    minimax_risk: float         # M - objective
    spend: np.ndarray           # realized transport cost per class
    status: SolverStatus = SolverStatus.OPTIMAL
    lp_objective: float = float("nan")

    @property
    def class_count(self) -> int:
        return self.lfds.shape[0]


@dataclass(frozen=True)
class LipschitzSolution:
    pi: np.ndarray              # (n, M)
    lip_norms: np.ndarray       # (M,)
    value: float                # excludes the tie-break term


@dataclass(frozen=True)
class DualityReport:
    lfd_value: float
    lip_value: float
    gap: float
    lambda_bound_ok: bool
    lip_norms: np.ndarray

    def as_dict(self) -> dict:
        return {"lfd_value": self.lfd_value, "lip_value": self.lip_value,
                "gap": self.gap, "lambda_bound_ok": self.lambda_bound_ok,
                "lip_norms": self.lip_norms.tolist()}


def as_radii(radii, M: int) -> np.ndarray:
    """Broadcast a scalar or per-class radius to a length-``M`` vector."""
    r = np.asarray(radii, dtype=float)
    if r.ndim == 0:
        r = np.full(M, float(r))
    if r.shape != (M,):
        raise ValueError(f"expected {M} radii, got shape {r.shape}")
    if not np.all(np.isfinite(r)) or np.any(r < 0):
        raise ValueError("radii must be finite and nonnegative")
    return r


def _check_inputs(cost, empirical, radii):
    c = validate_cost(cost)
    P = check_distributions(empirical, n=c.shape[0])
    M = P.shape[0]
    if M < 2:
        raise ValueError("at least two classes are required")
    return c, P, as_radii(radii, M)


def solve_lfd(cost, empirical, radii) -> LfdSolution:
    """Least favorable distributions inside per-class Wasserstein-1 balls.

    Parameters
    ----------
    cost : (n, n) array
        Ground cost on the empirical support.
    empirical : (M, n) array
        Empirical class distributions.
    radii : float or (M,) array
        Ball radius per class; a scalar applies to every class.

    Raises
    ------
    SolverError
        If HiGHS fails or the returned point violates the constraints by
        more than :data:`FEAS_TOL`.
    """
    c, P, r = _check_inputs(cost, empirical, radii)
    M, n = P.shape
    supports = [np.flatnonzero(P[m] > 0) for m in range(M)]
    sizes = [n * len(s) for s in supports]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    nt = offsets[-1]
    nvar = nt + n

    rows_eq, cols_eq, b_eq = [], [], []
    rows_ub, cols_ub, vals_ub, b_ub = [], [], [], []
    eq_row = 0
    ub_row = 0
    for m in range(M):
        S = supports[m]
        s = len(S)
        # variable offsets[m] + i * s + k  <->  gamma_m[i, S[k]]
        idx = offsets[m] + np.arange(n * s).reshape(n, s)
        for k in range(s):
            rows_eq.append(np.full(n, eq_row))
            cols_eq.append(idx[:, k])
            b_eq.append(P[m, S[k]])
            eq_row += 1
        # row sums minus t_i
        rows_ub.append(np.repeat(ub_row + np.arange(n), s))
        cols_ub.append(idx.reshape(-1))
        vals_ub.append(np.ones(n * s))
        rows_ub.append(ub_row + np.arange(n))
        cols_ub.append(nt + np.arange(n))
        vals_ub.append(-np.ones(n))
        b_ub.extend([0.0] * n)
        ub_row += n
        # transport budget
        rows_ub.append(np.full(n * s, ub_row))
        cols_ub.append(idx.reshape(-1))
        vals_ub.append(c[:, S].reshape(-1))
        b_ub.append(r[m])
        ub_row += 1

    A_eq = sp.csr_matrix((np.ones(sum(len(x) for x in rows_eq)),
                          (np.concatenate(rows_eq), np.concatenate(cols_eq))),
                         shape=(eq_row, nvar))
    A_ub = sp.csr_matrix((np.concatenate(vals_ub),
                          (np.concatenate(rows_ub), np.concatenate(cols_ub))),
                         shape=(ub_row, nvar))
    obj = np.zeros(nvar)
    obj[nt:] = 1.0

    res = linprog(obj, A_ub=A_ub, b_ub=np.array(b_ub), A_eq=A_eq,
                  b_eq=np.array(b_eq), bounds=(0, None), method="highs-ds",
                  options=_HIGHS_OPTIONS)
    if res.status == 2:
        raise SolverError(SolverStatus.INFEASIBLE, res.message)
    if res.status != 0 or res.x is None:
        raise SolverError(SolverStatus.NUMERICAL_FAILURE,
                          f"HiGHS status {res.status}: {res.message}")

    x = np.clip(res.x, 0.0, None)
    plans = np.zeros((M, n, n))
    for m in range(M):
        S = supports[m]
        plans[m][:, S] = x[offsets[m]:offsets[m + 1]].reshape(n, len(S))
    lfds = plans.sum(axis=2)
    spend = np.einsum("mij,ij->m", plans, c)

    marg = np.abs(plans.sum(axis=1) - P).max()
    over = np.max(spend - r)
    if marg > FEAS_TOL or over > FEAS_TOL:
        raise SolverError(
            SolverStatus.NUMERICAL_FAILURE,
            f"solution violates constraints (marginal {marg:.2e}, budget {over:.2e})")

    objective = float(lfds.max(axis=0).sum())
    return LfdSolution(lfds=lfds, plans=plans, objective=objective,
                       minimax_risk=M - objective, spend=spend,
                       lp_objective=float(res.fun))


def optimal_classifier(sol: LfdSolution, uniform_ties: bool = False) -> np.ndarray:
    """Max-likelihood classifier on the support under the LFDs.

    Ties go to the lowest class unless ``uniform_ties`` is set; either way
    its risk under the LFDs equals ``sol.minimax_risk``.
    """
    if sol.status is not SolverStatus.OPTIMAL:
        raise SolverError(sol.status, "no optimal LFDs to classify with")
    return argmax_assignment(sol.lfds, uniform_ties=uniform_ties)


def transport_cost(plan, cost) -> float:
    plan = np.asarray(plan, dtype=float)
    cost = np.asarray(cost, dtype=float)
    if plan.shape != cost.shape:
        raise ValueError(f"plan shape {plan.shape} does not match cost shape {cost.shape}")
    return float(np.sum(plan * cost))


def solve_lipschitz(cost, empirical, radii, eps: float = LIPSCHITZ_EPS) -> LipschitzSolution:
    """Lipschitz-regularized classification on the empirical support.

    Minimizes ``sum_m E_{Phat_m}[1 - pi_m] + radius_m * L_m`` over
    simplex-valued ``pi`` with ``|pi_m(i) - pi_m(j)| <= L_m c[i, j]``. A small
    ``eps * sum_m L_m`` term picks the least-Lipschitz optimizer; the
    reported value excludes it.
    """
    c, P, r = _check_inputs(cost, empirical, radii)
    M, n = P.shape
    npi = n * M
    nvar = npi + M  # pi[i, m] at i * M + m, then L_m

    iu, ju = np.triu_indices(n, k=1)
    npairs = len(iu)
    rows, cols, vals = [], [], []
    row = 0
    for m in range(M):
        for sign in (1.0, -1.0):
            rr = row + np.arange(npairs)
            rows += [rr, rr, rr]
            cols += [iu * M + m, ju * M + m, np.full(npairs, npi + m)]
            vals += [np.full(npairs, sign), np.full(npairs, -sign), -c[iu, ju]]
            row += npairs
    A_ub = sp.csr_matrix((np.concatenate(vals) if vals else [],
                          (np.concatenate(rows) if rows else [],
                           np.concatenate(cols) if cols else [])),
                         shape=(row, nvar))
    A_eq = sp.csr_matrix((np.ones(npi),
                          (np.repeat(np.arange(n), M), np.arange(npi))),
                         shape=(n, nvar))

    obj = np.concatenate([-P.T.reshape(-1), r + eps])
    bounds = [(0, 1)] * npi + [(0, None)] * M
    res = linprog(obj, A_ub=A_ub, b_ub=np.zeros(row), A_eq=A_eq,
                  b_eq=np.ones(n), bounds=bounds, method="highs-ds",
                  options=_HIGHS_OPTIONS)
    if res.status == 2:
        raise SolverError(SolverStatus.INFEASIBLE, res.message)
    if res.status != 0 or res.x is None:
        raise SolverError(SolverStatus.NUMERICAL_FAILURE,
                          f"HiGHS status {res.status}: {res.message}")
    pi = np.clip(res.x[:npi].reshape(n, M), 0.0, 1.0)
    pi /= pi.sum(axis=1, keepdims=True)
    L = np.clip(res.x[npi:], 0.0, None)
    value = float(np.sum(P * (1.0 - pi.T)) + r @ L)
    return LipschitzSolution(pi=pi, lip_norms=L, value=value)


def lipschitz_norms(pi, cost) -> np.ndarray:
    """Smallest per-class Lipschitz constants of ``pi`` on the support.

    Pairs at zero cost are skipped.
    """
    pi = np.asarray(pi, dtype=float)
    c = np.asarray(cost, dtype=float)
    iu, ju = np.triu_indices(c.shape[0], k=1)
    keep = c[iu, ju] > 0
    if not np.any(keep):
        return np.zeros(pi.shape[1])
    iu, ju = iu[keep], ju[keep]
    return (np.abs(pi[iu] - pi[ju]) / c[iu, ju][:, None]).max(axis=0)


def duality_report(cost, empirical, radii) -> DualityReport:
    """Compare the minimax risk with the Lipschitz-regularized value.

    ``lambda_bound_ok`` checks ``L_m <= 1 / radius_m + 1e-6`` for every class
    with a positive radius; zero-radius classes are skipped.
    """
    c, P, r = _check_inputs(cost, empirical, radii)
    lfd = solve_lfd(c, P, r)
    lip = solve_lipschitz(c, P, r)
    pos = r > 0
    ok = bool(np.all(lip.lip_norms[pos] <= 1.0 / r[pos] + 1e-6))
    return DualityReport(lfd_value=lfd.minimax_risk, lip_value=lip.value,
                         gap=abs(lfd.minimax_risk - lip.value),
                         lambda_bound_ok=ok, lip_norms=lip.lip_norms)

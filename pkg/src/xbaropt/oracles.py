"""Variation-free reference solutions used for error measurement.

These deliberately avoid the crossbar/ADMM pipeline: LP references come
from scipy's HiGHS interior-point/simplex backend, SOCP references from
cvxpy, and small LPs can additionally be cross-checked by brute-force
enumeration of basic feasible solutions.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np
from scipy.optimize import linprog

from .errors import SingularMatrix
from .mathprog import LpProblem, SocpProblem


class NoReference(Exception):
    """The reference solver reported the problem infeasible or unbounded."""


def lp_reference(p: LpProblem) -> np.ndarray:
    """High-accuracy LP solution, excluding any hardware effects."""
    res = linprog(p.d, A_eq=p.Gc, b_eq=p.h, bounds=(0, None), method="highs")
    if res.status != 0:
        raise NoReference(f"linprog status {res.status}: {res.message}")
    return np.asarray(res.x, dtype=float)


def lp_vertex_oracle(p: LpProblem) -> np.ndarray:
    """Enumerate basic feasible solutions (n <= 12) and pick the best.

    Independent of both the ADMM pipeline and the linprog reference;
    exponential in n, so only for desk-size cross-checks.
    """
    Gc = np.asarray(p.Gc, dtype=float)
    d = np.asarray(p.d, dtype=float)
    h = np.asarray(p.h, dtype=float)
    l, n = Gc.shape
    if n > 12:
        raise ValueError(f"vertex enumeration limited to n <= 12, got n={n}")
    best = None
    best_val = np.inf
    for basis in combinations(range(n), l):
        sub = Gc[:, basis]
        try:
            xb = np.linalg.solve(sub, h)
        except np.linalg.LinAlgError:
            continue
        if (xb < -1e-9).any():
            continue
        x = np.zeros(n)
        x[list(basis)] = np.maximum(xb, 0.0)
        val = float(d @ x)
        if val < best_val - 1e-12:
            best_val = val
            best = x
    if best is None:
        raise NoReference("no basic feasible solution found")
    return best


def socp_reference(p: SocpProblem) -> np.ndarray:
    """High-accuracy SOCP solution via cvxpy (CLARABEL)."""
    import cvxpy as cp

    n = p.n
    x = cp.Variable(n)
    constraints = [cp.SOC(x[n - 1], x[: n - 1])]
    if p.l > 0:
        constraints.append(p.Gc @ x == p.h)
    prob = cp.Problem(cp.Minimize(np.asarray(p.d, dtype=float) @ x), constraints)
    prob.solve(solver=cp.CLARABEL)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise NoReference(f"cvxpy status {prob.status}")
    return np.asarray(x.value, dtype=float)


def scalar_prox_l1_grid(beta: float, rho: float, step: float = 5e-5) -> float:
    """Brute-force argmin_w |w| + (rho/2)(w - beta)^2 over a fine grid."""
    lo = min(0.0, beta) - 1.0
    hi = max(0.0, beta) + 1.0
    grid = np.arange(lo, hi + step, step)
    obj = np.abs(grid) + 0.5 * rho * (grid - beta) ** 2
    return float(grid[np.argmin(obj)])

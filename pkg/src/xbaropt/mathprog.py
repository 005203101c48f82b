"""Crossbar-backed linear and second-order cone programming.

Both solvers share the same structure: the x-step is an equality-
constrained least-squares subproblem whose KKT system has an iteration-
independent coefficient matrix, so the array is programmed exactly once
per solve; the y-step is a closed-form projection (nonnegative orthant
for LP, second-order cone for SOCP).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import admm, crossbar
from .admm import AdmmConfig, AdmmOutcome
from .crossbar import SignedCrossbar
from .errors import RankDeficient
from .numerics import make_rng

RANK_RTOL = 1e-10


def _check_row_rank(Gc):
    """Raise RankDeficient unless Gc has full row rank (numerically).

    The check is on the singular values of Gc Gc': the smallest must be
    at least RANK_RTOL times the largest.
    """
    Gc = np.asarray(Gc, dtype=float)
    if Gc.shape[0] == 0:
        return
    s = np.linalg.svd(Gc, compute_uv=False)
    if s[0] <= 0 or (s[-1] / s[0]) ** 2 < RANK_RTOL:
        raise RankDeficient(
            f"smallest singular value ratio {(s[-1] / max(s[0], 1e-300))**2:.3e} below {RANK_RTOL:.1e}"
        )


@dataclass(frozen=True)
class LpProblem:
    """min d'x  s.t.  Gc x = h, x >= 0."""

    d: np.ndarray
    Gc: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        _check_row_rank(self.Gc)
        l, n = self.Gc.shape
        if l > n:
            raise RankDeficient(f"more equality rows ({l}) than variables ({n})")

    @property
    def n(self) -> int:
        return self.Gc.shape[1]

    @property
    def l(self) -> int:
        return self.Gc.shape[0]


@dataclass(frozen=True)
class SocpProblem:
    """min d'x  s.t.  Gc x = h, ||x_{1:n-1}|| <= x_n."""

    d: np.ndarray
    Gc: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        _check_row_rank(self.Gc)
        if self.Gc.shape[1] < 2:
            raise ValueError("cone constraint needs n >= 2")

    @property
    def n(self) -> int:
        return self.Gc.shape[1]

    @property
    def l(self) -> int:
        return self.Gc.shape[0]


@dataclass(frozen=True)
class KktSystem:
    """Coefficient matrix [[rho I, Gc'], [Gc, 0]] of the x-step."""

    matrix: np.ndarray
    rho_used: float
    n: int
    l: int


def build_lp_kkt(p, rho: float) -> KktSystem:
    """Assemble the iteration-independent KKT matrix for the x-step."""
    if rho <= 0:
        raise ValueError(f"rho must be > 0, got {rho}")
    Gc = np.asarray(p.Gc, dtype=float)
    l, n = Gc.shape
    top = np.hstack([rho * np.eye(n), Gc.T])
    bottom = np.hstack([Gc, np.zeros((l, l))])
    return KktSystem(matrix=np.vstack([top, bottom]), rho_used=rho, n=n, l=l)


def lp_x_step(xb: SignedCrossbar, alpha, h, rho: float):
    """Solve the KKT system with right side (rho*alpha, h) on the array.

    Returns the first n entries (the primal block) of the solution.
    """
    alpha = np.asarray(alpha, dtype=float)
    h = np.asarray(h, dtype=float)
    rhs = np.concatenate([rho * alpha, h])
    return xb.solve(rhs)[: len(alpha)]


def project_nonneg(beta):
    """Euclidean projection onto the nonnegative orthant."""
    return np.maximum(np.asarray(beta, dtype=float), 0.0)


def project_soc(beta):
    """Euclidean projection onto the cone ||y_{1:n-1}|| <= y_n.

    Three cases: inside the polar cone -> 0; inside the cone -> beta
    unchanged (used on the boundary too); otherwise the closed-form
    boundary point.
    """
    beta = np.asarray(beta, dtype=float)
    head = beta[:-1]
    tail = float(beta[-1])
    head_norm = float(np.linalg.norm(head))
    if head_norm <= -tail:
        return np.zeros_like(beta)
    if head_norm <= tail:
        return beta.copy()
    factor = 0.5 * (1.0 + tail / head_norm)
    return factor * np.concatenate([head, [head_norm]])


def _solve_conic(p, project, cfg: AdmmConfig, variation: float, rng, init=None):
    """Shared LP/SOCP loop: program KKT array once, iterate ADMM."""
    n = p.n
    d = np.asarray(p.d, dtype=float)
    h = np.asarray(p.h, dtype=float)
    if p.l == 0:
        # No equalities: the KKT system degenerates to x = alpha.
        def x_step(y, mu, rho):
            return y - (mu + d) / rho
    else:
        kkt = build_lp_kkt(p, cfg.rho)
        xb = crossbar.program_signed(kkt.matrix, variation, rng, frozen_diagonal=n)

        def x_step(y, mu, rho):
            alpha = y - (mu + d) / rho
            return lp_x_step(xb, alpha, h, rho)

    def y_step(x, mu, rho):
        return project(x + mu / rho)

    outcome = admm.run(x_step, y_step, n, cfg, init=init)
    return outcome.state.x, outcome


def solve_lp(p: LpProblem, cfg: AdmmConfig, variation: float = 0.0, rng=None) -> tuple[np.ndarray, AdmmOutcome]:
    if rng is None and variation > 0:
        raise ValueError("variation > 0 requires an rng")
    return _solve_conic(p, project_nonneg, cfg, variation, rng if rng is not None else make_rng(0))


def solve_socp(p: SocpProblem, cfg: AdmmConfig, variation: float = 0.0, rng=None) -> tuple[np.ndarray, AdmmOutcome]:
    if rng is None and variation > 0:
        raise ValueError("variation > 0 requires an rng")
    return _solve_conic(p, project_soc, cfg, variation, rng if rng is not None else make_rng(0))


def relative_error(x, x_star) -> float:
    """||x - x*|| / ||x*||, falling back to absolute error when x* = 0."""
    x = np.asarray(x, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    denom = np.linalg.norm(x_star)
    err = float(np.linalg.norm(x - x_star))
    return err / denom if denom > 0 else err

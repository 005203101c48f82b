"""Generic two-block ADMM engine for the x = y coupling.

Every solver in this package splits its problem as
``min f(x) + g(y)  s.t.  x = y`` so the engine is specialized to that
coupling: alternate the two subproblem solvers, then take the dual
ascent step ``mu += rho * (x - y)``.  Stopping requires both the primal
residual ``||x - y||`` and the step residual ``||x - x_prev||`` to fall
below epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_MAX_ITERATIONS = 50_000


@dataclass(frozen=True)
class AdmmConfig:
    rho: float = 1.0
    epsilon: float = 1e-3
    max_iterations: int = DEFAULT_MAX_ITERATIONS

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError(f"rho must be > 0, got {self.rho}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")


@dataclass
class AdmmState:
    x: np.ndarray
    y: np.ndarray
    mu: np.ndarray
    k: int = 0
    prev_x: np.ndarray | None = None

    @classmethod
    def zeros(cls, dim: int) -> "AdmmState":
        return cls(x=np.zeros(dim), y=np.zeros(dim), mu=np.zeros(dim))


@dataclass
class AdmmOutcome:
    state: AdmmState
    converged: bool
    iterations_used: int
    residual_trace: list[tuple[float, float]] = field(default_factory=list)


def check_convergence(state: AdmmState, epsilon: float) -> bool:
    """True iff both the primal and step residuals are within epsilon."""
    if state.prev_x is None:
        return False
    primal = np.linalg.norm(state.x - state.y)
    step = np.linalg.norm(state.x - state.prev_x)
    return primal <= epsilon and step <= epsilon


def run(x_step, y_step, dim: int, config: AdmmConfig, init: AdmmState | None = None) -> AdmmOutcome:
    """Iterate x-step, y-step, dual update until convergence.

    ``x_step(y, mu, rho)`` and ``y_step(x, mu, rho)`` return the next
    primal iterates.  Subproblem errors (e.g. a singular system) propagate;
    running out of iterations is reported as ``converged=False``, not an
    error.
    """
    state = init if init is not None else AdmmState.zeros(dim)
    rho = config.rho
    trace: list[tuple[float, float]] = []
    converged = False
    k = state.k
    for _ in range(config.max_iterations):
        k += 1
        x_new = x_step(state.y, state.mu, rho)
        y_new = y_step(x_new, state.mu, rho)
        mu_new = state.mu + rho * (x_new - y_new)
        state = AdmmState(x=x_new, y=y_new, mu=mu_new, k=k, prev_x=state.x)
        primal = float(np.linalg.norm(x_new - y_new))
        step = float(np.linalg.norm(x_new - state.prev_x))
        trace.append((primal, step))
        if primal <= config.epsilon and step <= config.epsilon:
            converged = True
            break
    return AdmmOutcome(state=state, converged=converged, iterations_used=len(trace), residual_trace=trace)

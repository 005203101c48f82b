"""Generalized power iteration with multiplicity detection and deflation.

Power iteration alone only converges for a unique dominant eigenvalue.
Repeated dominant eigenvalues are handled by running fresh random starts
and watching the rank of the Gram matrix of converged iterates: the rank
saturates at the multiplicity.  Gram-Schmidt turns the independent
iterates into an orthonormal eigenbasis, and deflation exposes the next
eigenvalue.  All matrix-vector products go through the crossbar.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import crossbar
from .crossbar import SignedCrossbar
from .errors import DependentInput, NotSymmetric, ZeroIterate
from .numerics import sym_eig_oracle


@dataclass(frozen=True)
class PiConfig:
    tolerance: float = 1e-10
    max_iterations: int = 1000
    rank_tolerance: float = 1e-6
    accuracy_target: float = 1e-4

    def __post_init__(self):
        for name in ("tolerance", "max_iterations", "rank_tolerance", "accuracy_target"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class DominantEigenspace:
    eigenvalue: float
    multiplicity: int
    basis: list[np.ndarray]
    iterations_used: int


@dataclass
class PiOutcome:
    vector: np.ndarray
    rayleigh: float
    iterations: int
    converged: bool


def _check_symmetric(A, rtol=1e-10):
    A = np.asarray(A, dtype=float)
    scale = np.abs(A).max() if A.size else 0.0
    if scale > 0 and np.abs(A - A.T).max() > rtol * scale:
        raise NotSymmetric("power iteration requires a symmetric matrix")
    return A


def power_iterate(xb: SignedCrossbar, x0, cfg: PiConfig) -> PiOutcome:
    """Iterate x <- A x / ||A x|| until the iterate stops moving.

    A negative dominant eigenvalue makes the iterate flip sign each
    step, so convergence is tested against both +/- the previous
    iterate; the Rayleigh quotient supplies the eigenvalue with its
    sign.
    """
    x = np.asarray(x0, dtype=float)
    norm0 = np.linalg.norm(x)
    if norm0 == 0.0:
        raise ZeroIterate("starting vector is zero")
    x = x / norm0
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        ax = xb.multiply(x)
        ax_norm = np.linalg.norm(ax)
        if ax_norm < 1e-14:
            raise ZeroIterate("iterate mapped into the null space")
        x_new = ax / ax_norm
        delta = min(np.linalg.norm(x_new - x), np.linalg.norm(x_new + x))
        x = x_new
        if delta <= cfg.tolerance:
            converged = True
            break
    rayleigh = float(x @ xb.multiply(x))
    return PiOutcome(vector=x, rayleigh=rayleigh, iterations=iterations, converged=converged)


def detect_multiplicity(xb: SignedCrossbar, cfg: PiConfig, rng, outcomes: list | None = None) -> tuple[int, list[np.ndarray]]:
    """Estimate the dominant eigenvalue's multiplicity by rank saturation.

    Runs power iteration from fresh random unit starts, appending each
    converged iterate as a column; the rank of the (small) Gram matrix
    of the columns is recomputed after each append and the loop stops
    as soon as it fails to increase.
    """
    n = xb.dim
    columns: list[np.ndarray] = []
    rank = 0
    while True:
        start = rng.standard_normal(n)
        outcome = power_iterate(xb, start / np.linalg.norm(start), cfg)
        if outcomes is not None:
            outcomes.append(outcome)
        columns.append(outcome.vector)
        Y = np.column_stack(columns)
        gram = Y.T @ Y
        vals, _ = sym_eig_oracle(gram)
        new_rank = int(np.count_nonzero(vals > cfg.rank_tolerance))
        if new_rank <= rank:
            columns.pop()
            return rank, columns
        rank = new_rank
        if rank == n:
            # One confirming extra start, as the saturation rule requires.
            start = rng.standard_normal(n)
            extra = power_iterate(xb, start / np.linalg.norm(start), cfg)
            if outcomes is not None:
                outcomes.append(extra)
            return rank, columns


def gram_schmidt(Y: list[np.ndarray]) -> list[np.ndarray]:
    """Classical Gram-Schmidt followed by normalization."""
    basis: list[np.ndarray] = []
    for y in Y:
        u = np.asarray(y, dtype=float).copy()
        for b in basis:
            u = u - (u @ b) * b
        norm = np.linalg.norm(u)
        if norm < 1e-12:
            raise DependentInput("residual norm below 1e-12; rank tolerance too loose")
        basis.append(u / norm)
    return basis


def deflate(A, lambda1: float, U: list[np.ndarray]):
    """Subtract lambda1 * u u' for each basis vector, zeroing those
    eigenvalues while leaving the rest of the spectrum unchanged."""
    A = np.asarray(A, dtype=float)
    out = A.copy()
    for u in U:
        out = out - lambda1 * np.outer(u, u)
    return 0.5 * (out + out.T)


def _canonical_sign(u):
    """Make the largest-magnitude entry positive (reproducible output)."""
    i = int(np.argmax(np.abs(u)))
    return -u if u[i] < 0 else u


def top_k_eigen(A, k: int, cfg: PiConfig, variation: float = 0.0, rng=None, outcomes: list | None = None) -> list[tuple[float, np.ndarray]]:
    """Collect the k largest-magnitude eigenpairs by repeated
    {detect multiplicity, orthonormalize, deflate, reprogram}.

    Each deflation changes the matrix, so it triggers exactly one new
    array programming.  Equal-magnitude eigenvalues of opposite sign are
    not supported (power iteration does not converge there).
    """
    from .numerics import make_rng

    if rng is None:
        if variation > 0:
            raise ValueError("variation > 0 requires an rng")
        rng = make_rng(0)
    A = _check_symmetric(A)
    n = A.shape[0]
    if k > n:
        raise ValueError(f"k={k} exceeds dimension {n}")
    pairs: list[tuple[float, np.ndarray]] = []
    current = A
    while len(pairs) < k:
        xb = crossbar.program_signed(current, variation, rng)
        s, Y = detect_multiplicity(xb, cfg, rng, outcomes=outcomes)
        basis = gram_schmidt(Y)
        # One Rayleigh quotient per basis vector; they agree within accuracy.
        lam = float(np.mean([u @ xb.multiply(u) for u in basis]))
        for u in basis:
            pairs.append((lam, _canonical_sign(u)))
            if len(pairs) == k:
                break
        current = deflate(current, lam, basis)
    return pairs

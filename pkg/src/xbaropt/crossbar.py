"""Crossbar array simulator.

A coefficient matrix with negative entries is first embedded into a
larger all-nonnegative system via auxiliary variables; the nonnegative
matrix is then "programmed" once into an array as conductances.  Hardware
variation is modeled as a frozen Gaussian perturbation of the realized
coefficient matrix, applied at programming time and baked into every
subsequent multiply/solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import DimensionMismatch, InvalidRange, NegativeEntry, SingularMatrix
from .numerics import PIVOT_RTOL, gaussian_perturbation

DEFAULT_G_RANGE = (1e-6, 1e-3)

# Module-level count of program() calls, so tests can assert that a
# solver run programs its array exactly once.
_program_calls = 0


def program_call_count() -> int:
    return _program_calls


@dataclass(frozen=True)
class AugmentedSystem:
    """All-nonnegative embedding of a signed square matrix.

    ``matrix`` is the (N + aux_dim) square block matrix
    ``[[pos(C), B], [D, I]]`` where B holds the nonzero columns of
    ``pos(-C)`` and D selects the corresponding rows of the identity.
    Eliminating the auxiliary block reproduces C exactly.
    """

    matrix: np.ndarray
    original_dim: int
    aux_dim: int
    aux_column_indices: np.ndarray

    def pad_input(self, v):
        """Extend an N-vector with the auxiliary entries -D v."""
        v = np.asarray(v, dtype=float)
        return np.concatenate([v, -v[self.aux_column_indices]])

    def pad_output(self, v_out):
        """Extend an N-vector right side with zeros for the auxiliary rows."""
        v_out = np.asarray(v_out, dtype=float)
        return np.concatenate([v_out, np.zeros(self.aux_dim)])


def eliminate_negatives(C) -> AugmentedSystem:
    """Embed a signed square matrix into an all-nonnegative system."""
    C = np.asarray(C, dtype=float)
    n = C.shape[0]
    if C.shape != (n, n):
        raise DimensionMismatch(f"matrix must be square, got {C.shape}")
    pos = np.maximum(C, 0.0)
    neg = np.maximum(-C, 0.0)
    cols = np.flatnonzero(neg.any(axis=0))
    k = len(cols)
    if k == 0:
        return AugmentedSystem(C.copy(), n, 0, cols)
    B = neg[:, cols]
    D = np.eye(n)[cols, :]
    top = np.hstack([pos, B])
    bottom = np.hstack([D, np.eye(k)])
    return AugmentedSystem(np.vstack([top, bottom]), n, k, cols)


@dataclass
class CrossbarArray:
    """State of a programmed array.

    ``effective_matrix`` is the coefficient matrix actually realized,
    i.e. the requested one plus the frozen variation perturbation; it
    drives every multiply and solve.  ``conductances`` records the ideal
    programmed device state in ``[g_min, g_max]`` and ``scale`` the
    global prescaling multiplier (undone on read-out).
    """

    conductances: np.ndarray
    sense_conductance: float
    scale: float
    effective_matrix: np.ndarray
    variation_ratio: float
    _lu: tuple | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.effective_matrix.shape[0]

    def multiply(self, v_in):
        """Forward analog multiply: effective matrix times input voltages."""
        v_in = np.asarray(v_in, dtype=float)
        if v_in.shape != (self.dim,):
            raise DimensionMismatch(f"input length {v_in.shape} != array dim {self.dim}")
        return self.effective_matrix @ v_in

    def solve(self, v_out):
        """Reverse operation: input voltages reproducing the given outputs.

        The variation perturbation sits inside the solve, exactly as in
        hardware.  The factorization of the effective matrix is cached
        after the first call (the array is immutable once programmed).
        """
        v_out = np.asarray(v_out, dtype=float)
        if v_out.shape != (self.dim,):
            raise DimensionMismatch(f"output length {v_out.shape} != array dim {self.dim}")
        if self._lu is None:
            lu, piv = lu_factor(self.effective_matrix, check_finite=False)
            threshold = PIVOT_RTOL * np.abs(self.effective_matrix).max()
            bad = np.abs(np.diag(lu)) <= threshold
            if bad.any():
                raise SingularMatrix(
                    f"effective matrix is singular (pivot below {threshold:.3e})"
                )
            self._lu = (lu, piv)
        return lu_solve(self._lu, v_out, check_finite=False)


def program(C, variation_ratio, rng, g_range=DEFAULT_G_RANGE) -> CrossbarArray:
    """Program a nonnegative square matrix into a fresh array.

    Happens exactly once per array: the variation perturbation is drawn
    here and frozen.  Callers with signed matrices apply
    :func:`eliminate_negatives` first.
    """
    global _program_calls
    g_min, g_max = g_range
    if g_min >= g_max:
        raise InvalidRange(f"g_min {g_min} >= g_max {g_max}")
    C = np.asarray(C, dtype=float)
    if (C < 0).any():
        raise NegativeEntry("matrix to program has negative entries")
    if variation_ratio < 0:
        raise ValueError(f"variation_ratio must be >= 0, got {variation_ratio}")
    peak = C.max() if C.size else 0.0
    scale = g_max / peak if peak > 0 else 1.0
    conductances = np.clip(scale * C, g_min, g_max)
    sigma = gaussian_perturbation(C.shape, variation_ratio, C, rng)
    _program_calls += 1
    return CrossbarArray(
        conductances=conductances,
        sense_conductance=g_max,
        scale=scale,
        effective_matrix=C + sigma,
        variation_ratio=variation_ratio,
    )


def saddle_perturbation(C, variation_ratio, rng, frozen_diagonal=0):
    """Structured programming error for a symmetric coefficient matrix.

    Each distinct coefficient is stored on one device pair written by a
    single pulse and read bidirectionally, so the realized error is
    symmetric and confined to structural nonzeros (unused crosspoints
    stay at the conductance floor and contribute nothing).  The
    per-device deviation is calibrated at the array level: sigma equals
    ``variation_ratio`` times the RMS magnitude of the full programmed
    (augmented) array.  The first ``frozen_diagonal`` diagonal entries
    are exempt -- they hold the penalty term, which is accumulated
    digitally rather than stored in devices.  Keeping the perturbation
    symmetric preserves the saddle structure of the x-step system; an
    unstructured perturbation of the same magnitude makes the splitting
    iteration non-contractive and it fails to converge.
    """
    C = np.asarray(C, dtype=float)
    if variation_ratio == 0:
        return np.zeros_like(C)
    aug = eliminate_negatives(C)
    n_devices = aug.matrix.shape[0]
    sigma = variation_ratio * float(np.linalg.norm(aug.matrix)) / n_devices
    raw = sigma * rng.standard_normal(C.shape)
    perturbation = 0.5 * (raw + raw.T)
    perturbation[C == 0] = 0.0
    if frozen_diagonal:
        idx = np.arange(frozen_diagonal)
        perturbation[idx, idx] = 0.0
    return perturbation


@dataclass
class SignedCrossbar:
    """Array programmed from a signed matrix via the nonnegative embedding.

    Provides multiply/solve in the original N-dimensional coordinates by
    padding inputs/outputs per the embedding identity.
    """

    augmentation: AugmentedSystem
    array: CrossbarArray
    variation_ratio: float = 0.0

    @property
    def dim(self) -> int:
        return self.augmentation.original_dim

    def multiply(self, v):
        full = self.array.multiply(self.augmentation.pad_input(v))
        return full[: self.dim]

    def solve(self, v_out):
        full = self.array.solve(self.augmentation.pad_output(v_out))
        return full[: self.dim]


def program_signed(C, variation_ratio, rng, g_range=DEFAULT_G_RANGE,
                   frozen_diagonal=0) -> SignedCrossbar:
    """Apply programming variation, eliminate negatives, program once.

    The variation is drawn at programming time via
    :func:`saddle_perturbation` and frozen into the realized matrix; the
    augmentation then embeds the perturbed matrix exactly.
    """
    C = np.asarray(C, dtype=float)
    effective = C + saddle_perturbation(C, variation_ratio, rng, frozen_diagonal)
    aug = eliminate_negatives(effective)
    return SignedCrossbar(aug, program(aug.matrix, 0.0, rng, g_range), variation_ratio)

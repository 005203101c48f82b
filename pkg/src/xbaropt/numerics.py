"""Dense linear algebra kernels and seeded randomness.

Matrices and vectors are plain ``numpy.ndarray`` objects (float64,
row-major).  Random streams use numpy's PCG64 generator so that a given
seed reproduces the same draws on every platform.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from .errors import NotSymmetric, SingularMatrix

# Relative pivot threshold below which elimination reports singularity.
PIVOT_RTOL = 1e-12


def make_rng(seed: int) -> np.random.Generator:
    """Return a PCG64-backed generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed))


def lu_factor_pp(A):
    """LU factorization with partial pivoting.

    Returns ``(LU, piv)`` where LU packs the unit-lower and upper factors
    and ``piv`` is the row permutation.  Raises :class:`SingularMatrix`
    when a pivot magnitude falls below ``PIVOT_RTOL`` times the largest
    initial entry magnitude.
    """
    A = np.asarray(A, dtype=float)
    n, m = A.shape
    if n != m:
        raise ValueError(f"matrix must be square, got {A.shape}")
    lu = A.copy()
    piv = np.arange(n)
    threshold = PIVOT_RTOL * (np.abs(A).max() if A.size else 0.0)
    for k in range(n):
        p = k + np.argmax(np.abs(lu[k:, k]))
        if abs(lu[p, k]) <= threshold:
            raise SingularMatrix(
                f"pivot {abs(lu[p, k]):.3e} at column {k} below threshold {threshold:.3e}"
            )
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            piv[[k, p]] = piv[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, piv


def lu_solve_pp(factors, b):
    """Solve ``A x = b`` given factors from :func:`lu_factor_pp`."""
    lu, piv = factors
    b = np.asarray(b, dtype=float)
    y = solve_triangular(lu, b[piv], lower=True, unit_diagonal=True)
    return solve_triangular(lu, y, lower=False)


def direct_solve(A, b):
    """Solve a square linear system by partial-pivoted elimination."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.shape[0] != b.shape[0]:
        raise ValueError(f"rhs length {b.shape[0]} != matrix rows {A.shape[0]}")
    return lu_solve_pp(lu_factor_pp(A), b)


def sym_eig_oracle(A, asym_rtol=1e-10, max_sweeps=100):
    """Full spectral decomposition of a symmetric matrix via cyclic Jacobi.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues sorted in
    descending order and eigenvectors as the corresponding columns.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    scale = np.abs(A).max() if A.size else 0.0
    if scale > 0 and np.abs(A - A.T).max() > asym_rtol * scale:
        raise NotSymmetric(
            f"relative asymmetry {np.abs(A - A.T).max() / scale:.3e} exceeds {asym_rtol:.1e}"
        )
    work = 0.5 * (A + A.T)
    V = np.eye(n)
    fro = np.linalg.norm(work)
    if fro == 0.0 or n == 1:
        vals = np.diag(work).copy()
        order = np.argsort(vals)[::-1]
        return vals[order], V[:, order]
    stop = 1e-15 * fro
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.sum(work**2) - np.sum(np.diag(work) ** 2), 0.0))
        if off <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                if abs(apq) <= stop / n:
                    continue
                theta = (work[q, q] - work[p, p]) / (2.0 * apq)
                t = np.sign(theta) if theta != 0 else 1.0
                t = t / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp = work[p, :].copy()
                rq = work[q, :].copy()
                work[p, :] = c * rp - s * rq
                work[q, :] = s * rp + c * rq
                cp = work[:, p].copy()
                cq = work[:, q].copy()
                work[:, p] = c * cp - s * cq
                work[:, q] = s * cp + c * cq
                vp = V[:, p].copy()
                V[:, p] = c * vp - s * V[:, q]
                V[:, q] = s * vp + c * V[:, q]
    vals = np.diag(work).copy()
    order = np.argsort(vals)[::-1]
    return vals[order], V[:, order]


def frobenius_norm(A) -> float:
    """Square root of the sum of squared entries."""
    return float(np.sqrt(np.sum(np.asarray(A, dtype=float) ** 2)))


def gaussian_perturbation(shape, target_ratio, base, rng):
    """Zero-mean Gaussian matrix rescaled to an exact Frobenius-norm ratio.

    The returned perturbation P satisfies ``||P||_F == target_ratio * ||base||_F``
    exactly (not merely in expectation), which keeps variation sweeps
    reproducible.  ``target_ratio == 0`` returns the zero matrix.
    """
    if target_ratio < 0:
        raise ValueError(f"target_ratio must be >= 0, got {target_ratio}")
    if target_ratio == 0:
        return np.zeros(shape)
    raw = rng.standard_normal(shape)
    raw_norm = np.linalg.norm(raw)
    if raw_norm == 0.0:
        raise ValueError("degenerate all-zero Gaussian draw")
    return raw * (target_ratio * frobenius_norm(base) / raw_norm)

"""Crossbar-accelerated convex optimization toolkit.

A simulated resistive crossbar array performs matrix-vector multiplies
and linear-system solves (programmed once per coefficient matrix, with a
frozen hardware-variation perturbation).  On top of it: ADMM-based LP,
SOCP, and sparse-recovery solvers, and a generalized power-iteration
eigensolver with multiplicity detection, deflation, and PCA.
"""

from . import admm, crossbar, cs, eigen, harness, mathprog, numerics, pca
from .admm import AdmmConfig, AdmmOutcome, AdmmState
from .crossbar import CrossbarArray, SignedCrossbar, eliminate_negatives, program, program_signed
from .cs import CsProblem, SparseSignal, solve_cs
from .eigen import PiConfig, top_k_eigen
from .mathprog import LpProblem, SocpProblem, solve_lp, solve_socp

__version__ = "0.1.0"

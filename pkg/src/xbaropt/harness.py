"""Experiment runner: problem generators, sweeps, and CSV emission.

A sweep executes the full (size x variation x rho x trial) grid for one
problem family.  Every trial derives its own seed from the grid cell
coordinates, so results are independent of execution order and adding
grid cells never perturbs existing ones.  Raw per-trial rows and a
per-cell aggregate are written as CSV.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import crossbar, cs, eigen, mathprog, oracles, pca
from .admm import AdmmConfig
from .cs import CsProblem, SparseSignal
from .errors import GenerationFailure, ParseError, RankDeficient
from .mathprog import LpProblem, SocpProblem, relative_error
from .numerics import make_rng, sym_eig_oracle

CSV_SCHEMA = "# xbaropt trials schema v1"
RAW_COLUMNS = ["kind", "size", "variation", "rho", "trial", "seed", "metric", "value", "iters", "converged", "wall_ms"]
SUMMARY_COLUMNS = ["kind", "size", "variation", "rho", "metric", "mean_value", "trials", "converged"]

DESK_CS_SHAPE = (256, 128)  # (p, q)
PAPER_CS_SHAPE = (1024, 500)
EIG_DIM = 50


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str  # lp | qp | cs | eig | pca
    sizes: tuple = (50,)
    variation_levels: tuple = (0.0,)
    rho_values: tuple = (1.0,)
    trials: int = 20
    base_seed: int = 2024
    epsilon: float = 1e-3
    output_dir: str = "out"
    paper_scale: bool = False
    max_iterations: int = 50_000
    workers: int = 1

    def __post_init__(self):
        if self.kind not in ("lp", "qp", "cs", "eig", "pca"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(v < 0 or v > 0.5 for v in self.variation_levels):
            raise ValueError("variation levels must lie in [0, 0.5]")
        if any(s <= 0 for s in self.sizes):
            raise ValueError("sizes must be positive")


@dataclass(frozen=True)
class TrialRecord:
    kind: str
    size: int
    variation: float
    rho: float
    trial_index: int
    seed: int
    metric_name: str
    metric_value: float
    iterations: int
    converged: bool
    wall_time: float


def trial_seed(base_seed: int, kind: str, size, variation, rho, trial_index: int) -> int:
    """Deterministic 64-bit seed from the grid cell coordinates."""
    key = f"{base_seed}|{kind}|{size}|{variation!r}|{rho!r}|{trial_index}"
    digest = hashlib.sha256(key.encode()).digest()
    return int.from_bytes(digest[:8], "little")


# ---------------------------------------------------------------------------
# Problem generators
# ---------------------------------------------------------------------------

def constraint_count(n: int) -> int:
    """Default number of equality rows for an n-variable LP/SOCP trial."""
    return max(3, n // 20)


def generate_lp(n: int, l: int, rng, cost_scale: float = 0.1) -> LpProblem:
    """Random feasible LP with a planted, margin-protected optimal vertex.

    The first constraint row is strictly positive, so the feasible
    polytope is bounded (every cost is bounded below, even after the
    equality rows are perturbed).  A vertex is planted on the best-
    conditioned of several candidate bases and the cost is built from a
    dual certificate with strictly positive reduced costs off the basis,
    so the planted vertex is the unique optimum with a margin.  Each
    candidate is verified against an independent LP reference and
    resampled on any mismatch.
    """
    if l >= n:
        raise ValueError(f"need l < n, got l={l}, n={n}")
    for _ in range(100):
        Gc = rng.standard_normal((l, n))
        Gc[0] = 0.5 + rng.random(n)
        best_basis, best_cond = None, np.inf
        for _ in range(40):
            candidate = rng.choice(n, size=l, replace=False)
            cond = np.linalg.cond(Gc[:, candidate])
            if cond < best_cond:
                best_basis, best_cond = candidate, cond
        x_plant = np.zeros(n)
        x_plant[best_basis] = 0.5 + rng.random(l)
        h = Gc @ x_plant
        w = 0.5 * rng.standard_normal(l)
        reduced = np.zeros(n)
        off_basis = np.setdiff1d(np.arange(n), best_basis)
        reduced[off_basis] = 0.5 + rng.random(n - l)
        d = cost_scale * (Gc.T @ w + reduced)
        try:
            prob = LpProblem(d=d, Gc=Gc, h=h)
            x_star = oracles.lp_reference(prob)
        except (oracles.NoReference, RankDeficient):
            continue
        if np.linalg.norm(x_star - x_plant) / np.linalg.norm(x_plant) > 1e-6:
            continue
        return prob
    raise GenerationFailure("no LP with a verified planted vertex found in 100 resamples")


def generate_socp(n: int, l: int, rng, cost_scale: float = 0.1) -> SocpProblem:
    """Random feasible SOCP with a strictly dual-interior cost.

    The feasible point is built strictly inside the cone, and the cost
    vector lies strictly inside the dual cone (tail entry exceeds the
    head norm), which keeps the objective bounded below on the cone even
    when the equality rows are perturbed.
    """
    for _ in range(100):
        Gc = rng.standard_normal((l, n))
        head = rng.standard_normal(n - 1)
        x_feas = np.concatenate([head, [np.linalg.norm(head) + 0.1 + abs(rng.standard_normal())]])
        h = Gc @ x_feas
        d_head = rng.standard_normal(n - 1)
        d = cost_scale * np.concatenate([d_head, [np.linalg.norm(d_head) * (1.5 + rng.random())]])
        try:
            prob = SocpProblem(d=d, Gc=Gc, h=h)
            oracles.socp_reference(prob)
        except (oracles.NoReference, RankDeficient):
            continue
        return prob
    raise GenerationFailure("no bounded feasible SOCP found in 100 resamples")


CS_NOISE_STD = 0.1  # per-entry measurement noise, N(0, CS_NOISE_STD^2 I)
CS_SPIKE_FLOOR = 0.5  # minimum spike magnitude, keeps support identifiable
XI_SLACK = 1.05  # residual budget as a multiple of the expected noise norm


def generate_cs(p: int, q: int, s: int, rng, xi: float | None = None) -> tuple[CsProblem, SparseSignal]:
    """Gaussian measurement matrix, random-support spikes, noisy measurements.

    Spike magnitudes are bounded away from zero so the support is
    identifiable above the noise.  The default residual budget xi is
    calibrated to the noise: slightly above the expected noise norm
    CS_NOISE_STD * sqrt(q), so the true signal is feasible with high
    probability without forcing the solver to fit the noise.
    """
    if s > p or q >= p:
        raise ValueError(f"need s <= p and q < p, got p={p}, q={q}, s={s}")
    if xi is None:
        xi = XI_SLACK * CS_NOISE_STD * np.sqrt(q)
    H = rng.standard_normal((q, p))
    values = np.zeros(p)
    support = np.sort(rng.choice(p, size=s, replace=False)) if s > 0 else np.array([], dtype=int)
    if s > 0:
        values[support] = np.sign(rng.standard_normal(s)) * (
            CS_SPIKE_FLOOR + np.abs(rng.standard_normal(s))
        )
    noise = CS_NOISE_STD * rng.standard_normal(q)
    h = H @ values + noise
    return CsProblem(H=H, h=h, xi=xi), SparseSignal(values=values, support=support)


def generate_sym_with_multiplicity(n: int, m: int, rng, lambda1: float = 1.0, gap_fraction: float = 0.5):
    """Symmetric matrix with the dominant eigenvalue planted m times.

    Remaining eigenvalues are drawn uniformly in
    [0.1*lambda1, (1 - gap_fraction)*lambda1].
    """
    if m > n:
        raise ValueError(f"multiplicity {m} exceeds dimension {n}")
    spectrum = np.empty(n)
    spectrum[:m] = lambda1
    spectrum[m:] = rng.uniform(0.1 * lambda1, (1.0 - gap_fraction) * lambda1, size=n - m)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    A = (Q * spectrum) @ Q.T
    return 0.5 * (A + A.T)


# ---------------------------------------------------------------------------
# Trial execution
# ---------------------------------------------------------------------------

def _record(spec, size, variation, rho, trial, seed, metric, value, iters, converged, wall):
    return TrialRecord(
        kind=spec.kind, size=size, variation=variation, rho=rho, trial_index=trial,
        seed=seed, metric_name=metric, metric_value=float(value),
        iterations=iters, converged=converged, wall_time=wall,
    )


def run_trial(spec: ExperimentSpec, size, variation, rho, trial: int) -> list[TrialRecord]:
    """Execute one grid cell trial; failures become rows, not exceptions."""
    seed = trial_seed(spec.base_seed, spec.kind, size, variation, rho, trial)
    rng = make_rng(seed)
    start = time.perf_counter()
    try:
        if spec.kind == "lp":
            prob = generate_lp(size, constraint_count(size), rng)
            x_star = oracles.lp_reference(prob)
            cfg = AdmmConfig(rho=rho, epsilon=spec.epsilon, max_iterations=spec.max_iterations)
            x, outcome = mathprog.solve_lp(prob, cfg, variation=variation, rng=rng)
            wall = time.perf_counter() - start
            return [_record(spec, size, variation, rho, trial, seed, "rel_error",
                            relative_error(x, x_star), outcome.iterations_used, outcome.converged, wall)]
        if spec.kind == "qp":
            prob = generate_socp(size, constraint_count(size), rng)
            x_star = oracles.socp_reference(prob)
            cfg = AdmmConfig(rho=rho, epsilon=spec.epsilon, max_iterations=spec.max_iterations)
            x, outcome = mathprog.solve_socp(prob, cfg, variation=variation, rng=rng)
            wall = time.perf_counter() - start
            return [_record(spec, size, variation, rho, trial, seed, "rel_error",
                            relative_error(x, x_star), outcome.iterations_used, outcome.converged, wall)]
        if spec.kind == "cs":
            p, q = PAPER_CS_SHAPE if spec.paper_scale else DESK_CS_SHAPE
            prob, truth = generate_cs(p, q, size, rng)
            cfg = AdmmConfig(rho=rho, epsilon=spec.epsilon, max_iterations=spec.max_iterations)
            z, outcome = cs.solve_cs(prob, cfg, variation=variation, rng=rng)
            wall = time.perf_counter() - start
            iters = outcome.iterations_used
            conv = outcome.converged
            rel = relative_error(z, truth.values)
            return [
                _record(spec, size, variation, rho, trial, seed, "rel_error", rel, iters, conv, wall),
                _record(spec, size, variation, rho, trial, seed, "abs_error",
                        float(np.linalg.norm(z - truth.values)), iters, conv, wall),
                _record(spec, size, variation, rho, trial, seed, "support_error",
                        cs.support_error(z, truth), iters, conv, wall),
            ]
        if spec.kind == "eig":
            A = generate_sym_with_multiplicity(EIG_DIM, size, rng)
            vals, _ = sym_eig_oracle(A)
            cfg = eigen.PiConfig()
            xb = crossbar.program_signed(A, variation, rng)
            outcomes: list = []
            detected, Y = eigen.detect_multiplicity(xb, cfg, rng, outcomes=outcomes)
            basis = eigen.gram_schmidt(Y)
            lam = float(np.mean([u @ xb.multiply(u) for u in basis]))
            wall = time.perf_counter() - start
            iters = max(o.iterations for o in outcomes)
            conv = all(o.converged for o in outcomes)
            return [
                _record(spec, size, variation, rho, trial, seed, "lambda_error",
                        abs(lam - vals[0]), iters, conv, wall),
                _record(spec, size, variation, rho, trial, seed, "multiplicity_detected",
                        detected, iters, conv, wall),
                _record(spec, size, variation, rho, trial, seed, "multiplicity_exact",
                        1.0 if detected == size else 0.0, iters, conv, wall),
            ]
        if spec.kind == "pca":
            data = pca.load_iris()
            cfg = eigen.PiConfig()
            result = pca.pca(data, size, cfg, variation=variation, rng=rng)
            cov = pca.covariance(data)
            vals, vecs = sym_eig_oracle(cov)
            wall = time.perf_counter() - start
            var_err = max(
                abs(result.variances[i] - vals[i]) / abs(vals[i]) for i in range(size)
            )
            centered = data.values - data.values.mean(axis=0)
            score_err = 0.0
            for i in range(size):
                ref = centered @ vecs[:, i]
                got = result.projected[:, i]
                score_err = max(score_err, min(np.linalg.norm(got - ref), np.linalg.norm(got + ref)))
            return [
                _record(spec, size, variation, rho, trial, seed, "variance_rel_error", var_err, 0, True, wall),
                _record(spec, size, variation, rho, trial, seed, "score_error", score_err, 0, True, wall),
            ]
        raise ValueError(f"unknown kind {spec.kind}")
    except Exception as exc:  # recorded, sweep continues
        wall = time.perf_counter() - start
        rec = _record(spec, size, variation, rho, trial, seed, "failure", float("nan"), 0, False, wall)
        return [rec]


def run_experiment(spec: ExperimentSpec) -> list[TrialRecord]:
    """Execute the full sweep grid and write trials.csv + summary.csv."""
    cells = [
        (size, variation, rho, trial)
        for size in spec.sizes
        for variation in spec.variation_levels
        for rho in spec.rho_values
        for trial in range(spec.trials)
    ]
    records: list[TrialRecord] = []
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            for result in pool.map(_run_trial_star, [(spec, *cell) for cell in cells]):
                records.extend(result)
    else:
        for cell in cells:
            records.extend(run_trial(spec, *cell))
    records.sort(key=lambda r: (r.size, r.variation, r.rho, r.trial_index, r.metric_name))
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_trials_csv(records, out / "trials.csv")
    write_summary_csv(records, out / "summary.csv")
    return records


def _run_trial_star(args):
    return run_trial(*args)


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

def write_trials_csv(records: list[TrialRecord], path):
    with open(path, "w", newline="") as f:
        f.write(CSV_SCHEMA + "\n")
        writer = csv.writer(f)
        writer.writerow(RAW_COLUMNS)
        for r in records:
            writer.writerow([
                r.kind, r.size, repr(float(r.variation)), repr(float(r.rho)),
                r.trial_index, r.seed, r.metric_name, repr(r.metric_value),
                r.iterations, int(r.converged), repr(round(r.wall_time * 1000.0, 3)),
            ])


def write_summary_csv(records: list[TrialRecord], path):
    groups: dict[tuple, list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.kind, r.size, r.variation, r.rho, r.metric_name), []).append(r)
    with open(path, "w", newline="") as f:
        f.write(CSV_SCHEMA + "\n")
        writer = csv.writer(f)
        writer.writerow(SUMMARY_COLUMNS)
        for key in sorted(groups, key=lambda k: (k[0], k[1], k[2], k[3], k[4])):
            rows = groups[key]
            values = [r.metric_value for r in rows if np.isfinite(r.metric_value)]
            mean = float(np.mean(values)) if values else float("nan")
            writer.writerow([
                key[0], key[1], repr(float(key[2])), repr(float(key[3])), key[4],
                repr(mean), len(rows), sum(int(r.converged) for r in rows),
            ])


def read_csv(path) -> list[dict]:
    """Read a schema-v1 CSV (comment header line skipped)."""
    with open(path, "r", newline="") as f:
        first = f.readline()
        if not first.startswith("#"):
            f.seek(0)
        reader = csv.DictReader(f)
        return list(reader)


# ---------------------------------------------------------------------------
# Problem files (JSON)
# ---------------------------------------------------------------------------

def load_problem(path):
    """Load a problem file; see README for the JSON schema."""
    try:
        with open(path) as f:
            doc = json.load(f)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", line=exc.lineno)
    except OSError as exc:
        raise ParseError(str(exc))
    try:
        kind = doc["kind"]
        if kind in ("lp", "socp"):
            n, l = int(doc["n"]), int(doc["l"])
            Gc = np.array(doc["Gc"], dtype=float).reshape(l, n)
            d = np.array(doc["d"], dtype=float)
            h = np.array(doc["h"], dtype=float)
            if kind == "lp":
                return LpProblem(d=d, Gc=Gc, h=h)
            return SocpProblem(d=d, Gc=Gc, h=h)
        if kind == "cs":
            p, q = int(doc["p"]), int(doc["q"])
            H = np.array(doc["H"], dtype=float).reshape(q, p)
            h = np.array(doc["h"], dtype=float)
            return CsProblem(H=H, h=h, xi=float(doc.get("xi", 1e-3)))
        if kind == "eig":
            n = int(doc["n"])
            A = np.array(doc["A"], dtype=float).reshape(n, n)
            return A
        raise ParseError(f"unknown problem kind {kind!r}")
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad problem file: {exc}")


def save_problem(obj, path, extra: dict | None = None):
    """Write a problem back out in the JSON schema."""
    if isinstance(obj, LpProblem):
        doc = {"kind": "lp", "n": obj.n, "l": obj.l, "d": list(obj.d),
               "Gc": list(np.asarray(obj.Gc).ravel()), "h": list(obj.h)}
    elif isinstance(obj, SocpProblem):
        doc = {"kind": "socp", "n": obj.n, "l": obj.l, "d": list(obj.d),
               "Gc": list(np.asarray(obj.Gc).ravel()), "h": list(obj.h)}
    elif isinstance(obj, CsProblem):
        doc = {"kind": "cs", "p": obj.p, "q": obj.q,
               "H": list(np.asarray(obj.H).ravel()), "h": list(obj.h), "xi": obj.xi}
    else:
        A = np.asarray(obj, dtype=float)
        doc = {"kind": "eig", "n": A.shape[0], "A": list(A.ravel())}
    if extra:
        doc.update(extra)
    with open(path, "w") as f:
        json.dump(doc, f)

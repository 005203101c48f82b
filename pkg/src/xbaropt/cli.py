"""Command-line front end.

Subcommands: solve-lp, solve-qp, solve-cs, eig, pca, bench, plot.
Exit codes: 0 success, 2 invalid arguments, 3 problem-file parse error,
4 solver hard error (singular system).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import cs as cs_mod
from . import eigen, harness, mathprog, pca, plots
from .admm import AdmmConfig
from .errors import ParseError, SingularMatrix, XbarError
from .harness import ExperimentSpec
from .numerics import make_rng

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_SOLVER = 4


def _add_common(p, problem=True):
    p.add_argument("--rho", type=float, default=None, help="ADMM penalty parameter")
    p.add_argument("--eps", type=float, default=1e-3, help="stopping tolerance")
    p.add_argument("--variation", type=float, default=0.0, help="hardware variation level")
    p.add_argument("--seed", type=int, default=2024, help="base RNG seed")
    p.add_argument("--out", type=Path, default=None, help="output directory")
    if problem:
        p.add_argument("--problem", type=Path, default=None, help="problem file (JSON)")


def build_parser():
    parser = argparse.ArgumentParser(prog="xbaropt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("solve-lp", "solve-qp", "solve-cs"):
        p = sub.add_parser(name, help=f"run the {name.split('-')[1].upper()} solver on a problem file")
        _add_common(p)
        p.add_argument("--size", type=str, default="20", help="generated problem size when no file is given")

    p = sub.add_parser("eig", help="dominant eigenpairs of a symmetric matrix")
    _add_common(p)
    p.add_argument("--size", type=str, default="50")
    p.add_argument("-k", type=int, default=1, help="number of eigenpairs")

    p = sub.add_parser("pca", help="principal components of a CSV dataset (default: iris)")
    _add_common(p)
    p.add_argument("-k", type=int, default=2)

    p = sub.add_parser("bench", help="run a sweep and write trials.csv / summary.csv")
    _add_common(p, problem=False)
    p.add_argument("--kind", required=True, choices=["lp", "qp", "cs", "eig", "pca"])
    p.add_argument("--size", type=str, default=None, help="comma-separated sizes")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--variations", type=str, default=None, help="comma-separated variation levels")
    p.add_argument("--rhos", type=str, default=None, help="comma-separated rho values")
    p.add_argument("--paper-scale", action="store_true")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("plot", help="render figures from a summary CSV")
    p.add_argument("summary", type=Path, help="summary.csv from bench")
    p.add_argument("--trials-csv", type=Path, default=None)
    p.add_argument("--out", type=Path, default=Path("plots"))
    return parser


def _ints(text):
    return tuple(int(v) for v in text.split(","))


def _floats(text):
    return tuple(float(v) for v in text.split(","))


def _solver_cfg(args, default_rho):
    return AdmmConfig(rho=args.rho if args.rho is not None else default_rho, epsilon=args.eps)


def _cmd_solve(args):
    rng = make_rng(args.seed)
    kind = args.command.split("-")[1]
    if args.problem is not None:
        prob = harness.load_problem(args.problem)
    elif kind == "lp":
        n = _ints(args.size)[0]
        prob = harness.generate_lp(n, harness.constraint_count(n), rng)
    elif kind == "qp":
        n = _ints(args.size)[0]
        prob = harness.generate_socp(n, harness.constraint_count(n), rng)
    else:
        p = _ints(args.size)[0]
        prob, _ = harness.generate_cs(p, p // 2, max(1, p // 20), rng)
    if kind == "lp":
        cfg = _solver_cfg(args, 1.0)
        x, outcome = mathprog.solve_lp(prob, cfg, variation=args.variation, rng=rng)
        objective = float(np.asarray(prob.d) @ x)
    elif kind == "qp":
        cfg = _solver_cfg(args, 1.0)
        x, outcome = mathprog.solve_socp(prob, cfg, variation=args.variation, rng=rng)
        objective = float(np.asarray(prob.d) @ x)
    else:
        cfg = _solver_cfg(args, 10.0)
        x, outcome = cs_mod.solve_cs(prob, cfg, variation=args.variation, rng=rng)
        objective = float(np.sum(np.abs(x)))
    print(f"converged={outcome.converged} iterations={outcome.iterations_used} objective={objective:.6g}")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        np.savetxt(args.out / "solution.csv", x, delimiter=",")
        if kind == "cs":
            plots.plot_recovered_stem(np.zeros_like(x), x, args.out / "recovered.svg")
        print(f"solution written to {args.out / 'solution.csv'}")
    return EXIT_OK


def _cmd_eig(args):
    rng = make_rng(args.seed)
    if args.problem is not None:
        A = harness.load_problem(args.problem)
    else:
        n = _ints(args.size)[0]
        A = harness.generate_sym_with_multiplicity(n, 1, rng)
    cfg = eigen.PiConfig()
    pairs = eigen.top_k_eigen(A, args.k, cfg, variation=args.variation, rng=rng)
    for i, (lam, _) in enumerate(pairs):
        print(f"lambda[{i}] = {lam:.12g}")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        vecs = np.column_stack([u for _, u in pairs])
        np.savetxt(args.out / "eigenvectors.csv", vecs, delimiter=",")
    return EXIT_OK


def _cmd_pca(args):
    rng = make_rng(args.seed)
    data = pca.load_iris(args.problem) if args.problem is not None else pca.load_iris()
    result = pca.pca(data, args.k, eigen.PiConfig(), variation=args.variation, rng=rng)
    for i, var in enumerate(result.variances):
        print(f"pc{i + 1} variance = {var:.9g}")
    out = args.out or Path("pca_out")
    out.mkdir(parents=True, exist_ok=True)
    pca.export_scores(result, data.labels, out / "scores.csv")
    if args.k >= 2:
        plots.plot_pca_scatter(result.projected[:, :2], data.labels, out / "scores.svg")
    print(f"scores written to {out / 'scores.csv'}")
    return EXIT_OK


_BENCH_DEFAULT_SIZES = {"lp": (50, 100, 200), "qp": (50, 100, 200), "cs": (3, 12, 25, 37, 50), "eig": tuple(range(1, 11)), "pca": (2,)}
_BENCH_DEFAULT_RHO = {"lp": 1.0, "qp": 1.0, "cs": 10.0, "eig": 1.0, "pca": 1.0}


def _cmd_bench(args):
    sizes = _ints(args.size) if args.size else _BENCH_DEFAULT_SIZES[args.kind]
    variations = _floats(args.variations) if args.variations else (args.variation,)
    rhos = _floats(args.rhos) if args.rhos else ((args.rho,) if args.rho is not None else (_BENCH_DEFAULT_RHO[args.kind],))
    spec = ExperimentSpec(
        kind=args.kind, sizes=sizes, variation_levels=variations, rho_values=rhos,
        trials=args.trials, base_seed=args.seed, epsilon=args.eps,
        output_dir=str(args.out or Path("bench_out")), paper_scale=args.paper_scale,
        workers=args.workers,
    )
    records = harness.run_experiment(spec)
    n_failed = sum(1 for r in records if r.metric_name == "failure")
    out = Path(spec.output_dir)
    print(f"{len(records)} rows ({n_failed} failures) -> {out / 'trials.csv'}, {out / 'summary.csv'}")
    return EXIT_OK


def _cmd_plot(args):
    written = plots.emit_plots(args.summary, args.out, trials_csv=args.trials_csv)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("solve-lp", "solve-qp", "solve-cs"):
            return _cmd_solve(args)
        if args.command == "eig":
            return _cmd_eig(args)
        if args.command == "pca":
            return _cmd_pca(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "plot":
            return _cmd_plot(args)
        parser.error(f"unknown command {args.command}")
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SingularMatrix as exc:
        print(f"error: singular system: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except XbarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

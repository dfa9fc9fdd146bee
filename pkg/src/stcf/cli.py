"""Command-line interface.

Exit status 0 on success, 2 on validation errors (bad files, malformed
problems, unbounded objectives); numbers print with %.12g.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import apps, baselines, bench, pgmio, problemio, satred
from .convex1d import ConvexDivergenceError
from .geometry2d import GeometryError
from .oracle import subset_oracle
from .solver1d import minimize_sum_1d
from .solver2d import enumerate_candidate_sets, minimize_sum_2d
from .solverhd import SparseTerm, SparseTruncatedSum, minimize_ccd


def _fmt(v: float) -> str:
    return "%.12g" % v


def _fmt_vec(x) -> str:
    return " ".join(_fmt(v) for v in np.asarray(x, dtype=float).reshape(-1))


def _print_solution(sol) -> None:
    print("value=%s" % _fmt(sol.value))
    print("x=%s" % _fmt_vec(sol.x))
    print("active=%s" % ",".join(str(i) for i in sorted(sol.active)))


def _load_for_dim(path, want_dim=None):
    problem = problemio.load_problem(path)
    if want_dim is not None and problem.dim != want_dim:
        raise ValueError("field 'dim': expected %d, got %d" % (want_dim, problem.dim))
    return problem


def _one_input(positional, flagged, flag_name) -> str:
    """The input path, given either positionally or through a flag."""
    if positional is not None and flagged is not None:
        raise ValueError("give the input either positionally or with %s, "
                         "not both" % flag_name)
    path = positional if positional is not None else flagged
    if path is None:
        raise ValueError("missing input file (positional or %s)" % flag_name)
    return path


def _cmd_solve1d(args) -> int:
    problem = _load_for_dim(_one_input(args.problem, args.input, "--input"), 1)
    sol = minimize_sum_1d(problem.terms)
    _print_solution(sol)
    if args.out:
        problemio.save_solution(args.out, sol)
    return 0


def _cmd_solve2d(args) -> int:
    problem = _load_for_dim(_one_input(args.problem, args.input, "--input"), 2)
    sol = minimize_sum_2d(problem.terms)
    _print_solution(sol)
    extra = None
    if args.emit_candidates:
        cands = sorted(tuple(sorted(s)) for s in enumerate_candidate_sets(problem.terms))
        for cand in cands:
            print("candidate=%s" % ",".join(str(i) for i in cand))
        extra = {"candidates": [list(c) for c in cands]}
    if args.out:
        problemio.save_solution(args.out, sol, extra)
    return 0


def _cmd_solvehd(args) -> int:
    problem = problemio.load_problem(_one_input(args.problem, args.input, "--input"))
    sups = problem.supports or [tuple(range(problem.dim)) for _ in problem.terms]
    ssum = SparseTruncatedSum(
        problem.dim,
        [SparseTerm(s, t) for s, t in zip(sups, problem.terms)])
    sol = minimize_ccd(ssum, tol=args.tol, max_iter=args.max_iter)
    _print_solution(sol)
    print("cycles=%d converged=%s" % (sol.iterations,
                                      "yes" if sol.info.get("converged") else "no"))
    if args.out:
        problemio.save_solution(args.out, sol)
    return 0


def _cmd_oracle(args) -> int:
    problem = problemio.load_problem(_one_input(args.problem, args.input, "--input"))
    if problem.dim > 2:
        raise ValueError("field 'dim': subset oracle supports dim 1 or 2")
    sol = subset_oracle(problem.terms)
    _print_solution(sol)
    print("subsets=%d" % sol.pieces_visited)
    if args.out:
        problemio.save_solution(args.out, sol)
    return 0


def _cmd_outliers(args) -> int:
    X, y = problemio.load_regression_csv(_one_input(args.data, args.input, "--input"))
    problem = apps.RegressionProblem(X, y, args.lam, family=args.family)
    fit = apps.detect_outliers(problem)
    print("objective=%s" % _fmt(fit.objective))
    print("beta=%s" % _fmt_vec(fit.beta))
    flagged = np.flatnonzero(fit.flags)
    print("flagged=%s" % ",".join(str(i) for i in flagged))
    if args.compare_ipod:
        ipod = baselines.theta_ipod(X, y, args.lam)
        print("ipod_flagged=%s" % ",".join(str(i) for i in np.flatnonzero(ipod.flags)))
    if args.out:
        problemio.save_solution(args.out, fit.solution, {
            "beta": fit.beta.tolist(),
            "gamma": fit.gamma.tolist(),
            "flagged": flagged.tolist(),
        })
    return 0


def _cmd_place(args) -> int:
    points, weights = problemio.load_points_csv(
        _one_input(args.points, args.input, "--input"))
    shape = apps.ShapeSpec(args.shape, args.size)
    res = apps.place_shape(points, shape, weights)
    print("location=%s" % _fmt_vec(res.location))
    print("weight=%s" % _fmt(res.weight))
    print("covered=%s" % ",".join(str(i) for i in res.covered))
    if args.grid_check:
        _, gw = apps.coverage_grid_scan(points, shape, weights,
                                        resolution=args.grid_check)
        print("grid_weight=%s match=%s"
              % (_fmt(gw), "yes" if res.weight >= gw - 1e-9 else "no"))
    return 0


def _cmd_denoise_signal(args) -> int:
    y = problemio.load_signal_txt(_one_input(args.src, args.input, "--input"))
    res = apps.restore_signal(y, args.w, args.lam, tol=args.tol,
                              max_iter=args.max_iter)
    print("objective=%s" % _fmt(res.objective))
    print("cycles=%d converged=%s"
          % (res.solution.iterations,
             "yes" if res.solution.info.get("converged") else "no"))
    if args.out:
        problemio.save_signal_txt(args.out, res.x)
    return 0


def _cmd_denoise_image(args) -> int:
    img = pgmio.read_pgm(_one_input(args.src, args.input, "--input"))
    res = apps.restore_image(img, args.w, args.lam, tol=args.tol,
                             max_iter=args.max_iter)
    print("objective=%s" % _fmt(res.objective))
    print("cycles=%d converged=%s"
          % (res.solution.iterations,
             "yes" if res.solution.info.get("converged") else "no"))
    if args.out:
        pgmio.write_pgm(args.out, res.x)
    return 0


def _cmd_satred(args) -> int:
    with open(_one_input(args.formula, args.dimacs, "--dimacs")) as fh:
        formula = satred.parse_dimacs(fh.read())
    reduction = satred.reduce(formula)
    value, assignment = satred.min_by_orthants(reduction)
    expected = reduction.expected_if_satisfiable
    verdict = "SAT" if value == expected else "UNSAT"
    print("min=%d expected-if-sat=%d %s" % (value, expected, verdict))
    if args.assignment and verdict == "SAT":
        print("assignment=%s" % "".join("T" if b else "F" for b in assignment))
    return 0


def _cmd_bench(args) -> int:
    report = bench.run_experiment(args.experiment, replicates=args.replicates,
                                  seed=args.seed, threads=args.threads)
    for method, metric, mean, stderr in report.rows:
        print("%s %s mean=%s stderr=%s" % (method, metric, _fmt(mean), _fmt(stderr)))
    print("elapsed=%s" % _fmt(report.elapsed))
    if args.out:
        report.to_csv(args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stcf",
        description="Exact and scalable minimization of sums of truncated "
                    "convex functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve1d", help="exact 1-D interval sweep")
    p.add_argument("problem", nargs="?", help="problem JSON (stcf-v1, dim 1)")
    p.add_argument("--input", help="problem JSON (alternative to the positional)")
    p.add_argument("-o", "--out", help="write solution JSON here")
    p.set_defaults(func=_cmd_solve1d)

    p = sub.add_parser("solve2d", help="exact 2-D boundary traversal")
    p.add_argument("problem", nargs="?", help="problem JSON (stcf-v1, dim 2)")
    p.add_argument("--input", help="problem JSON (alternative to the positional)")
    p.add_argument("-o", "--out", help="write solution JSON here")
    p.add_argument("--emit-candidates", action="store_true",
                   help="also print every candidate active set")
    p.set_defaults(func=_cmd_solve2d)

    p = sub.add_parser("solvehd", help="coordinate descent for sparse sums")
    p.add_argument("problem", nargs="?", help="problem JSON (stcf-v1, any dim)")
    p.add_argument("--input", help="problem JSON (alternative to the positional)")
    p.add_argument("-o", "--out", help="write solution JSON here")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=10000)
    p.set_defaults(func=_cmd_solvehd)

    p = sub.add_parser("oracle", help="exhaustive subset oracle (small n)")
    p.add_argument("problem", nargs="?", help="problem JSON (stcf-v1, dim 1 or 2)")
    p.add_argument("--input", help="problem JSON (alternative to the positional)")
    p.add_argument("-o", "--out", help="write solution JSON here")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("outliers", help="regression outlier detection")
    p.add_argument("data", nargs="?", help="CSV with header y,x1,...,xp")
    p.add_argument("--input", "--csv", dest="input",
                   help="data CSV (alternative to the positional)")
    p.add_argument("--lam", "--lambda", dest="lam", type=float, required=True,
                   help="penalty for shifting one case")
    p.add_argument("--family", choices=("gaussian", "poisson"),
                   default="gaussian")
    p.add_argument("--compare-ipod", action="store_true",
                   help="also run the hard-threshold baseline")
    p.add_argument("-o", "--out", help="write fit JSON here")
    p.set_defaults(func=_cmd_outliers)

    p = sub.add_parser("place", help="best-coverage shape placement")
    p.add_argument("points", nargs="?", help="CSV with header x,y or x,y,w")
    p.add_argument("--input", "--points", dest="input",
                   help="points CSV (alternative to the positional)")
    p.add_argument("--shape", choices=apps.SHAPE_KINDS, required=True)
    p.add_argument("--size", "--radius", dest="size", type=float, required=True,
                   help="radius (circle), side (square), or circumradius (hexagon)")
    p.add_argument("--grid-check", type=int, metavar="RES",
                   help="verify against a RESxRES grid scan")
    p.set_defaults(func=_cmd_place)

    p = sub.add_parser("denoise-signal", help="restore a 1-D signal")
    p.add_argument("src", nargs="?", metavar="input",
                   help="text file, one sample per line")
    p.add_argument("--input", help="signal file (alternative to the positional)")
    p.add_argument("--w", type=float, required=True, help="pair weight")
    p.add_argument("--lam", "--lambda", dest="lam", type=float, required=True,
                   help="squared-jump truncation level")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("-o", "--out", help="write restored signal here")
    p.set_defaults(func=_cmd_denoise_signal)

    p = sub.add_parser("denoise-image", help="restore a PGM image")
    p.add_argument("src", nargs="?", metavar="input",
                   help="binary PGM (P5, maxval 255)")
    p.add_argument("--input", help="PGM file (alternative to the positional)")
    p.add_argument("--w", type=float, required=True, help="pair weight")
    p.add_argument("--lam", "--lambda", dest="lam", type=float, required=True,
                   help="squared-jump truncation level")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("-o", "--out", help="write restored PGM here")
    p.set_defaults(func=_cmd_denoise_image)

    p = sub.add_parser("satred", help="3-SAT reduction and exact minimum")
    p.add_argument("formula", nargs="?",
                   help="DIMACS CNF, three distinct variables per clause")
    p.add_argument("--dimacs", help="DIMACS CNF (alternative to the positional)")
    p.add_argument("--assignment", action="store_true",
                   help="print a satisfying assignment when SAT")
    p.set_defaults(func=_cmd_satred)

    p = sub.add_parser("bench", help="deterministic experiments")
    p.add_argument("experiment", choices=sorted(bench._EXPERIMENTS))
    p.add_argument("--replicates", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: STCF_THREADS, 0 = one per CPU)")
    p.add_argument("-o", "--out", help="write the report CSV here")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, GeometryError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except ConvexDivergenceError as e:
        print("error: objective unbounded below (%s)" % e, file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print("error: no such file: %s" % e.filename, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

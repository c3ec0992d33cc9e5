"""Command-line interface.

Subcommands: ``qdr`` (cheap nonnegative factorization), ``anls`` (iterative
refinement from a chosen start), ``threeway`` (three-factor form, optionally
symmetric or defect-minimizing), ``exact`` (member of the exact family at a
chosen parameter point), and ``bench`` (seeded benchmark batches with CSV
reports and figures).

Exit codes: 0 success, 1 input/usage errors, 2 numerical failures.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .anls import AnlsConfig, anls, anls_symmetric
from .bench import (
    DEFAULT_METHODS,
    GeneratorSpec,
    aggregate_records,
    run_bench,
    write_records_csv,
    write_summary_csv,
)
from .errors import InputError, NumericalError
from .exact import exact_nmf, ratio_stats, tbox
from .linalg import frobenius, svd2
from .matrixio import read_matrix, write_matrix
from .qdr import qdr
from .threeway import (
    ThreeWayParams,
    eig2_scaled,
    minimize_defects,
    threeway_nmf,
    threeway_symmetric,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="nmf2", description=__doc__)
    parser.add_argument("--version", action="version", version=f"nmf2 {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_qdr = sub.add_parser("qdr", help="quadrant-clipping nonnegative factorization")
    p_qdr.add_argument("matrix", help="input matrix file (CSV or MatrixMarket)")
    p_qdr.add_argument("--out-prefix", help="prefix for the factor files")

    p_anls = sub.add_parser("anls", help="alternating nonnegative least squares")
    p_anls.add_argument("matrix")
    p_anls.add_argument("--init", choices=DEFAULT_METHODS, default="qdr")
    p_anls.add_argument("--eps", type=float, default=1e-6, help="convergence tolerance")
    p_anls.add_argument("--max-iters", type=int, default=500)
    p_anls.add_argument("--seed", type=int, default=0, help="seed for random init")
    p_anls.add_argument("--out-prefix")

    p_three = sub.add_parser("threeway", help="three-factor nonnegative form")
    p_three.add_argument("matrix")
    p_three.add_argument("--symmetric", action="store_true")
    p_three.add_argument("--min-defect", action="store_true", help="use the defect-minimizing corner")
    p_three.add_argument("--t1-lo", type=float)
    p_three.add_argument("--t1-hi", type=float)
    p_three.add_argument("--t2-lo", type=float)
    p_three.add_argument("--t2-hi", type=float)
    p_three.add_argument("--out-prefix")

    p_exact = sub.add_parser("exact", help="member of the exact rank-2 family")
    p_exact.add_argument("matrix")
    p_exact.add_argument("--t1", type=float, help="first parameter (default: box midpoint)")
    p_exact.add_argument("--t2", type=float, help="second parameter (default: box midpoint)")
    p_exact.add_argument("--out-prefix")

    p_bench = sub.add_parser("bench", help="seeded benchmark batch")
    p_bench.add_argument("--family", choices=("lognormal", "boundary", "int4"), required=True)
    p_bench.add_argument("--count", type=int, default=10)
    p_bench.add_argument("--seed", type=int, required=True)
    p_bench.add_argument("--out", required=True, help="per-record CSV path")
    p_bench.add_argument("--m", type=int, default=100)
    p_bench.add_argument("--n", type=int, default=100)
    p_bench.add_argument("--noise-scale", type=float)
    p_bench.add_argument("--total", type=int, default=1000)
    p_bench.add_argument("--eps", type=float, default=1e-3)
    p_bench.add_argument("--max-iters", type=int, default=1000)
    p_bench.add_argument("--methods", nargs="+", choices=DEFAULT_METHODS, default=list(DEFAULT_METHODS))
    p_bench.add_argument("--threads", type=int)
    p_bench.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    return parser


def _prefix(args) -> str:
    if args.out_prefix:
        return args.out_prefix
    return os.path.splitext(args.matrix)[0]


def _write_factors(prefix, l, r, m_mid=None):
    write_matrix(f"{prefix}.L.csv", l)
    write_matrix(f"{prefix}.R.csv", r)
    if m_mid is not None:
        write_matrix(f"{prefix}.M.csv", m_mid)
        print(f"wrote {prefix}.L.csv, {prefix}.M.csv, {prefix}.R.csv")
    else:
        print(f"wrote {prefix}.L.csv, {prefix}.R.csv")


def _cmd_qdr(args) -> int:
    mat = read_matrix(args.matrix)
    nmf = qdr(mat)
    err = frobenius(mat - nmf.reconstruct())
    print(f"qdr: {mat.shape[0]}x{mat.shape[1]} input, residual {err:.6g} "
          f"({err / max(frobenius(mat), 1e-300):.6g} relative)")
    _write_factors(_prefix(args), nmf.l, nmf.r)
    return 0


def _cmd_anls(args) -> int:
    mat = read_matrix(args.matrix)
    cfg = AnlsConfig(epsilon=args.eps, max_iters=args.max_iters)
    result = anls(mat, init=args.init, cfg=cfg, seed=args.seed)
    err = frobenius(mat - result.nmf.reconstruct())
    status = "converged" if result.converged else "max iterations reached"
    print(f"anls[{args.init}]: {result.iters} sweeps, {status}, "
          f"residual {result.final_residual:.3g}, error {err:.6g}")
    _write_factors(_prefix(args), result.nmf.l, result.nmf.r)
    return 0


def _cmd_threeway(args) -> int:
    mat = read_matrix(args.matrix)
    explicit = [args.t1_lo, args.t1_hi, args.t2_lo, args.t2_hi]
    if args.symmetric:
        eig = eig2_scaled(mat)
        q = eig.u2_hat / eig.u1_hat
        lo, hi = float(q.max()), float(-1.0 / q.min())
        if args.min_defect or eig.lam2 < 0:
            t_lo, t_hi = lo, hi
        else:
            t_lo = args.t1_lo if args.t1_lo is not None else 0.5 * (lo + hi)
            t_hi = args.t1_hi if args.t1_hi is not None else t_lo
        out = threeway_symmetric(eig, t_lo, t_hi)
    else:
        s = svd2(mat)
        if args.min_defect:
            params = minimize_defects(s).params
        elif any(v is not None for v in explicit):
            if any(v is None for v in explicit):
                raise InputError("provide all of --t1-lo --t1-hi --t2-lo --t2-hi or none")
            params = ThreeWayParams(*explicit)
        else:
            stats = ratio_stats(s)
            box = tbox(stats)
            if box is None:
                raise InputError("matrix's rank-2 truncation is not nonnegative; "
                                 "no exact three-way factorization exists")
            t1, t2 = box.midpoint()
            params = ThreeWayParams(t1_lo=t1, t1_hi=t1, t2_lo=t2, t2_hi=t2)
        out = threeway_nmf(s, params)
    err = frobenius(mat - out.reconstruct())
    print(f"threeway: params ({out.params.t1_lo:.4g}, {out.params.t1_hi:.4g}, "
          f"{out.params.t2_lo:.4g}, {out.params.t2_hi:.4g}), residual {err:.6g}")
    _write_factors(_prefix(args), out.l, out.r, out.m_mid)
    return 0


def _cmd_exact(args) -> int:
    mat = read_matrix(args.matrix)
    s = svd2(mat)
    stats = ratio_stats(s)
    box = tbox(stats)
    if box is None:
        raise InputError("matrix's rank-2 truncation is not nonnegative; "
                         "use qdr or anls for an approximation")
    t1 = args.t1 if args.t1 is not None else box.midpoint()[0]
    t2 = args.t2 if args.t2 is not None else box.midpoint()[1]
    nmf = exact_nmf(s, t1, t2)
    err = frobenius(mat - nmf.reconstruct())
    print(f"exact: box [{box.t1_lo:.6g}, {box.t1_hi:.6g}] x [{box.t2_lo:.6g}, {box.t2_hi:.6g}], "
          f"(t1, t2) = ({t1:.6g}, {t2:.6g}), residual {err:.6g}")
    _write_factors(_prefix(args), nmf.l, nmf.r)
    return 0


def _cmd_bench(args) -> int:
    spec = GeneratorSpec(
        family=args.family,
        seed=args.seed,
        count=args.count,
        m=args.m,
        n=args.n,
        noise_scale=args.noise_scale,
        total=args.total,
    )
    cfg = AnlsConfig(epsilon=args.eps, max_iters=args.max_iters)
    records = run_bench(spec, methods=tuple(args.methods), cfg=cfg, threads=args.threads)
    write_records_csv(records, args.out)
    stem = os.path.splitext(args.out)[0]
    table = aggregate_records(records, methods=list(args.methods))
    summary_path = f"{stem}.summary.csv"
    write_summary_csv(table, summary_path)
    outputs = [args.out, summary_path]
    if not args.no_figures:
        from .figures import render_bench_figures

        outputs.extend(render_bench_figures(records, stem))
    header = ["stat"] + list(table)
    print("  ".join(f"{h:>12}" for h in header))
    for row_name in ("mean time", "max time", "mean acc", "max acc", "mean acc init", "max acc init"):
        cells = [f"{table[m][row_name]:12.6g}" for m in table]
        print("  ".join([f"{row_name:>12}"] + cells))
    print("wrote " + ", ".join(outputs))
    return 0


_COMMANDS = {
    "qdr": _cmd_qdr,
    "anls": _cmd_anls,
    "threeway": _cmd_threeway,
    "exact": _cmd_exact,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"nmf2: error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except (InputError, OSError) as exc:
        print(f"nmf2: input error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"nmf2: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

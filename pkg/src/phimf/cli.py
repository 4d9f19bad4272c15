"""Command-line driver: error tables, companion-matrix runs, decay profiles,
approximant zeros, scalar samples and file-based inverse problems.

Exit status is 0 on success, 2 on usage errors and 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import errors
from .bvp import BvpProblem, solve_bvp, verify_bvp
from .decay import verify_decay
from .matfun import error_report
from .matrix import build_tridiag_toeplitz, read_matrix, read_vector
from .roots import zeros_psi_ns
from .scalar import psi1, psi_ns

SLOW_DIM = 512

# which kernel to name when a numerical failure escapes
_KERNELS = {
    errors.NotPositiveDefinite: "band_cholesky",
    errors.Singular: "dense_lu",
    errors.MaxSweepsExceeded: "jacobi_eig",
    errors.NoConvergence: "aberth_roots",
    errors.PoleProximity: "scalar evaluation",
    errors.NotSymmetric: "jacobi_eig",
}


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _num(x) -> str:
    """Shortest round-trip decimal; overflowed errors read ``divergent``."""
    x = float(x)
    return "divergent" if np.isinf(x) else repr(x)


def _json_num(x):
    x = float(x)
    if np.isinf(x):
        return "divergent"
    return None if np.isnan(x) else x


def _workers() -> int:
    raw = os.environ.get("PHIMF_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"PHIMF_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise UsageError("PHIMF_THREADS must be a positive integer")
    return n


def _map_ordered(fn, items):
    """Apply ``fn`` to ``items`` in parallel; results come back in input order."""
    items = list(items)
    workers = min(_workers(), max(len(items), 1))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _check_dims(dims, allow_slow: bool, what: str = "dimension"):
    for d in dims:
        if d < 2:
            raise UsageError(f"{what} must be at least 2, got {d}")
        if d > SLOW_DIM and not allow_slow:
            raise UsageError(f"{what} {d} exceeds {SLOW_DIM}; pass --allow-slow")


# ---------------------------------------------------------------------------
# subcommands; each returns (header, rows, extra) for tabular output or a dict
# ---------------------------------------------------------------------------

def run_tables(args):
    _check_dims(args.dims, args.allow_slow)
    if args.m < 0 or args.N < args.m:
        raise UsageError("need 0 <= m <= N")

    def one(d):
        return error_report(args.example, d, args.N, args.m, norm=args.norm)

    reports = _map_ordered(one, args.dims)
    rows = [[r.dim, r.err_p, r.err_r] for r in reports]
    return ["d", "err_p", "err_r"], rows, {"example": args.example, "N": args.N, "m": args.m,
                                            "norm": args.norm}


def run_companion(args):
    _check_dims([args.d], args.allow_slow)
    if any(N < args.m for N in args.orders) or args.m < 0:
        raise UsageError("need 0 <= m <= N for every order")
    jobs = [(g, N) for g in args.gammas for N in args.orders]

    def one(job):
        g, N = job
        return error_report("companion", args.d, N, args.m, gamma=g, norm=args.norm)

    reports = _map_ordered(one, jobs)
    rows = [[g, N, r.err_p, r.err_r] for (g, N), r in zip(jobs, reports)]
    return ["gamma", "N", "err_p", "err_r"], rows, {"d": args.d, "m": args.m, "norm": args.norm}


def run_decay(args):
    if args.matrix:
        A = read_matrix(args.matrix)
    else:
        if args.d < 2:
            raise UsageError("d must be at least 2")
        # tridiag(-1/2, 0, -1/2): spectrum inside [-1, 1]
        A = build_tridiag_toeplitz(args.d, -0.5, 0.0, -0.5)
    d = A.dim if hasattr(A, "dim") else A.shape[0]
    _check_dims([d], args.allow_slow)
    row = d // 2 if args.row is None else args.row
    if not 0 <= row < d:
        raise UsageError(f"row must lie in [0, {d - 1}]")
    rep = verify_decay(A, args.n, args.s, row, oracle=args.oracle, safety=args.safety,
                       pair_factor=args.pair_factor)
    notes = [
        f"row {rep.row}, n={args.n}, s={args.s}, oracle={args.oracle}",
        "actual_max_abs: largest |psi_1(A)[row, j]| over the entries at that offset",
        "thm3_bound: smaller of the two entry bounds at that offset",
        f"bestpoly_bound: chi={rep.chi!r}, M(chi) estimated by sampling 10000 ellipse points"
        f" ({rep.M_estimate!r})",
        f"violations: {rep.violations}",
    ]
    return (["offset", "actual_max_abs", "thm3_bound", "bestpoly_bound"], rep.rows,
            {"notes": notes, "violations": rep.violations})


def run_zeros(args):
    rs = zeros_psi_ns(args.n, args.s)
    rows = [[z.real, z.imag] for z in rs.roots]
    return ["re", "im"], rows, {"n": args.n, "s": args.s, "count": len(rs),
                                "residual_max": rs.residual_max}


def run_scalar(args):
    if args.points < 1:
        raise UsageError("points must be positive")
    x = np.linspace(args.xmin, args.xmax, args.points)
    if args.imag_points <= 1:
        exact = np.asarray(psi1(x))
        approx = np.asarray(psi_ns(x, args.n, args.s))
        rows = [[a, b, c, abs(b - c)] for a, b, c in zip(x, exact, approx)]
        return ["x", "psi1", "psi_ns", "abs_error"], rows, {"n": args.n, "s": args.s}
    y = np.linspace(args.imag_min, args.imag_max, args.imag_points)
    rows = []
    for b in y:
        for a in x:
            z = complex(a, b)
            try:
                e, r = complex(psi1(z)), complex(psi_ns(z, args.n, args.s))
                rows.append([a, b, e.real, e.imag, r.real, r.imag, abs(e - r)])
            except errors.PoleProximity:
                rows.append([a, b] + [float("nan")] * 5)
    return (["re", "im", "psi1_re", "psi1_im", "psi_ns_re", "psi_ns_im", "abs_error"], rows,
            {"n": args.n, "s": args.s})


def run_bvp(args):
    try:
        A = read_matrix(args.matrix)
        g = read_vector(args.g)
        h = read_vector(args.h)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc))
    if args.t_points < 2:
        raise UsageError("t-points must be at least 2")
    if not args.tau > 0:
        raise UsageError("tau must be positive")
    try:
        problem = BvpProblem(A, g, h, args.tau, args.n, args.s,
                             np.linspace(0.0, args.tau, args.t_points))
    except errors.DimensionMismatch as exc:
        raise UsageError(str(exc))
    sol = solve_bvp(problem)
    report = verify_bvp(problem, sol, args.fd_step)
    return {
        "p": [float(v) for v in sol.p],
        "trajectory": [{"t": t, "u": [float(v) for v in u]} for t, u in sol.trajectory],
        "residual_report": report.as_dict(),
    }


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _cell(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return _num(v)


def _render(result, fmt: str, command: str) -> str:
    if isinstance(result, dict):
        return json.dumps(result, indent=2, ensure_ascii=False) + "\n"
    header, rows, extra = result
    if fmt == "json":
        payload = {"columns": header,
                   "rows": [[int(v) if isinstance(v, (int, np.integer)) else _json_num(v)
                             for v in r] for r in rows]}
        payload.update({k: v for k, v in extra.items()})
        return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    buf = io.StringIO()
    for note in extra.get("notes", []):
        buf.write(f"# {note}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="phimf", description=__doc__.split("\n\n")[0].replace("\n", " "))
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default=None,
                        help="output format (default: csv; json for bvp)")
    common.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
    common.add_argument("--allow-slow", action="store_true",
                        help=f"permit dimensions above {SLOW_DIM}")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tables", parents=[common], help="err_p / err_r for the test matrices")
    t.add_argument("--example", choices=["tridiag", "qs", "kms"], default="tridiag")
    t.add_argument("--dims", type=_int_list, default=[256, 512])
    t.add_argument("--N", type=int, default=50, help="polynomial order N")
    t.add_argument("--m", type=int, default=3, help="polynomial order of the rational approximant")
    t.add_argument("--norm", choices=["2", "fro"], default="2")

    c = sub.add_parser("companion", parents=[common], help="errors for scaled circulant generators")
    c.add_argument("--gammas", type=_float_list, default=[2, 4, 8, 16, 32, 64])
    c.add_argument("--d", type=int, default=512)
    c.add_argument("--orders", type=_int_list, default=[50])
    c.add_argument("--m", type=int, default=3)
    c.add_argument("--norm", choices=["2", "fro"], default="2")

    dc = sub.add_parser("decay", parents=[common], help="entry decay against the bounds")
    dc.add_argument("--d", type=int, default=200)
    dc.add_argument("--matrix", default=None, help="symmetric banded matrix file")
    dc.add_argument("--n", type=int, default=3)
    dc.add_argument("--s", type=int, default=50)
    dc.add_argument("--row", type=int, default=None)
    dc.add_argument("--oracle", choices=["series", "jacobi"], default="series")
    dc.add_argument("--safety", type=float, default=0.95)
    dc.add_argument("--pair-factor", type=float, default=1.0)

    z = sub.add_parser("zeros", parents=[common], help="zeros of psi_{n,s}")
    z.add_argument("--n", type=int, default=0)
    z.add_argument("--s", type=int, default=80)

    sc = sub.add_parser("scalar", parents=[common], help="psi_1 against psi_{n,s} on a grid")
    sc.add_argument("--n", type=int, default=4)
    sc.add_argument("--s", type=int, default=16)
    sc.add_argument("--xmin", type=float, default=-3 * np.pi)
    sc.add_argument("--xmax", type=float, default=3 * np.pi)
    sc.add_argument("--points", type=int, default=1000)
    sc.add_argument("--imag-min", type=float, default=-3 * np.pi)
    sc.add_argument("--imag-max", type=float, default=3 * np.pi)
    sc.add_argument("--imag-points", type=int, default=0,
                    help="sample a complex grid when above 1")

    b = sub.add_parser("bvp", parents=[common], help="solve the inverse problem from files")
    b.add_argument("--matrix", required=True)
    b.add_argument("--g", required=True)
    b.add_argument("--h", required=True)
    b.add_argument("--tau", type=float, required=True)
    b.add_argument("--n", type=int, default=4)
    b.add_argument("--s", type=int, default=200)
    b.add_argument("--t-points", type=int, default=9)
    b.add_argument("--fd-step", type=float, default=1e-4)
    return p


_RUNNERS = {
    "tables": run_tables, "companion": run_companion, "decay": run_decay,
    "zeros": run_zeros, "scalar": run_scalar, "bvp": run_bvp,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on unknown flags
    if args.format is None:
        args.format = "json" if args.command == "bvp" else "csv"
    try:
        if args.command == "bvp" and args.format != "json":
            raise UsageError("bvp writes JSON only")
        for name in ("n", "s"):
            if getattr(args, name, 0) < 0:
                raise UsageError(f"{name} must be nonnegative")
        text = _render(_RUNNERS[args.command](args), args.format, args.command)
    except UsageError as exc:
        print(f"phimf {args.command}: {exc}", file=sys.stderr)
        return 2
    except (errors.DimensionMismatch, errors.DegreeTooLarge, errors.BandViolation) as exc:
        print(f"phimf {args.command}: {exc}", file=sys.stderr)
        return 2
    except errors.PhimfError as exc:
        kernel = next((k for cls, k in _KERNELS.items() if isinstance(exc, cls)), "numerics")
        print(f"phimf {args.command}: numerical failure in {kernel}: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"phimf {args.command}: {exc}", file=sys.stderr)
        return 2
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front-end: solvers, checks, and CSV/JSON artifacts.

Exit codes are a contract: 0 success, 2 invalid flags or inputs, 3 radial
solver failure, 4 iteration cap reached, 5 malformed mesh, 6 inequality
violation, 7 volume mismatch.  Optional --plot flags render a PNG next to
the delimited output; CSV/JSON remains the machine boundary.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .core import MeshError, ProblemParams, SolverError, Tolerances, VolumeMismatchError
from .domains import KINDS, build_domain
from .fk import fk_check, save_report
from .levelset import (
    HScanSummary,
    default_t_grid,
    eigen_phi,
    h_scan,
    slice_radial,
    transplant,
    write_scan_csv,
    write_transplant_csv,
    zero_phi,
)
from .mesh import load_mesh
from .radial import load_radial, save_radial, solve_ball
from .variational import EpsilonParams, load_solution, save_solution, solve_domain

__all__ = ["main", "build_parser"]

_BETA_ADVISORY_HIGH = 1.0e8


def _advise_beta(beta: float) -> None:
    if beta == 0.0:
        print(
            "advisory: beta = 0 is the Neumann limit; the Robin statements "
            "assume 0 < beta < infinity (lambda1 = 0 with a constant eigenfunction)",
            file=sys.stderr,
        )
    elif beta > _BETA_ADVISORY_HIGH:
        print(
            f"advisory: beta = {beta:g} is effectively the Dirichlet limit; "
            "the Robin statements assume a finite beta",
            file=sys.stderr,
        )


def _params_from(args) -> ProblemParams:
    return ProblemParams(p=args.p, beta=args.beta, dim=getattr(args, "dim", 2))


def _load_mesh_checked(path):
    try:
        return load_mesh(path)
    except OSError as err:
        raise MeshError(f"cannot read mesh file {path}: {err}") from err


# ---------------------------------------------------------------------------
# commands


def cmd_radial(args) -> int:
    params = _params_from(args)
    _advise_beta(params.beta)
    sol = solve_ball(params, radius=args.radius)
    print(f"{sol.lambda1:.12g}")
    if args.out:
        save_radial(sol, args.out)
    if args.plot:
        from . import figures

        figures.plot_radial(sol, args.plot)
    return 0


def cmd_solve(args) -> int:
    params = _params_from(args)
    eps = EpsilonParams(args.epsilon)
    _advise_beta(params.beta)
    mesh = _load_mesh_checked(args.mesh)
    sol = solve_domain(mesh, params, eps)
    print(f"{sol.lambda1:.12g}")
    if args.out:
        save_solution(sol, args.out, args.mesh)
    if args.plot:
        from . import figures

        figures.plot_solution(sol, args.plot)
    if not sol.converged:
        print(
            f"warning: iteration cap reached after {sol.iterations} steps; "
            "the written field is the best iterate",
            file=sys.stderr,
        )
        return 4
    return 0


def cmd_fk_check(args) -> int:
    if args.beta <= 0.0:
        raise ValueError(f"the comparison needs beta > 0, got {args.beta}")
    params = _params_from(args)
    _advise_beta(params.beta)
    mesh = _load_mesh_checked(args.mesh)
    sol = solve_domain(mesh, params)
    report = fk_check(mesh, params, descriptor=args.mesh, domain_solution=sol)
    print(
        f"lambda_omega = {report.lambda_omega:.12g}  lambda_ball = {report.lambda_ball:.12g}  "
        f"gap = {report.gap:.12g}  passed = {str(report.passed).lower()}"
    )
    if args.out:
        save_report(report, args.out)
    if args.plot:
        from . import figures

        figures.plot_fk(report, args.plot)
    if not sol.converged:
        print("warning: domain solve hit the iteration cap", file=sys.stderr)
        return 4
    if not report.passed:
        print(
            f"inequality violated: gap {report.gap:.6g} below -tolerance {-report.tolerance:.6g}",
            file=sys.stderr,
        )
        return 6
    return 0


def _print_scan_summary(summary: HScanSummary, lambda1: float) -> None:
    ratio = max(abs(summary.min_h - lambda1), abs(summary.max_h - lambda1)) / lambda1
    print(
        f"min_H={summary.min_h:.12g} max_H={summary.max_h:.12g} "
        f"lambda1={lambda1:.12g} constancy={ratio:.6g}"
    )


def cmd_levelset(args) -> int:
    with open(args.solution) as fh:
        doc = json.load(fh)
    is_radial = "grid" in doc and "flux" in doc

    if is_radial:
        if args.phi != "eigen":
            raise ValueError("radial solutions support only --phi eigen (g is built in)")
        sol = load_radial(args.solution)
        grid = default_t_grid(sol, args.t_count)
        slices = [slice_radial(sol, t) for t in grid]
        hs = [s.h_value for s in slices]
        k = int(np.argmin(hs))
        summary = HScanSummary(hs[k], slices[k].t, max(hs))
        write_scan_csv(slices, args.out)
        _print_scan_summary(summary, sol.lambda1)
        if args.plot:
            from . import figures

            figures.plot_scan(slices, sol.lambda1, args.plot)
        return 0

    mesh = load_mesh(args.mesh) if args.mesh else None
    sol = load_solution(args.solution, mesh=mesh)
    if args.phi.startswith("transplant:"):
        ball = load_radial(args.phi.split(":", 1)[1])
        phi, rows = transplant(sol, ball)
        write_transplant_csv(sol, phi, rows, args.out)
        h_omega = [r[1] for r in rows]
        k = int(np.argmin(h_omega))
        summary = HScanSummary(h_omega[k], rows[k][0], max(h_omega))
        _print_scan_summary(summary, sol.lambda1)
        if args.plot:
            from . import figures

            figures.plot_transplant(rows, args.plot)
        return 0

    if args.phi == "eigen":
        phi = eigen_phi(sol)
    elif args.phi == "zero":
        phi = zero_phi(sol)
    else:
        raise ValueError(
            f"unknown test function {args.phi!r}; expected eigen, zero, or transplant:BALL_JSON"
        )
    grid = default_t_grid(sol, args.t_count)
    slices, summary = h_scan(sol, phi, grid)
    write_scan_csv(slices, args.out)
    _print_scan_summary(summary, sol.lambda1)
    if args.plot:
        from . import figures

        figures.plot_scan(slices, sol.lambda1, args.plot)
    return 0


_SWEEP_COLUMNS = ["p", "beta", "domain", "area", "lambda_omega", "lambda_ball", "gap", "passed"]


def _run_sweep_job(job: dict) -> dict:
    """One fk comparison; failures come back as an exit-code string in
    `passed` so the sweep never dies on a single row."""
    domain = job.get("domain", {})
    row = {c: "" for c in _SWEEP_COLUMNS}
    row["p"] = f"{job.get('p', '')}"
    row["beta"] = f"{job.get('beta', '')}"
    row["domain"] = str(domain.get("kind", "?")) if isinstance(domain, dict) else "?"
    try:
        params = ProblemParams(p=float(job["p"]), beta=float(job["beta"]))
        if params.beta <= 0.0:
            raise ValueError("sweep jobs need beta > 0")
        mesh, desc = build_domain(domain, float(job["h"]))
        row["domain"] = desc
        sol = solve_domain(mesh, params)
        report = fk_check(mesh, params, descriptor=desc, domain_solution=sol)
        row.update(
            area=f"{report.area:.12g}",
            lambda_omega=f"{report.lambda_omega:.12g}",
            lambda_ball=f"{report.lambda_ball:.12g}",
            gap=f"{report.gap:.12g}",
            passed="true" if report.passed else "false",
        )
        if not sol.converged:
            row["passed"] = "4"
    except (MeshError, OSError):
        row["passed"] = "5"
    except SolverError:
        row["passed"] = "3"
    except (ValueError, KeyError, TypeError):
        row["passed"] = "2"
    return row


def cmd_sweep(args) -> int:
    try:
        with open(args.spec) as fh:
            spec = json.load(fh)
        jobs = spec["jobs"]
        if not isinstance(jobs, list):
            raise TypeError("'jobs' must be a list")
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as err:
        raise ValueError(f"cannot read sweep spec {args.spec}: {err}") from err

    if args.parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.parallel) as pool:
            rows = list(pool.map(_run_sweep_job, jobs))
        for k, row in enumerate(rows):
            print(f"[{k + 1}/{len(jobs)}] {row['domain']}: passed={row['passed']}", file=sys.stderr)
    else:
        rows = []
        for k, job in enumerate(jobs):
            row = _run_sweep_job(job)
            rows.append(row)
            print(f"[{k + 1}/{len(jobs)}] {row['domain']}: passed={row['passed']}", file=sys.stderr)

    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_SWEEP_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    if args.plot and rows:
        from . import figures

        figures.plot_sweep(rows, args.plot)
    return 0 if all(row["passed"] == "true" for row in rows) else 6


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robinfk",
        description="First Robin eigenvalue of the p-Laplacian: radial and mesh "
        "solvers, level-set checks, and ball-vs-domain comparisons.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    r = sub.add_parser("radial", help="solve the ball eigenvalue by shooting")
    r.add_argument("--p", type=float, required=True, help="exponent p > 1")
    r.add_argument("--beta", type=float, required=True, help="boundary parameter beta >= 0")
    r.add_argument("--dim", type=int, default=2, help="space dimension N >= 2 (default 2)")
    r.add_argument("--radius", type=float, default=1.0, help="ball radius (default 1)")
    r.add_argument("--out", default=None, help="write the radial solution JSON here")
    r.add_argument("--plot", default=None, help="write a profile figure PNG here")
    r.set_defaults(func=cmd_radial)

    s = sub.add_parser("solve", help="minimize the Rayleigh quotient on a mesh")
    s.add_argument("--mesh", required=True, help="mesh JSON produced by this package")
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--epsilon", type=float, default=0.0, help="regularization (default 0)")
    s.add_argument("--out", default=None, help="write the eigensolution JSON here")
    s.add_argument("--plot", default=None, help="write an eigenfunction figure PNG here")
    s.set_defaults(func=cmd_solve)

    f = sub.add_parser("fk-check", help="compare a domain against the equal-area ball")
    f.add_argument("--mesh", required=True)
    f.add_argument("--p", type=float, required=True)
    f.add_argument("--beta", type=float, required=True)
    f.add_argument("--out", default=None, help="write the comparison report JSON here")
    f.add_argument("--plot", default=None, help="write a comparison figure PNG here")
    f.set_defaults(func=cmd_fk_check)

    l = sub.add_parser("levelset", help="scan the H functional over level sets")
    l.add_argument("--solution", required=True, help="radial or mesh solution JSON")
    l.add_argument("--mesh", default=None, help="override the mesh path recorded in the solution")
    l.add_argument(
        "--phi",
        default="eigen",
        help="test function: eigen, zero, or transplant:BALL_JSON (default eigen)",
    )
    l.add_argument("--t-count", type=int, default=32, help="number of quantile thresholds")
    l.add_argument("--out", required=True, help="write the scan CSV here")
    l.add_argument("--plot", default=None, help="write an H-vs-t figure PNG here")
    l.set_defaults(func=cmd_levelset)

    w = sub.add_parser("sweep", help="run fk comparisons over a JSON job list")
    w.add_argument("--spec", required=True, help='JSON {"jobs": [{p, beta, domain, h}, ...]}')
    w.add_argument("--out", required=True, help="write the sweep CSV here")
    w.add_argument("--parallel", type=int, default=1, help="concurrent jobs (default 1)")
    w.add_argument("--plot", default=None, help="write a gap-per-job figure PNG here")
    w.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except VolumeMismatchError as err:
        print(f"error: {err}", file=sys.stderr)
        return 7
    except MeshError as err:
        print(f"error: {err}", file=sys.stderr)
        return 5
    except SolverError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

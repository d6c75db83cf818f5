"""The ball-versus-domain eigenvalue comparison at equal volume.

For any domain, the first Robin eigenvalue of the equal-volume ball is a
lower bound; the check solves both sides independently (mesh minimization
against radial shooting) and reports the gap against a combined tolerance
of 2% of the ball value plus a declared discretization slack 3 h^2 times
the ball value.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import ProblemParams, Tolerances
from .mesh import TriMesh
from .radial import solve_ball
from .variational import EigenSolution, solve_domain

__all__ = ["FkReport", "fk_check", "save_report", "load_report"]

_GAP_REL_TOL = 0.02
_SLACK_FACTOR = 3.0


@dataclass(frozen=True)
class FkReport:
    """Equal-volume comparison of a domain against the ball."""

    omega_descriptor: str
    p: float
    beta: float
    area: float
    mesh_size: float
    lambda_omega: float
    ball_radius: float
    lambda_ball: float
    gap: float
    slack: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "FkReport":
        return cls(**{f: doc[f] for f in cls.__dataclass_fields__})


def _estimate_mesh_size(mesh: TriMesh) -> float:
    """Target edge length recovered from the boundary subdivision."""
    return float(np.median(mesh.boundary_lengths()))


def fk_check(
    mesh: TriMesh,
    params: ProblemParams,
    descriptor: str = "mesh",
    tol: Tolerances | None = None,
    mesh_size: float | None = None,
    domain_solution: EigenSolution | None = None,
) -> FkReport:
    """Compare the domain's eigenvalue against the equal-area ball's.

    The ball radius solves pi R^2 = area exactly; the combined tolerance is
    2% of the ball eigenvalue plus the declared slack 3 * mesh_size^2 times
    the ball eigenvalue (mesh_size estimated from the boundary subdivision
    when not given).  A precomputed domain solution may be passed to avoid
    re-solving.
    """
    if params.beta <= 0.0:
        raise ValueError("the comparison needs beta > 0 (beta = 0 makes both sides zero)")
    if params.dim != 2:
        raise ValueError("the mesh comparison is two-dimensional")
    area = mesh.area()
    radius = math.sqrt(area / math.pi)
    if domain_solution is None:
        domain_solution = solve_domain(mesh, params, tol=tol)
    elif domain_solution.mesh is not mesh:
        raise ValueError("domain_solution was computed on a different mesh")
    ball = solve_ball(params, radius=radius, tol=tol)
    if mesh_size is None:
        mesh_size = _estimate_mesh_size(mesh)
    slack = _SLACK_FACTOR * mesh_size**2 * ball.lambda1
    tolerance = _GAP_REL_TOL * ball.lambda1 + slack
    gap = domain_solution.lambda1 - ball.lambda1
    return FkReport(
        omega_descriptor=descriptor,
        p=params.p,
        beta=params.beta,
        area=area,
        mesh_size=mesh_size,
        lambda_omega=domain_solution.lambda1,
        ball_radius=radius,
        lambda_ball=ball.lambda1,
        gap=gap,
        slack=slack,
        tolerance=tolerance,
        passed=bool(gap >= -tolerance),
    )


def save_report(report: FkReport, path) -> None:
    with open(path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)


def load_report(path) -> FkReport:
    with open(path) as fh:
        return FkReport.from_dict(json.load(fh))

"""First Robin eigenvalue of the p-Laplacian: solvers and verification.

Radial shooting on balls, Rayleigh-quotient minimization on triangle
meshes, level-set functionals with lower-bound scans and the equal-volume
transplant, and the ball-versus-domain comparison, all behind a small CLI.
"""

from .core import (
    MeshError,
    ProblemParams,
    SolverError,
    Tolerances,
    VolumeMismatchError,
    ball_radius_for_volume,
    ball_volume,
    lindqvist_constant_estimate,
    lindqvist_gap,
    lindqvist_gap_many,
    lp_norm,
    unit_ball_volume,
)
from .domains import build_domain, outline_for
from .fk import FkReport, fk_check, load_report, save_report
from .levelset import (
    HScanSummary,
    LevelSetSlice,
    TestFunctionField,
    capped_phi,
    default_t_grid,
    eigen_phi,
    h_scan,
    slice_mesh,
    slice_radial,
    transplant,
    write_scan_csv,
    write_transplant_csv,
    zero_phi,
)
from .mesh import (
    DiscreteField,
    TriMesh,
    load_mesh,
    make_disk,
    make_polygon,
    p1_gradient,
    save_mesh,
)
from .radial import (
    RadialSolution,
    ShootResult,
    eigenvalue_identity_residuals,
    g_profile,
    load_radial,
    radial_rhs,
    save_radial,
    shoot,
    solve_ball,
)
from .variational import (
    EigenSolution,
    EpsilonParams,
    epsilon_sweep,
    load_solution,
    rayleigh,
    rayleigh_gradient,
    save_solution,
    solve_domain,
)

__version__ = "0.1.0"

__all__ = [
    "MeshError",
    "ProblemParams",
    "SolverError",
    "Tolerances",
    "VolumeMismatchError",
    "ball_radius_for_volume",
    "ball_volume",
    "lindqvist_constant_estimate",
    "lindqvist_gap",
    "lindqvist_gap_many",
    "lp_norm",
    "unit_ball_volume",
    "build_domain",
    "outline_for",
    "FkReport",
    "fk_check",
    "load_report",
    "save_report",
    "HScanSummary",
    "LevelSetSlice",
    "TestFunctionField",
    "capped_phi",
    "default_t_grid",
    "eigen_phi",
    "h_scan",
    "slice_mesh",
    "slice_radial",
    "transplant",
    "write_scan_csv",
    "write_transplant_csv",
    "zero_phi",
    "DiscreteField",
    "TriMesh",
    "load_mesh",
    "make_disk",
    "make_polygon",
    "p1_gradient",
    "save_mesh",
    "RadialSolution",
    "ShootResult",
    "eigenvalue_identity_residuals",
    "g_profile",
    "load_radial",
    "radial_rhs",
    "save_radial",
    "shoot",
    "solve_ball",
    "EigenSolution",
    "EpsilonParams",
    "epsilon_sweep",
    "load_solution",
    "rayleigh",
    "rayleigh_gradient",
    "save_solution",
    "solve_domain",
    "__version__",
]

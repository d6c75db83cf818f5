"""Discrete Rayleigh-quotient minimization on triangle meshes.

The first Robin eigenvalue on a mesh is the minimum over nonzero P1 fields
of

    R(u) = [ sum_T |T| (eps ubar_T^2 + |grad u|_T^2)^(p/2)
             + beta sum_e int_e |u|^p ds ] / int_Omega |u|^p dx,

where the gradient is the per-triangle constant of the P1 interpolant,
ubar_T is the triangle mean (the eps term regularizes the degenerate
p-Laplacian; eps = 0 is the plain quotient), and the L^p integrals use a
three-point Gauss rule on each triangle and edge.  The minimizer is found
by projected descent: step against the gradient of R, take absolute
values, renormalize in L^p, and stop when the quotient settles.  Since
|grad |u|| = |grad u| almost everywhere, projecting onto nonnegative
fields never raises the quotient at the continuous level, and the first
eigenfunction is the positive minimizer.

The descent direction is the gradient preconditioned by the fixed P1
operator (stiffness + mass): the raw coordinate gradient mixes mesh scales
and its convergence degrades like the square of the mesh resolution, while
the preconditioned direction converges at a mesh-independent rate.  The
Armijo rule, the projection, and the stopping rule are unchanged.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import splu

from .core import EDGE_QP, EDGE_QW, TRI_QP, TRI_QW, ProblemParams, Tolerances
from .mesh import DiscreteField, TriMesh, load_mesh, p1_gradient

__all__ = [
    "EpsilonParams",
    "EigenSolution",
    "rayleigh",
    "rayleigh_gradient",
    "solve_domain",
    "epsilon_sweep",
    "save_solution",
    "load_solution",
]

# Floor inside the (p-2)/2 power of the regularized gradient magnitude;
# keeps the p < 2 gradient total where grad u vanishes.
_DEGENERACY_FLOOR = 1.0e-24
_MAX_ITER = 100_000
_MAX_BACKTRACK = 60
_ARMIJO_SLOPE = 1.0e-4
# Quotients at or below this absolute level are treated as the Neumann zero
# mode (beta = 0): relative-change stopping is meaningless at zero.
_ZERO_LEVEL = 1.0e-8


@dataclass(frozen=True)
class EpsilonParams:
    """Regularization strength for the smoothed gradient term."""

    epsilon: float = 0.0

    def __post_init__(self) -> None:
        if not (
            isinstance(self.epsilon, (int, float))
            and math.isfinite(self.epsilon)
            and self.epsilon >= 0.0
        ):
            raise ValueError(f"epsilon must be >= 0 and finite, got {self.epsilon!r}")


@dataclass
class EigenSolution:
    """Converged discrete eigenpair; psi is L^p-normalized and positive."""

    mesh: TriMesh
    params: ProblemParams
    epsilon: float
    lambda1: float
    psi: np.ndarray
    m: float
    iterations: int
    converged: bool

    def field(self) -> DiscreteField:
        return DiscreteField(self.mesh, self.psi)


class _Fem:
    """Geometry arrays shared by every quotient evaluation on one mesh."""

    def __init__(self, mesh: TriMesh):
        self.mesh = mesh
        tri = mesh.triangles
        self.tri = tri
        self.areas = mesh.triangle_areas()
        p0 = mesh.vertices[tri[:, 0]]
        e1 = mesh.vertices[tri[:, 1]] - p0
        e2 = mesh.vertices[tri[:, 2]] - p0
        det = (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])[:, None]
        g1 = np.column_stack([e2[:, 1], -e2[:, 0]]) / det
        g2 = np.column_stack([-e1[:, 1], e1[:, 0]]) / det
        self.shape_grads = np.stack([-g1 - g2, g1, g2], axis=1)  # (nt, 3, 2)
        self.bedges = mesh.boundary_edges
        self.belens = mesh.boundary_lengths()
        # edge quadrature shape values: rows are quad points, cols the
        # (start, end) vertices of the edge
        self.edge_shapes = np.column_stack([1.0 - EDGE_QP, EDGE_QP])
        self._lu = None

    def grad(self, u: np.ndarray) -> np.ndarray:
        uv = u[self.tri]
        return np.einsum("tk,tkd->td", uv, self.shape_grads)

    def lu(self):
        """Factorization of stiffness + mass, the descent preconditioner."""
        if self._lu is None:
            tri = self.tri
            nv = self.mesh.n_vertices
            ke = np.einsum(
                "tid,tjd->tij", self.shape_grads, self.shape_grads
            ) * self.areas[:, None, None]
            me = (np.full((3, 3), 1.0 / 12.0) + np.eye(3) / 12.0)[None, :, :] * self.areas[
                :, None, None
            ]
            elem = (ke + me).ravel()
            rows = np.repeat(tri, 3, axis=1).ravel()
            cols = np.tile(tri, (1, 3)).ravel()
            a = coo_matrix((elem, (rows, cols)), shape=(nv, nv)).tocsc()
            self._lu = splu(a)
        return self._lu


def _fem(mesh: TriMesh) -> _Fem:
    cached = getattr(mesh, "_fem_cache", None)
    if cached is None:
        cached = _Fem(mesh)
        mesh._fem_cache = cached
    return cached


def _quotient_pieces(fem: _Fem, u: np.ndarray, params: ProblemParams, epsilon: float):
    """Numerator and denominator of the quotient plus reusable intermediates."""
    p = params.p
    uv = u[fem.tri]
    grad = np.einsum("tk,tkd->td", uv, fem.shape_grads)
    grad2 = np.einsum("td,td->t", grad, grad)
    ubar = uv.mean(axis=1)
    q = epsilon * ubar * ubar + grad2
    num_grad = float(np.sum(fem.areas * q ** (0.5 * p)))
    tri_q = uv @ TRI_QP.T  # (nt, 3) field values at the triangle quad points
    den = float(np.sum(fem.areas * (np.abs(tri_q) ** p @ TRI_QW)))
    edge_q = u[fem.bedges] @ fem.edge_shapes.T  # (nbe, 3)
    num_edge = params.beta * float(np.sum(fem.belens * (np.abs(edge_q) ** p @ EDGE_QW)))
    return num_grad + num_edge, den, grad, q, ubar, tri_q, edge_q


def rayleigh(mesh: TriMesh, field, params: ProblemParams, eps: EpsilonParams | None = None):
    """Value, numerator, and denominator of the (regularized) quotient.

    field may be a DiscreteField or a plain vertex-value array; it must not
    be identically zero.
    """
    if eps is None:
        eps = EpsilonParams()
    u = field.values if isinstance(field, DiscreteField) else np.asarray(field, dtype=float)
    if u.shape != (mesh.n_vertices,):
        raise ValueError(f"expected {mesh.n_vertices} vertex values, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise ValueError("field has non-finite values")
    fem = _fem(mesh)
    num, den, *_ = _quotient_pieces(fem, u, params, eps.epsilon)
    if den == 0.0:
        raise ValueError("field is identically zero")
    return num / den, num, den


def rayleigh_gradient(
    mesh: TriMesh, field, params: ProblemParams, eps: EpsilonParams | None = None
) -> np.ndarray:
    """Exact gradient of the quotient with respect to the vertex values.

    grad R = (grad num - R grad den) / den.  For p < 2 the factor
    (eps ubar^2 + |grad u|^2)^((p-2)/2) is evaluated with a 1e-24 floor
    inside the power so the expression stays finite where the field is
    locally constant.
    """
    if eps is None:
        eps = EpsilonParams()
    u = field.values if isinstance(field, DiscreteField) else np.asarray(field, dtype=float)
    if u.shape != (mesh.n_vertices,):
        raise ValueError(f"expected {mesh.n_vertices} vertex values, got shape {u.shape}")
    fem = _fem(mesh)
    p = params.p
    num, den, grad, q, ubar, tri_q, edge_q = _quotient_pieces(fem, u, params, eps.epsilon)
    if den == 0.0:
        raise ValueError("field is identically zero")
    value = num / den

    out = np.zeros(mesh.n_vertices)
    # gradient-term numerator: d/du_i  |T| q^(p/2)
    qf = fem.areas * (0.5 * p) * np.maximum(q, _DEGENERACY_FLOOR) ** (0.5 * p - 1.0)
    corner = 2.0 * np.einsum("td,tkd->tk", grad, fem.shape_grads)
    if eps.epsilon != 0.0:
        corner = corner + (2.0 / 3.0) * eps.epsilon * ubar[:, None]
    np.add.at(out, fem.tri, qf[:, None] * corner)
    # boundary-term numerator: d/du_i  beta int_e |u|^p
    sq = p * np.abs(edge_q) ** (p - 1.0) * np.sign(edge_q)  # (nbe, 3)
    edge_contrib = params.beta * fem.belens[:, None] * ((sq * EDGE_QW) @ fem.edge_shapes)
    np.add.at(out, fem.bedges, edge_contrib)
    # denominator: d/du_i  int |u|^p
    st = p * np.abs(tri_q) ** (p - 1.0) * np.sign(tri_q)  # (nt, 3)
    den_contrib = fem.areas[:, None] * ((st * TRI_QW) @ TRI_QP)
    dden = np.zeros(mesh.n_vertices)
    np.add.at(dden, fem.tri, den_contrib)

    return (out - value * dden) / den


def _lp_normalize(fem: _Fem, u: np.ndarray, p: float) -> np.ndarray:
    tri_q = u[fem.tri] @ TRI_QP.T
    norm_p = float(np.sum(fem.areas * (np.abs(tri_q) ** p @ TRI_QW)))
    return u / norm_p ** (1.0 / p)


def solve_domain(
    mesh: TriMesh,
    params: ProblemParams,
    eps: EpsilonParams | None = None,
    tol: Tolerances | None = None,
    seed_field: DiscreteField | np.ndarray | None = None,
) -> EigenSolution:
    """Minimize the quotient by projected preconditioned descent.

    Starts from seed_field (default: the constant |Omega|^(-1/p)), repeats
    { step against the preconditioned gradient with Armijo backtracking
    (initial step 1.0, halving, slope factor 1e-4); take absolute values;
    renormalize in L^p } until the relative quotient change drops below
    descent_rel_tol (or the quotient itself sits at the zero level, the
    beta = 0 case), and gives up converged=False after 1e5 iterations.
    """
    if eps is None:
        eps = EpsilonParams()
    if tol is None:
        tol = Tolerances()
    mesh.validate()
    fem = _fem(mesh)
    p = params.p

    if seed_field is None:
        u = np.full(mesh.n_vertices, mesh.area() ** (-1.0 / p))
    else:
        u = seed_field.values if isinstance(seed_field, DiscreteField) else np.asarray(seed_field)
        u = np.abs(np.array(u, dtype=float))
        if u.shape != (mesh.n_vertices,) or not np.all(np.isfinite(u)):
            raise ValueError("seed field must be finite with one value per vertex")
        if np.all(u == 0.0):
            raise ValueError("seed field is identically zero")
    u = _lp_normalize(fem, u, p)

    value, num, den = rayleigh(mesh, u, params, eps)
    iterations = 0
    converged = False
    while iterations < _MAX_ITER:
        iterations += 1
        grad = rayleigh_gradient(mesh, u, params, eps)
        direction = fem.lu().solve(grad)
        slope = float(np.dot(grad, direction))
        if slope <= 0.0:
            converged = True
            break
        step = 1.0
        new_u = None
        new_value = value
        for _ in range(_MAX_BACKTRACK):
            trial = np.abs(u - step * direction)
            if not np.any(trial):
                step *= 0.5
                continue
            trial = _lp_normalize(fem, trial, p)
            trial_value, _, _ = rayleigh(mesh, trial, params, eps)
            if trial_value <= value - _ARMIJO_SLOPE * step * slope:
                new_u, new_value = trial, trial_value
                break
            step *= 0.5
        if new_u is None:
            converged = True  # no admissible decrease: at the numerical floor
            break
        change = value - new_value
        u, value = new_u, new_value
        if change <= tol.descent_rel_tol * value or value <= _ZERO_LEVEL:
            converged = True
            break

    m = float(np.min(u))
    return EigenSolution(
        mesh=mesh,
        params=params,
        epsilon=eps.epsilon,
        lambda1=value,
        psi=u,
        m=m,
        iterations=iterations,
        converged=converged,
    )


def epsilon_sweep(
    mesh: TriMesh,
    params: ProblemParams,
    eps_list,
    tol: Tolerances | None = None,
):
    """Solve along a strictly decreasing regularization schedule ending at 0.

    Each solve is warm-started from the previous minimizer; the last entry
    is the plain quotient's eigenvalue.  Returns a list of
    (epsilon, lambda1_eps) pairs in schedule order.
    """
    eps_values = [float(e) for e in eps_list]
    if len(eps_values) == 0:
        raise ValueError("eps_list is empty")
    if any(b >= a for a, b in zip(eps_values, eps_values[1:])):
        raise ValueError(f"eps_list must be strictly decreasing, got {eps_values}")
    if eps_values[-1] != 0.0:
        raise ValueError(f"eps_list must end at 0, got final entry {eps_values[-1]}")
    out = []
    seed = None
    for e in eps_values:
        sol = solve_domain(mesh, params, EpsilonParams(e), tol, seed_field=seed)
        out.append((e, sol.lambda1))
        seed = sol.psi
    return out


def save_solution(sol: EigenSolution, path, mesh_path) -> None:
    """Write the eigenpair JSON; the mesh itself lives at mesh_path."""
    doc = {
        "params": sol.params.to_dict(),
        "epsilon": sol.epsilon,
        "lambda1": sol.lambda1,
        "m": sol.m,
        "iterations": sol.iterations,
        "converged": sol.converged,
        "psi": sol.psi.tolist(),
        "mesh_path": str(mesh_path),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_solution(path, mesh: TriMesh | None = None) -> EigenSolution:
    """Read an eigenpair JSON; loads its mesh from the recorded path unless
    one is passed in.  Relative mesh paths resolve against the JSON file."""
    import os

    with open(path) as fh:
        doc = json.load(fh)
    if mesh is None:
        mp = doc["mesh_path"]
        if not os.path.isabs(mp):
            mp = os.path.join(os.path.dirname(os.path.abspath(path)), mp)
        mesh = load_mesh(mp)
    psi = np.asarray(doc["psi"], dtype=float)
    if psi.shape != (mesh.n_vertices,):
        raise ValueError(
            f"solution has {psi.shape[0]} values but its mesh has {mesh.n_vertices} vertices"
        )
    return EigenSolution(
        mesh=mesh,
        params=ProblemParams.from_dict(doc["params"]),
        epsilon=float(doc.get("epsilon", 0.0)),
        lambda1=float(doc["lambda1"]),
        psi=psi,
        m=float(doc["m"]),
        iterations=int(doc["iterations"]),
        converged=bool(doc["converged"]),
    )

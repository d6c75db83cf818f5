"""Level sets of computed eigenfunctions and the H functional.

For a positive eigenfunction psi normalized to max 1, the superlevel set
U_t = {psi > t} splits its boundary into the interior isoline S_t and the
part of the domain boundary it reaches, and

    H(U_t, phi) = ( int_{S_t} phi dsigma + beta sigma(boundary part)
                    - (p-1) int_{U_t} phi^(p/(p-1)) dx ) / |U_t|.

With phi the eigenfunction's own |grad psi|^(p-1) / psi^(p-1), H is
constant in t and equals the eigenvalue; for any other nonnegative phi
whose boundary values stay at or below beta, min over t of H is a lower
bound for it.  Radial slices are computed from the shooting solution with
monotone-cubic interpolation and exact antiderivative quadrature; mesh
slices use marching triangles on the P1 interpolant with linear clipping
of triangles and boundary edges.  The transplant assigns to each level set
of a domain eigenfunction the g-value of the equal-volume concentric ball,
producing a comparison test function whose ball-side H values reproduce
the ball eigenvalue.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .core import VolumeMismatchError, unit_ball_volume
from .mesh import TriMesh, p1_gradient
from .radial import RadialSolution
from .variational import EigenSolution

__all__ = [
    "LevelSetSlice",
    "TestFunctionField",
    "HScanSummary",
    "eigen_phi",
    "capped_phi",
    "zero_phi",
    "default_t_grid",
    "slice_radial",
    "slice_mesh",
    "h_scan",
    "transplant",
    "write_scan_csv",
    "write_transplant_csv",
]

# nudge applied when a threshold collides with a vertex value
_COLLISION_EPS = 1.0e-14
_NUDGE_FACTOR = 1.0e-12
_N_THRESHOLDS = 32
_GRID_CLIP = 0.02
_MEMBERSHIP_SLACK = 1.0e-9


@dataclass(frozen=True)
class LevelSetSlice:
    """Measures of one superlevel set and its H value."""

    t: float
    volume: float
    interior_sigma: float
    exterior_sigma: float
    h_value: float


@dataclass(frozen=True)
class HScanSummary:
    min_h: float
    argmin_t: float
    max_h: float


@dataclass(frozen=True)
class TestFunctionField:
    """Nonnegative per-triangle test function with its boundary-class flag.

    in_m_beta records the discrete membership check: all values >= 0 and
    every triangle touching the domain boundary carries a value at most
    beta + 1e-9 (the discrete stand-in for a boundary limsup <= beta).
    """

    __test__ = False  # not a test case despite the class-name prefix

    mesh: TriMesh
    values: np.ndarray
    beta: float
    in_m_beta: bool = False

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != (self.mesh.n_triangles,):
            raise ValueError(
                f"expected one value per triangle ({self.mesh.n_triangles}), got {values.shape}"
            )
        if not np.all(np.isfinite(values)) or np.any(values < 0.0):
            raise ValueError("test function values must be finite and nonnegative")
        btris = _boundary_triangles(self.mesh)
        ok = bool(np.all(values[btris] <= self.beta + _MEMBERSHIP_SLACK))
        object.__setattr__(self, "in_m_beta", ok)


def _boundary_triangles(mesh: TriMesh) -> np.ndarray:
    """Indices of triangles owning at least one boundary edge."""
    tri = mesh.triangles
    edge_owner = {}
    for k in range(3):
        a = tri[:, k]
        b = tri[:, (k + 1) % 3]
        for idx, (x, y) in enumerate(zip(a.tolist(), b.tolist())):
            edge_owner[(x, y)] = idx
    owners = sorted({edge_owner[(a, b)] for a, b in mesh.boundary_edges.tolist()})
    return np.asarray(owners, dtype=np.int64)


def eigen_phi(sol: EigenSolution) -> TestFunctionField:
    """The eigenfunction's own test function, per triangle:
    (|grad psi| / triangle-mean psi)^(p-1)."""
    grads = p1_gradient(sol.mesh, sol.psi)
    gnorm = np.hypot(grads[:, 0], grads[:, 1])
    pbar = sol.psi[sol.mesh.triangles].mean(axis=1)
    vals = (gnorm / pbar) ** (sol.params.p - 1.0)
    return TestFunctionField(sol.mesh, vals, sol.params.beta)


def capped_phi(sol: EigenSolution, scale: float = 2.0) -> TestFunctionField:
    """min(beta, scale * eigen phi): a deliberately non-eigen member of the
    boundary class."""
    base = eigen_phi(sol)
    vals = np.minimum(sol.params.beta, scale * base.values)
    return TestFunctionField(sol.mesh, vals, sol.params.beta)


def zero_phi(sol: EigenSolution) -> TestFunctionField:
    return TestFunctionField(sol.mesh, np.zeros(sol.mesh.n_triangles), sol.params.beta)


def default_t_grid(sol, count: int = _N_THRESHOLDS) -> np.ndarray:
    """Thresholds at equal quantiles of the normalized value distribution
    (32 by default), clipped away from both ends of (m, 1); thresholds that
    collapse onto the clip bounds are deduplicated."""
    if isinstance(sol, (RadialSolution, EigenSolution)):
        values = sol.psi / np.max(sol.psi)
    else:
        raise TypeError(f"expected a radial or mesh eigensolution, got {type(sol).__name__}")
    if not 2 <= count <= 4096:
        raise ValueError(f"threshold count must lie in [2, 4096], got {count}")
    m = float(np.min(values))
    lo = m + _GRID_CLIP * (1.0 - m)
    hi = 1.0 - _GRID_CLIP * (1.0 - m)
    levels = (np.arange(count) + 0.5) / count
    grid = np.quantile(values, levels)
    grid = np.clip(grid, lo, hi)
    return np.unique(grid)


# ---------------------------------------------------------------------------
# radial slices


def _radial_interpolants(sol: RadialSolution):
    """(inverse of psi, g, antiderivative of g^p r^(N-1)) on the grid."""
    psi = sol.psi / sol.psi[0]
    inv = None
    if psi[-1] < psi[0]:
        inv = PchipInterpolator(psi[::-1], sol.grid[::-1])
    gfun = PchipInterpolator(sol.grid, sol.g)
    nd = sol.params.dim
    integrand = sol.g ** sol.params.p * sol.grid ** (nd - 1)
    antider = PchipInterpolator(sol.grid, integrand).antiderivative()
    return inv, gfun, antider


def _radial_h_at_radius(sol: RadialSolution, r: float, gfun, antider) -> LevelSetSlice:
    p = sol.params.p
    nd = sol.params.dim
    omega = unit_ball_volume(nd)
    radius = sol.radius
    interior = (p - 1.0) * nd * omega * float(antider(min(r, radius)))
    if r < radius:
        vol = omega * r**nd
        sigma_i = nd * omega * r ** (nd - 1)
        num = sigma_i * float(gfun(r)) ** (p - 1.0) - interior
        return LevelSetSlice(float("nan"), vol, sigma_i, 0.0, num / vol)
    vol = omega * radius**nd
    sigma_e = nd * omega * radius ** (nd - 1)
    num = sol.params.beta * sigma_e - interior
    return LevelSetSlice(float("nan"), vol, 0.0, sigma_e, num / vol)


def slice_radial(sol: RadialSolution, t: float) -> LevelSetSlice:
    """Slice a radial solution at threshold t of psi/max(psi).

    For m < t < 1 the level set is the concentric ball of radius r(t),
    carrying only interior boundary; for 0 < t <= m it is the whole ball,
    carrying only exterior boundary (this covers the t -> m limit, where
    the domain boundary takes over).  t outside (0, 1) is rejected.
    """
    if not (isinstance(t, (int, float)) and math.isfinite(t) and 0.0 < t < 1.0):
        raise ValueError(f"threshold must lie in (0, 1), got {t!r}")
    inv, gfun, antider = _radial_interpolants(sol)
    if t <= sol.m or inv is None:
        out = _radial_h_at_radius(sol, sol.radius, gfun, antider)
    else:
        r = float(inv(t))
        out = _radial_h_at_radius(sol, r, gfun, antider)
    return LevelSetSlice(float(t), out.volume, out.interior_sigma, out.exterior_sigma, out.h_value)


# ---------------------------------------------------------------------------
# mesh slices


class _LevelGeometry:
    """Per-solution arrays reused across thresholds of one scan."""

    def __init__(self, sol: EigenSolution):
        self.sol = sol
        mesh = sol.mesh
        top = float(np.max(sol.psi))
        self.psi = sol.psi / top
        self.m = float(np.min(self.psi))
        self.tri_psi = self.psi[mesh.triangles]  # (nt, 3)
        self.tri_xy = mesh.vertices[mesh.triangles]  # (nt, 3, 2)
        self.areas = mesh.triangle_areas()
        self.bedge_psi = self.psi[mesh.boundary_edges]  # (nbe, 2)
        self.belens = mesh.boundary_lengths()

    def nudged(self, t: float) -> float:
        if np.min(np.abs(self.psi - t)) < _COLLISION_EPS:
            t = t + _NUDGE_FACTOR * (1.0 - self.m)
        return t

    def clip(self, t: float):
        """Clipped areas per triangle, isoline segments, exterior length.

        Returns (area_above (nt,), mixed_tri_indices, segment_lengths,
        exterior_sigma).
        """
        above = self.tri_psi > t
        cnt = above.sum(axis=1)
        area_above = np.where(cnt == 3, self.areas, 0.0)

        seg_idx_parts = []
        seg_len_parts = []
        for case in (1, 2):
            sel = np.nonzero(cnt == case)[0]
            if sel.size == 0:
                continue
            pv = self.tri_psi[sel]
            xy = self.tri_xy[sel]
            if case == 1:
                pivot = np.argmax(above[sel], axis=1)
            else:
                pivot = np.argmin(above[sel], axis=1)
            order = (pivot[:, None] + np.arange(3)[None, :]) % 3
            pv = np.take_along_axis(pv, order, axis=1)
            xy = np.take_along_axis(xy, order[:, :, None], axis=1)
            s1 = (pv[:, 0] - t) / (pv[:, 0] - pv[:, 1])
            s2 = (pv[:, 0] - t) / (pv[:, 0] - pv[:, 2])
            x1 = xy[:, 0] + s1[:, None] * (xy[:, 1] - xy[:, 0])
            x2 = xy[:, 0] + s2[:, None] * (xy[:, 2] - xy[:, 0])
            frac = s1 * s2 * self.areas[sel]
            if case == 1:
                area_above[sel] = frac
            else:
                area_above[sel] = self.areas[sel] - frac
            seg_idx_parts.append(sel)
            seg_len_parts.append(np.hypot(*(x1 - x2).T))
        if seg_idx_parts:
            seg_idx = np.concatenate(seg_idx_parts)
            seg_len = np.concatenate(seg_len_parts)
        else:
            seg_idx = np.empty(0, dtype=np.int64)
            seg_len = np.empty(0)

        ea, eb = self.bedge_psi[:, 0], self.bedge_psi[:, 1]
        hi = np.maximum(ea, eb)
        lo = np.minimum(ea, eb)
        frac = np.zeros(len(self.belens))
        both = lo > t
        frac[both] = 1.0
        part = (hi > t) & ~both
        frac[part] = (hi[part] - t) / (hi[part] - lo[part])
        exterior = float(np.sum(self.belens * frac))
        return area_above, seg_idx, seg_len, exterior

    def assemble(self, t: float, phi: TestFunctionField) -> LevelSetSlice:
        t = self.nudged(float(t))
        if t >= 1.0:
            raise ValueError(f"empty level set: threshold {t} is not below max psi = 1")
        area_above, seg_idx, seg_len, exterior = self.clip(t)
        vol = float(np.sum(area_above))
        if vol <= 0.0:
            raise ValueError(f"empty level set at threshold {t}")
        p = self.sol.params.p
        line = float(np.sum(seg_len * phi.values[seg_idx]))
        bulk = float(np.sum(area_above * phi.values ** (p / (p - 1.0))))
        num = line + self.sol.params.beta * exterior - (p - 1.0) * bulk
        return LevelSetSlice(t, vol, float(np.sum(seg_len)), exterior, num / vol)


def slice_mesh(sol: EigenSolution, t: float, phi: TestFunctionField) -> LevelSetSlice:
    """Slice a mesh solution at threshold t of psi/max(psi).

    Marching triangles on the P1 interpolant: mixed triangles are clipped
    linearly, isoline segments carry phi at their midpoints (phi is
    per-triangle constant), boundary edges are clipped by the linear trace.
    Any t below the minimum returns the whole domain (no interior isoline);
    t at or above the maximum has an empty level set and is rejected.
    """
    if phi.mesh is not sol.mesh:
        raise ValueError("test function lives on a different mesh")
    if not (isinstance(t, (int, float)) and math.isfinite(t)):
        raise ValueError(f"threshold must be finite, got {t!r}")
    return _LevelGeometry(sol).assemble(t, phi)


def h_scan(sol: EigenSolution, phi: TestFunctionField, t_grid):
    """Slices across t_grid plus (min_H, argmin_t, max_H).

    phi must pass the boundary-class membership check, and every threshold
    must lie strictly between the normalized minimum and 1.
    """
    if not phi.in_m_beta:
        raise ValueError("test function fails the boundary-class membership check")
    geo = _LevelGeometry(sol)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a nonempty 1-D array")
    if np.any(t_grid <= geo.m) or np.any(t_grid >= 1.0):
        raise ValueError(f"thresholds must lie in ({geo.m}, 1)")
    slices = [geo.assemble(t, phi) for t in t_grid]
    hs = np.array([s.h_value for s in slices])
    k = int(np.argmin(hs))
    return slices, HScanSummary(float(hs[k]), slices[k].t, float(np.max(hs)))


# ---------------------------------------------------------------------------
# transplant


def transplant(omega_sol: EigenSolution, ball_sol: RadialSolution):
    """Equal-volume transplant of the ball's g-profile onto level sets.

    Each triangle is assigned g_ball(r)^(p-1) where r is the radius of the
    ball with the same volume as the superlevel set through the triangle's
    mean value.  Returns the resulting test function and, per default
    threshold, (t, H_domain, H_ball) where the ball side is evaluated at
    the equal-volume radius.
    """
    if (omega_sol.params.p, omega_sol.params.beta) != (ball_sol.params.p, ball_sol.params.beta):
        raise ValueError("domain and ball solutions use different parameters")
    if omega_sol.params.dim != 2 or ball_sol.params.dim != 2:
        raise ValueError("transplant is implemented for 2-D domains")
    if not omega_sol.converged:
        raise ValueError("domain solution did not converge")
    area = omega_sol.mesh.area()
    ball_area = math.pi * ball_sol.radius**2
    if abs(area - ball_area) > 1.0e-3 * ball_area:
        raise VolumeMismatchError(
            f"domain area {area} differs from ball volume {ball_area} beyond 1e-3 relative"
        )

    geo = _LevelGeometry(omega_sol)
    _, gfun, antider = _radial_interpolants(ball_sol)

    # area curve t -> |U_t| on a fine grid, then per-triangle radii
    span = 1.0 - geo.m
    fine = np.linspace(geo.m + 1.0e-6 * span, 1.0 - 1.0e-6 * span, 513)
    curve = np.array([np.sum(geo.clip(geo.nudged(t))[0]) for t in fine])
    tbar = geo.tri_psi.mean(axis=1)
    vols = np.interp(tbar, fine, curve, left=area, right=0.0)
    radii = np.minimum(np.sqrt(vols / math.pi), ball_sol.radius)
    phi_vals = np.maximum(gfun(radii), 0.0) ** (omega_sol.params.p - 1.0)
    phi = TestFunctionField(omega_sol.mesh, phi_vals, omega_sol.params.beta)

    rows = []
    prev_vol = None
    for t in default_t_grid(omega_sol):
        sl = geo.assemble(t, phi)
        if prev_vol is not None and sl.volume >= prev_vol:
            raise ValueError(
                f"level-set volumes are not nested at t = {sl.t}: the field did not converge"
            )
        prev_vol = sl.volume
        r = min(math.sqrt(sl.volume / math.pi), ball_sol.radius)
        hb = _radial_h_at_radius(ball_sol, r, gfun, antider).h_value
        rows.append((sl.t, sl.h_value, hb))
    return phi, rows


# ---------------------------------------------------------------------------
# CSV


def write_scan_csv(slices, path) -> None:
    """One row per threshold: t, volume, interior_sigma, exterior_sigma, H."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "volume", "interior_sigma", "exterior_sigma", "H"])
        for s in slices:
            writer.writerow(
                [f"{v:.12g}" for v in (s.t, s.volume, s.interior_sigma, s.exterior_sigma, s.h_value)]
            )


def write_transplant_csv(sol: EigenSolution, phi: TestFunctionField, rows, path) -> None:
    """Scan columns plus the ball-side H, one row per transplant threshold."""
    geo = _LevelGeometry(sol)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "volume", "interior_sigma", "exterior_sigma", "H", "H_ball"])
        for t, h_omega, h_ball in rows:
            s = geo.assemble(t, phi)
            writer.writerow(
                [
                    f"{v:.12g}"
                    for v in (s.t, s.volume, s.interior_sigma, s.exterior_sigma, h_omega, h_ball)
                ]
            )
